#include "quasispec/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

namespace quasispec {
namespace {

// ---------------------------------------------------------------- formatting

std::string fmt_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

void dump_canonical(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad1(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad1;
        out += Json(it.key()).dump();
        out += ": ";
        dump_canonical(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad1;
        dump_canonical(v, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      return;
    case Json::value_t::string:
      out += j.dump();  // quoted and escaped
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    default:
      out += "null";
      return;
  }
}

// ------------------------------------------------------------ schema helpers

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const Json& expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

void check_keys(const Json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok) fail(path + "." + it.key(), "unknown field");
  }
}

const Json& require_field(const Json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "required field missing");
  return *it;
}

long long get_int(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_unsigned()) return static_cast<long long>(j.get<unsigned long long>());
  fail(path, "expected an integer");
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Scalar get_complex_object(const Json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"re", "im"});
  const double re = get_number(require_field(j, path, "re"), path + ".re");
  const double im = get_number(require_field(j, path, "im"), path + ".im");
  return {re, im};
}

// Sparse vector: {"1": 1.0, "3": {"re": 0, "im": 2}} with 1-based indices.
Vec parse_sparse(const Json& j, const std::string& path, int dim) {
  expect_object(j, path);
  Vec v = Vec::Zero(dim);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const std::string kpath = path + "." + key;
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
      fail(kpath, "index keys must be positive integers (1-based)");
    long long idx = 0;
    try {
      idx = std::stoll(key);
    } catch (const std::exception&) {
      fail(kpath, "index out of range");
    }
    if (idx < 1 || idx > dim) fail(kpath, "index must be in [1, " + std::to_string(dim) + "]");
    const Json& val = it.value();
    v(static_cast<int>(idx - 1)) =
        val.is_number() ? Scalar(val.get<double>(), 0.0) : get_complex_object(val, kpath);
  }
  return v;
}

OperatorModel parse_operator(const Json& j) {
  const std::string path = "$.operator";
  expect_object(j, path);
  check_keys(j, path, {"type", "weights", "dim", "seed"});
  const std::string type = [&] {
    const Json& t = require_field(j, path, "type");
    if (!t.is_string()) fail(path + ".type", "expected a string");
    return t.get<std::string>();
  }();
  const long long dim = get_int(require_field(j, path, "dim"), path + ".dim");
  if (dim < 1 || dim > 65536) fail(path + ".dim", "must be in [1, 65536]");
  const int n = static_cast<int>(dim);

  if (type == "weighted_shift") {
    if (j.contains("seed")) fail(path + ".seed", "not a weighted_shift field");
    const Json& w = require_field(j, path, "weights");
    if (w.is_string()) {
      if (w.get<std::string>() != "one_over_n")
        fail(path + ".weights", "expected \"one_over_n\" or an array of numbers");
      return OperatorModel::shift_one_over_n(n);
    }
    if (!w.is_array() || w.empty())
      fail(path + ".weights", "expected \"one_over_n\" or a nonempty array of numbers");
    Vec weights(static_cast<int>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string ipath = path + ".weights[" + std::to_string(i) + "]";
      if (!w[i].is_number()) fail(ipath, "expected a number");
      weights(static_cast<int>(i)) = Scalar(w[i].get<double>(), 0.0);
    }
    if (n != static_cast<int>(w.size()) + 1)
      fail(path + ".dim", "must equal weights length + 1 for explicit weights");
    return OperatorModel::shift(std::move(weights));
  }
  if (type == "dense_triangular") {
    if (j.contains("weights")) fail(path + ".weights", "not a dense_triangular field");
    const Json& s = require_field(j, path, "seed");
    const long long seed = get_int(s, path + ".seed");
    if (seed < 0) fail(path + ".seed", "must be nonnegative");
    return OperatorModel::dense_seeded(n, static_cast<std::uint64_t>(seed));
  }
  if (type == "volterra") {
    if (j.contains("weights")) fail(path + ".weights", "not a volterra field");
    if (j.contains("seed")) fail(path + ".seed", "not a volterra field");
    return OperatorModel::volterra(n);
  }
  fail(path + ".type", "expected weighted_shift, dense_triangular, or volterra");
}

// --------------------------------------------------------- report primitives

Json annulus_json(const Annulus& a) {
  Json j;
  j["r_min"] = a.r_min;
  j["r_max"] = a.r_max;
  return j;
}

Json root_json(const Root& r) {
  Json j;
  j["re"] = r.z.real();
  j["im"] = r.z.imag();
  j["multiplicity"] = r.multiplicity;
  j["residual"] = r.residual;
  return j;
}

Json roots_json(const RootSet& rs) {
  Json arr = Json::array();
  for (const Root& r : rs.roots) arr.push_back(root_json(r));
  return arr;
}

Json eigenpair_json(const EigenPair& p) {
  Json j;
  j["lambda"] = complex_json(p.lambda);
  j["relative_residual"] = p.relative_residual;
  j["norm_bound_ok"] = p.norm_bound_ok;
  j["accepted"] = p.accepted;
  return j;
}

Json certificate_json(const HalfspaceCertificate& c) {
  Json j;
  j["basis_size"] = c.basis_size;
  j["independence_rank"] = c.independence_rank;
  j["invariance_residual"] = c.invariance_residual;
  j["corollary_residual"] = c.corollary_residual;
  j["c"] = complex_json(c.c);
  if (!c.basis_indices.empty()) j["basis_indices"] = c.basis_indices;
  return j;
}

// Run body(i) for i in [0, n) on up to `threads` workers; results must be
// written into pre-sized slots so the merged order is the grid order. The
// first exception wins and is rethrown after the join.
template <typename Body>
void parallel_indices(int n, int threads, Body&& body) {
  const int nw = std::clamp(threads, 1, std::max(1, n));
  if (nw <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mtx;
  std::vector<std::thread> pool;
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(error_mtx);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string csv_roots(const std::vector<Scalar>& alphas, const std::vector<RootSet>& sets) {
  std::string out = "alpha_re,alpha_im,root_re,root_im,multiplicity,residual\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (const Root& r : sets[i].roots) {
      out += fmt_double(alphas[i].real()) + "," + fmt_double(alphas[i].imag()) + "," +
             fmt_double(r.z.real()) + "," + fmt_double(r.z.imag()) + "," +
             std::to_string(r.multiplicity) + "," + fmt_double(r.residual) + "\n";
    }
  }
  return out;
}

std::string csv_trend(const std::vector<std::pair<int, double>>& table) {
  std::string out = "dim,spectral_radius\n";
  for (const auto& [dim, rad] : table)
    out += std::to_string(dim) + "," + fmt_double(rad) + "\n";
  return out;
}

}  // namespace

// ------------------------------------------------------------------- parsing

Json complex_json(Scalar z) {
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

Json classification_json(const Classification& c) {
  Json j;
  j["tag"] = to_string(c.tag);
  if (c.last_nonzero) j["last_nonzero"] = *c.last_nonzero;
  if (c.pole_order) j["pole_order"] = *c.pole_order;
  if (c.eig_count_bound) j["eig_count_bound"] = *c.eig_count_bound;
  j["structurally_exact"] = c.structurally_exact;
  j["horizon"] = c.horizon;
  return j;
}

std::string canonical_json(const Json& j) {
  std::string out;
  dump_canonical(j, out, 0);
  return out;
}

Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("$: ") + e.what());
  }
  expect_object(j, "$");
  check_keys(j, "$",
             {"operator", "perturbation", "alphas", "annulus", "tolerances", "oracle_dim"});

  OperatorModel op = parse_operator(require_field(j, "$", "operator"));
  const int dim = op.dim();

  const Json& jp = require_field(j, "$", "perturbation");
  expect_object(jp, "$.perturbation");
  check_keys(jp, "$.perturbation", {"e_star", "f"});
  const Json& je = require_field(jp, "$.perturbation", "e_star");
  Functional e_star = [&] {
    if (je.is_string()) {
      if (je.get<std::string>() != "one_over_n")
        fail("$.perturbation.e_star", "expected \"one_over_n\" or a sparse object");
      return Functional::one_over_n(dim);
    }
    if (je.is_object()) return Functional::from_coords(parse_sparse(je, "$.perturbation.e_star", dim));
    fail("$.perturbation.e_star", "expected \"one_over_n\" or a sparse object");
  }();
  const Json& jf = require_field(jp, "$.perturbation", "f");
  Vec f = [&]() -> Vec {
    if (jf.is_number_integer() || jf.is_number_unsigned()) {
      const long long k = get_int(jf, "$.perturbation.f");
      if (k < 1 || k > dim)
        fail("$.perturbation.f", "basis index must be in [1, " + std::to_string(dim) + "]");
      Vec v = Vec::Zero(dim);
      v(static_cast<int>(k - 1)) = Scalar(1, 0);
      return v;
    }
    if (jf.is_object()) return parse_sparse(jf, "$.perturbation.f", dim);
    fail("$.perturbation.f", "expected a 1-based basis index or a sparse object");
  }();

  const Json& ja = require_field(j, "$", "alphas");
  if (!ja.is_array() || ja.empty()) fail("$.alphas", "expected a nonempty array");
  std::vector<Scalar> alphas;
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string ipath = "$.alphas[" + std::to_string(i) + "]";
    const Scalar a = get_complex_object(ja[i], ipath);
    if (a == Scalar(0)) fail(ipath, "alpha must be nonzero");
    alphas.push_back(a);
  }

  Annulus annulus;
  bool defaulted = false;
  if (j.contains("annulus")) {
    const Json& jan = j["annulus"];
    expect_object(jan, "$.annulus");
    check_keys(jan, "$.annulus", {"r_min", "r_max"});
    const double lo = get_number(require_field(jan, "$.annulus", "r_min"), "$.annulus.r_min");
    const double hi = get_number(require_field(jan, "$.annulus", "r_max"), "$.annulus.r_max");
    if (!(0 < lo && lo < hi)) fail("$.annulus", "requires 0 < r_min < r_max");
    annulus = Annulus(lo, hi);
  } else {
    annulus = Annulus::default_for(e_star, f);
    defaulted = true;
  }

  Tolerances tol;
  if (j.contains("tolerances")) {
    const Json& jt = j["tolerances"];
    expect_object(jt, "$.tolerances");
    check_keys(jt, "$.tolerances", {"moment_horizon", "zero_threshold", "match_cutoff"});
    if (jt.contains("moment_horizon")) {
      const long long m = get_int(jt["moment_horizon"], "$.tolerances.moment_horizon");
      if (m < 0 || m > 100000) fail("$.tolerances.moment_horizon", "must be in [0, 100000]");
      tol.moment_horizon = static_cast<int>(m);
    }
    if (jt.contains("zero_threshold")) {
      const double t = get_number(jt["zero_threshold"], "$.tolerances.zero_threshold");
      if (!(t > 0)) fail("$.tolerances.zero_threshold", "must be positive");
      tol.zero_threshold = t;
    }
    if (jt.contains("match_cutoff")) {
      const double c = get_number(jt["match_cutoff"], "$.tolerances.match_cutoff");
      if (!(c >= 0)) fail("$.tolerances.match_cutoff", "must be nonnegative");
      tol.match_cutoff = c;
    }
  }

  int oracle_dim = dim;
  if (j.contains("oracle_dim")) {
    const long long od = get_int(j["oracle_dim"], "$.oracle_dim");
    if (od < 1 || od > 1024) fail("$.oracle_dim", "must be in [1, 1024]");
    oracle_dim = static_cast<int>(od);
  }

  return Scenario{std::move(op),
                  RankOnePerturbation{std::move(e_star), std::move(f)},
                  std::move(alphas),
                  annulus,
                  defaulted,
                  tol,
                  oracle_dim,
                  std::move(j)};
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Scalar parse_alpha(const std::string& text) {
  static const std::regex pat(
      R"(^\s*([+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)(?:([+-](?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)i)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pat))
    throw ValidationError("--alpha: expected RE or RE+IMi (e.g. \"1\", \"-0.5+2i\"), got \"" +
                          text + "\"");
  const double re = std::stod(m[1].str());
  const double im = m[2].matched ? std::stod(m[2].str()) : 0.0;
  return {re, im};
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) throw ValidationError("--dims: empty entry in list");
    tok = tok.substr(b, e - b + 1);
    try {
      std::size_t pos = 0;
      const int d = std::stoi(tok, &pos);
      if (pos != tok.size() || d < 1) throw std::out_of_range("");
      dims.push_back(d);
    } catch (const std::exception&) {
      throw ValidationError("--dims: expected positive integers, got \"" + tok + "\"");
    }
  }
  if (dims.empty()) throw ValidationError("--dims: empty list");
  return dims;
}

// ------------------------------------------------------------------ commands

CommandResult run_command(const std::string& command, const Scenario& sc,
                          const CommandOptions& opts) {
  if (opts.format != "json" && opts.format != "csv")
    throw ValidationError("--format: expected json or csv");

  std::vector<Scalar> alphas = sc.alphas;
  if (opts.alpha_override) {
    if (*opts.alpha_override == Scalar(0))
      throw ValidationError("--alpha: alpha must be nonzero");
    alphas = {*opts.alpha_override};
  }
  const Annulus annulus = opts.annulus_override.value_or(sc.annulus);
  const int n_alpha = static_cast<int>(alphas.size());

  const int M = sc.tol.moment_horizon.value_or(default_horizon(sc.op.dim()));
  const double tau = sc.tol.zero_threshold.value_or(1e-12);
  const MomentSequence ms = compute_moments(sc.op, sc.pert.e_star, sc.pert.f, M, tau);
  const Classification cls = classify(ms, sc.op, sc.pert.e_star, sc.pert.f);

  Json results;
  std::string csv;
  int exit_code = 0;

  if (command == "classify") {
    if (opts.format == "csv")
      throw ValidationError("--format csv is only defined for roots and trend");
    results["horizon"] = M;
    results["zero_threshold"] = tau;
    Json head = Json::array();
    const int nh = std::min<int>(static_cast<int>(ms.m.size()), 16);
    for (int i = 0; i < nh; ++i) head.push_back(complex_json(ms.m(i)));
    results["moments_head"] = head;
  } else if (command == "roots") {
    const GFunction G(sc.op, sc.pert.e_star, sc.pert.f);
    std::vector<RootSet> sets(n_alpha);
    parallel_indices(n_alpha, opts.threads,
                     [&](int i) { sets[i] = find_roots(G, alphas[i], annulus); });
    results["annulus"] = annulus_json(annulus);
    Json per = Json::array();
    for (int i = 0; i < n_alpha; ++i) {
      Json entry;
      entry["alpha"] = complex_json(alphas[i]);
      entry["total_winding"] = sets[i].total_winding;
      entry["roots"] = roots_json(sets[i]);
      per.push_back(std::move(entry));
    }
    results["per_alpha"] = per;
    if (opts.format == "csv") csv = csv_roots(alphas, sets);
  } else if (command == "sweep") {
    if (opts.format == "csv")
      throw ValidationError("--format csv is only defined for roots and trend");
    const AlphaScan scan = alpha_scan(sc.op, sc.pert, alphas, annulus, opts.threads);
    results["annulus"] = annulus_json(annulus);
    Json counts = Json::array();
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
      Json entry;
      entry["alpha"] = complex_json(scan.grid[i]);
      entry["count"] = scan.counts[i];
      counts.push_back(std::move(entry));
    }
    results["counts"] = counts;
    Json exc = Json::array();
    for (const Scalar& a : scan.exceptional_candidates) exc.push_back(complex_json(a));
    results["exceptional_candidates"] = exc;
    if (!scan.note.empty()) results["note"] = scan.note;
  } else if (command == "validate") {
    if (opts.format == "csv")
      throw ValidationError("--format csv is only defined for roots and trend");
    const double cutoff = sc.tol.match_cutoff.value_or(-1.0);
    std::vector<SpectralReport> reps;
    reps.reserve(n_alpha);
    for (int i = 0; i < n_alpha; ++i)  // placeholder slots; filled in parallel below
      reps.push_back(SpectralReport{});
    parallel_indices(n_alpha, opts.threads, [&](int i) {
      reps[i] = spectral_report(sc.op, sc.pert, alphas[i], annulus, sc.oracle_dim, cutoff);
    });
    results["annulus"] = annulus_json(annulus);
    Json per = Json::array();
    for (const SpectralReport& rep : reps) {
      Json entry;
      entry["alpha"] = complex_json(rep.alpha);
      entry["total_winding"] = rep.roots.total_winding;
      entry["roots"] = roots_json(rep.roots);
      Json pairs = Json::array();
      for (const EigenPair& p : rep.eigenpairs) pairs.push_back(eigenpair_json(p));
      entry["eigenpairs"] = pairs;
      entry["oracle_dim"] = rep.oracle_dim;
      entry["match_cutoff"] = rep.match_cutoff;
      const double r_hi = rep.annulus.r_max * (1.0 + 1e-9);
      Json window = Json::array();
      for (const Scalar& lam : rep.oracle_eigs)
        if (std::abs(lam) > rep.match_cutoff && std::abs(lam) <= r_hi)
          window.push_back(complex_json(lam));
      entry["oracle_in_window"] = window;
      Json matches = Json::array();
      for (const MatchedPair& mp : rep.matching) {
        Json mj;
        mj["root_index"] = mp.root_index;
        mj["oracle"] = complex_json(mp.oracle_eig);
        mj["distance"] = mp.distance;
        matches.push_back(std::move(mj));
      }
      entry["matching"] = matches;
      Json um = Json::array();
      for (const Scalar& lam : rep.unmatched_large_oracle) um.push_back(complex_json(lam));
      entry["unmatched_large_oracle"] = um;
      entry["unmatched_root_indices"] = rep.unmatched_root_indices;
      per.push_back(std::move(entry));
      if (!rep.unmatched_large_oracle.empty() || !rep.unmatched_root_indices.empty())
        exit_code = 2;
    }
    results["per_alpha"] = per;
  } else if (command == "certify") {
    if (opts.format == "csv")
      throw ValidationError("--format csv is only defined for roots and trend");
    results["annulus"] = annulus_json(annulus);
    Json per = Json::array();
    for (int i = 0; i < n_alpha; ++i) {
      Json entry;
      entry["alpha"] = complex_json(alphas[i]);
      if (opts.basis_tail) {
        const int j0 = *opts.basis_tail;
        const int dim = sc.op.dim();
        if (j0 < 1 || j0 > dim)
          throw ValidationError("--basis-tail: index must be in [1, " + std::to_string(dim) + "]");
        Mat B = Mat::Zero(dim, dim - j0 + 1);
        for (int c = 0; c + j0 - 1 < dim; ++c) B(c + j0 - 1, c) = Scalar(1, 0);
        const HalfspaceCertificate cert =
            halfspace_certificate_basis(sc.op, sc.pert, alphas[i], B);
        entry["basis_tail_start"] = j0;
        entry["certificate"] = certificate_json(cert);
      } else {
        if (opts.top < 1) throw ValidationError("--top: must be positive");
        const GFunction G(sc.op, sc.pert.e_star, sc.pert.f);
        const RootSet rs = find_roots(G, alphas[i], annulus);
        if (rs.roots.empty())
          throw ValidationError("certify: no roots in the annulus to certify (alpha = " +
                                fmt_double(alphas[i].real()) + ", " +
                                fmt_double(alphas[i].imag()) + ")");
        const int k = std::min<int>(opts.top, static_cast<int>(rs.roots.size()));
        std::vector<EigenPair> pairs;
        std::vector<int> subset;
        Json used = Json::array();
        for (int r = 0; r < k; ++r) {
          pairs.push_back(certify_eigenpair(sc.op, sc.pert, alphas[i], rs.roots[r].z));
          subset.push_back(r);
          used.push_back(complex_json(rs.roots[r].z));
        }
        const HalfspaceCertificate cert =
            halfspace_certificate(sc.op, sc.pert, alphas[i], pairs, subset);
        entry["roots_used"] = used;
        entry["certificate"] = certificate_json(cert);
      }
      per.push_back(std::move(entry));
    }
    results["per_alpha"] = per;
  } else if (command == "trend") {
    const Scalar alpha = alphas.front();
    std::vector<int> dims = opts.dims;
    if (dims.empty()) {
      for (const int d : {25, 50, 100, 200})
        if (d <= sc.op.dim()) dims.push_back(d);
      if (dims.empty()) dims.push_back(sc.op.dim());
    }
    const auto table = quasinilpotency_trend(sc.op, sc.pert, alpha, dims);
    results["alpha"] = complex_json(alpha);
    Json rows = Json::array();
    for (const auto& [dim, rad] : table) {
      Json row;
      row["dim"] = dim;
      row["spectral_radius"] = rad;
      rows.push_back(std::move(row));
    }
    results["table"] = rows;
    if (opts.format == "csv") csv = csv_trend(table);
  } else {
    throw ValidationError("unknown command: " + command);
  }

  if (opts.format == "csv") return CommandResult{csv, exit_code};

  Json report;
  report["schema_version"] = 1;
  report["command"] = command;
  report["scenario"] = sc.echo;
  report["classification"] = classification_json(cls);
  report["results"] = results;
  return CommandResult{canonical_json(report) + "\n", exit_code};
}

}  // namespace quasispec
