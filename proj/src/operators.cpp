#include "quasispec/operators.hpp"

#include <cmath>
#include <limits>

#include "quasispec/numkernel.hpp"
#include "quasispec/rng.hpp"

namespace quasispec {
namespace {

void check_dim_positive(int dim) {
  if (dim <= 0) throw ValidationError("operator dim must be positive");
}

Mat seeded_entries(int dim, std::uint64_t seed) {
  Mat E = Mat::Zero(dim, dim);
  DetRng rng(seed);
  const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(dim)));
  for (int i = 1; i < dim; ++i)
    for (int j = 0; j < i; ++j) E(i, j) = scale * rng.csym();
  return E;
}

}  // namespace

OperatorModel OperatorModel::shift_one_over_n(int dim) {
  check_dim_positive(dim);
  OperatorModel m;
  m.kind_ = OperatorKind::WeightedShift;
  m.dim_ = dim;
  m.one_over_n_ = true;
  m.weights_.resize(dim - 1);
  for (int n = 1; n < dim; ++n) m.weights_(n - 1) = Scalar(1.0 / n, 0.0);
  return m;
}

OperatorModel OperatorModel::shift(Vec weights) {
  OperatorModel m;
  m.kind_ = OperatorKind::WeightedShift;
  m.dim_ = static_cast<int>(weights.size()) + 1;
  m.weights_ = std::move(weights);
  return m;
}

OperatorModel OperatorModel::dense_seeded(int dim, std::uint64_t seed) {
  check_dim_positive(dim);
  OperatorModel m;
  m.kind_ = OperatorKind::DenseStrictlyLower;
  m.dim_ = dim;
  m.seed_ = seed;
  m.entries_ = seeded_entries(dim, seed);
  return m;
}

OperatorModel OperatorModel::dense(Mat entries) {
  if (entries.rows() != entries.cols())
    throw DimensionMismatch("dense operator entries must be square");
  OperatorModel m;
  m.kind_ = OperatorKind::DenseStrictlyLower;
  m.dim_ = static_cast<int>(entries.rows());
  m.entries_ = entries.triangularView<Eigen::StrictlyLower>();
  return m;
}

OperatorModel OperatorModel::volterra(int dim) {
  check_dim_positive(dim);
  OperatorModel m;
  m.kind_ = OperatorKind::VolterraQuadrature;
  m.dim_ = dim;
  return m;
}

const Vec& OperatorModel::weights() const {
  if (kind_ != OperatorKind::WeightedShift)
    throw ValidationError("weights() is defined for shift models only");
  return weights_;
}

OperatorModel OperatorModel::truncated(int N) const {
  check_dim_positive(N);
  switch (kind_) {
    case OperatorKind::WeightedShift:
      if (one_over_n_) return shift_one_over_n(N);
      if (N > dim_) throw ValidationError("cannot enlarge explicit shift weights");
      return shift(weights_.head(N - 1));
    case OperatorKind::DenseStrictlyLower:
      if (seed_) return dense_seeded(N, *seed_);
      if (N > dim_) throw ValidationError("cannot enlarge explicit dense entries");
      return dense(entries_.topLeftCorner(N, N));
    case OperatorKind::VolterraQuadrature:
      return volterra(N);
  }
  throw Error("unreachable");
}

Functional Functional::one_over_n(int dim) {
  check_dim_positive(dim);
  Functional e;
  e.one_over_n_ = true;
  e.coords_.resize(dim);
  for (int j = 1; j <= dim; ++j) e.coords_(j - 1) = Scalar(1.0 / j, 0.0);
  return e;
}

Functional Functional::from_coords(Vec coords) {
  Functional e;
  e.coords_ = std::move(coords);
  return e;
}

Scalar Functional::operator()(const Vec& x) const {
  if (x.size() != coords_.size())
    throw DimensionMismatch("functional applied to vector of wrong dim");
  // Neumaier-compensated summation, component-wise. Resolvent orbits can have
  // intermediate terms many orders of magnitude larger than the pairing they
  // cancel down to; a plain sum's rounding would then drown the value.
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  const Eigen::Index n = coords_.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar t = coords_(k) * x(k);
    double u = sr + t.real();
    cr += (std::abs(sr) >= std::abs(t.real())) ? (sr - u) + t.real()
                                               : (t.real() - u) + sr;
    sr = u;
    u = si + t.imag();
    ci += (std::abs(si) >= std::abs(t.imag())) ? (si - u) + t.imag()
                                               : (t.imag() - u) + si;
    si = u;
  }
  return Scalar(sr + cr, si + ci);
}

Functional Functional::truncated(int N) const {
  if (one_over_n_) return one_over_n(N);
  if (N >= dim()) {
    if (N == dim()) return *this;
    throw ValidationError("cannot enlarge explicit functional coords");
  }
  if (coords_.tail(dim() - N).cwiseAbs().maxCoeff() != 0.0)
    throw ValidationError("functional support exceeds requested truncation");
  return from_coords(coords_.head(N));
}

Vec apply(const OperatorModel& T, const Vec& x) {
  if (x.size() != T.dim_) throw DimensionMismatch("apply: vector dim mismatch");
  const int n = T.dim_;
  Vec y = Vec::Zero(n);
  switch (T.kind_) {
    case OperatorKind::WeightedShift:
      for (int j = 0; j + 1 < n; ++j) y(j + 1) = T.weights_(j) * x(j);
      return y;
    case OperatorKind::DenseStrictlyLower:
      return T.entries_ * x;
    case OperatorKind::VolterraQuadrature: {
      Scalar acc(0, 0);
      const double h = 1.0 / n;
      for (int i = 1; i < n; ++i) {
        acc += x(i - 1);
        y(i) = h * acc;
      }
      return y;
    }
  }
  throw Error("unreachable");
}

std::vector<Vec> orbit(const OperatorModel& T, const Vec& f, int M) {
  if (M < 0) throw ValidationError("orbit: M must be >= 0");
  std::vector<Vec> out;
  out.reserve(M + 1);
  out.push_back(f);
  for (int i = 0; i < M; ++i) out.push_back(quasispec::apply(T, out.back()));
  return out;
}

ScaledOrbit scaled_orbit(const OperatorModel& T, const Vec& f, int M) {
  if (M < 0) throw ValidationError("scaled_orbit: M must be >= 0");
  ScaledOrbit so;
  so.unit.reserve(M + 1);
  so.log_norm.resize(M + 1);
  so.raw_norm.resize(M + 1);
  const double ninf = -std::numeric_limits<double>::infinity();

  double nf = f.norm();
  if (nf == 0.0) {
    for (int i = 0; i <= M; ++i) {
      so.unit.push_back(Vec::Zero(f.size()));
      so.log_norm(i) = ninf;
      so.raw_norm(i) = 0.0;
    }
    return so;
  }
  so.unit.push_back(f / nf);
  so.log_norm(0) = std::log(nf);
  so.raw_norm(0) = nf;
  for (int i = 1; i <= M; ++i) {
    Vec w = quasispec::apply(T, so.unit.back());
    const double nw = w.norm();
    if (nw == 0.0) {
      so.unit.push_back(Vec::Zero(f.size()));
      so.log_norm(i) = ninf;
      so.raw_norm(i) = 0.0;
      for (int k = i + 1; k <= M; ++k) {
        so.unit.push_back(so.unit.back());
        so.log_norm(k) = ninf;
        so.raw_norm(k) = 0.0;
      }
      return so;
    }
    so.unit.push_back(w / nw);
    so.log_norm(i) = so.log_norm(i - 1) + std::log(nw);
    const double raw = so.raw_norm(i - 1) * nw;
    so.raw_norm(i) = (raw > 1e-300) ? raw : 0.0;
  }
  return so;
}

Vec resolvent_apply(const OperatorModel& T, Scalar z, const Vec& v) {
  if (v.size() != T.dim_) throw DimensionMismatch("resolvent_apply: vector dim mismatch");
  if (z == Scalar(0)) throw ZeroShift("resolvent_apply: z = 0 is in the spectrum");
  switch (T.kind_) {
    case OperatorKind::WeightedShift:
      return solve_lower_bidiagonal(z, T.weights_, v);
    case OperatorKind::DenseStrictlyLower:
      return solve_shifted_strictly_lower(z, T.entries_, v);
    case OperatorKind::VolterraQuadrature: {
      // (zI - T)x = v with T the cumulative-sum quadrature: running sum keeps
      // the solve O(dim).
      const int n = T.dim_;
      const double h = 1.0 / n;
      Vec x(n);
      Scalar acc(0, 0);
      for (int i = 0; i < n; ++i) {
        x(i) = (v(i) + h * acc) / z;
        acc += x(i);
      }
      return x;
    }
  }
  throw Error("unreachable");
}

Mat materialize_T(const OperatorModel& T) {
  const int n = T.dim_;
  switch (T.kind_) {
    case OperatorKind::WeightedShift: {
      Mat A = Mat::Zero(n, n);
      for (int j = 0; j + 1 < n; ++j) A(j + 1, j) = T.weights_(j);
      return A;
    }
    case OperatorKind::DenseStrictlyLower:
      return T.entries_;
    case OperatorKind::VolterraQuadrature: {
      Mat A = Mat::Zero(n, n);
      const double h = 1.0 / n;
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) A(i, j) = Scalar(h, 0.0);
      return A;
    }
  }
  throw Error("unreachable");
}

Mat materialize(const OperatorModel& T, const RankOnePerturbation& F, Scalar alpha) {
  if (F.f.size() != T.dim() || F.e_star.dim() != T.dim())
    throw DimensionMismatch("materialize: perturbation dims disagree with operator");
  Mat A = materialize_T(T);
  A.noalias() += alpha * (F.f * F.e_star.coords().transpose());
  return A;
}

Vec truncate_vector(const Vec& v, int N) {
  if (N == v.size()) return v;
  if (N > v.size()) throw ValidationError("cannot enlarge a vector by truncation");
  if (v.tail(v.size() - N).cwiseAbs().maxCoeff() != 0.0)
    throw ValidationError("vector support exceeds requested truncation");
  return v.head(N);
}

RankOnePerturbation truncated(const RankOnePerturbation& F, int N) {
  return {F.e_star.truncated(N), truncate_vector(F.f, N)};
}

}  // namespace quasispec
