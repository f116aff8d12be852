#include "quasispec/perturb_lab.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "quasispec/numkernel.hpp"

namespace quasispec {

EigenPair certify_eigenpair(const OperatorModel& T, const RankOnePerturbation& F,
                            Scalar alpha, Scalar lambda) {
  if (alpha == Scalar(0))
    throw ValidationError("certify_eigenpair: alpha must be nonzero");
  if (F.f.size() != T.dim() || F.e_star.dim() != T.dim())
    throw DimensionMismatch("certify_eigenpair: perturbation dimension mismatch");

  Vec y = resolvent_apply(T, lambda, F.f);
  const double ny = y.norm();
  if (ny == 0) throw NotAnEigenvalue("certify_eigenpair: resolvent vector vanished");

  const Vec r = quasispec::apply(T, y) + (alpha * F.e_star(y)) * F.f - lambda * y;
  const double rel = r.norm() / ny;
  if (rel >= 1e-4) {
    std::ostringstream os;
    os << "certify_eigenpair: relative residual " << rel << " at lambda = (" << lambda.real()
       << ", " << lambda.imag() << ") is not an eigenvalue";
    throw NotAnEigenvalue(os.str());
  }
  EigenPair p;
  p.lambda = lambda;
  p.relative_residual = rel;
  p.norm_bound_ok = ny * std::abs(alpha) * F.e_star.norm() >= 1.0 - 1e-10;
  p.accepted = rel < 1e-8;
  p.y = std::move(y);
  return p;
}

SpectralReport spectral_report(const OperatorModel& T, const RankOnePerturbation& F,
                               Scalar alpha, const Annulus& annulus, int oracle_dim,
                               double match_cutoff) {
  if (alpha == Scalar(0)) throw ValidationError("spectral_report: alpha must be nonzero");
  if (oracle_dim < 1) throw ValidationError("spectral_report: oracle_dim must be positive");

  SpectralReport rep;
  rep.alpha = alpha;
  rep.annulus = annulus;
  rep.oracle_dim = oracle_dim;
  rep.match_cutoff = match_cutoff < 0 ? annulus.r_min : match_cutoff;

  const GFunction G(T, F.e_star, F.f);
  rep.roots = find_roots(G, alpha, annulus);
  for (const Root& r : rep.roots.roots)
    rep.eigenpairs.push_back(certify_eigenpair(T, F, alpha, r.z));

  const OperatorModel T_o = T.truncated(oracle_dim);
  const RankOnePerturbation F_o = truncated(F, oracle_dim);
  const Vec eigs = dense_eigenvalues(materialize(T_o, F_o, alpha));
  rep.oracle_eigs.assign(eigs.data(), eigs.data() + eigs.size());

  // Greedy nearest matching, each root carrying capacity = multiplicity, over
  // oracle eigenvalues in (match_cutoff, r_max]; the window keeps truncation
  // artifacts near 0 and eigenvalues beyond the search region out of scope.
  std::vector<int> capacity;
  for (const Root& r : rep.roots.roots) capacity.push_back(r.multiplicity);
  const double r_hi = annulus.r_max * (1.0 + 1e-9);
  for (const Scalar& lam : rep.oracle_eigs) {
    const double al = std::abs(lam);
    if (al <= rep.match_cutoff || al > r_hi) continue;
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < capacity.size(); ++j) {
      if (capacity[j] <= 0) continue;
      const double d = std::abs(lam - rep.roots.roots[j].z);
      if (d < bd) { bd = d; best = static_cast<int>(j); }
    }
    if (best >= 0 && bd <= 1e-6 * std::max(1.0, al)) {
      rep.matching.push_back({best, lam, bd});
      --capacity[best];
    } else {
      rep.unmatched_large_oracle.push_back(lam);
    }
  }
  for (std::size_t j = 0; j < capacity.size(); ++j)
    if (capacity[j] > 0 && std::abs(rep.roots.roots[j].z) > rep.match_cutoff)
      rep.unmatched_root_indices.push_back(static_cast<int>(j));
  return rep;
}

AlphaScan alpha_scan(const OperatorModel& T, const RankOnePerturbation& F,
                     const std::vector<Scalar>& alphas, const Annulus& annulus,
                     int threads) {
  if (alphas.empty()) throw ValidationError("alpha_scan: empty alpha grid");
  for (const Scalar& a : alphas)
    if (a == Scalar(0)) throw ValidationError("alpha_scan: alpha must be nonzero");

  AlphaScan scan;
  scan.grid = alphas;
  scan.counts.assign(alphas.size(), 0);
  const MomentSequence ms = compute_moments(T, F.e_star, F.f, default_horizon(T.dim()));
  scan.classification = classify(ms, T, F.e_star, F.f);

  const GFunction G(T, F.e_star, F.f);
  const int n = static_cast<int>(alphas.size());
  const int nthreads = std::clamp(threads, 1, n);
  if (nthreads <= 1) {
    for (int i = 0; i < n; ++i) scan.counts[i] = winding_count(G, alphas[i], annulus);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mtx;
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            scan.counts[i] = winding_count(G, alphas[i], annulus);
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

  if (auto bound = eig_count_bound(scan.classification)) {
    for (int i = 0; i < n; ++i) {
      if (scan.counts[i] > *bound) {
        std::ostringstream os;
        os << "alpha_scan: " << scan.counts[i] << " roots found but the moment sequence"
           << " bounds the eigenvalue count by " << *bound;
        throw InvariantViolation(os.str());
      }
    }
  }
  if (scan.classification.tag == SingularityTag::PersistentUpToHorizon) {
    for (int i = 0; i < n; ++i)
      if (scan.counts[i] == 0) scan.exceptional_candidates.push_back(alphas[i]);
    if (scan.exceptional_candidates.size() > 2)
      scan.note =
          "more than two grid points produced zero roots; enlarge the annulus or refine "
          "the grid before reading these as exceptional values";
  }
  return scan;
}

namespace {

HalfspaceCertificate certificate_from_columns(const OperatorModel& T,
                                              const RankOnePerturbation& F, Scalar alpha,
                                              const Mat& B, std::vector<int> indices) {
  const int n = T.dim();
  const int k = static_cast<int>(B.cols());
  if (k < 1) throw ValidationError("halfspace_certificate: empty basis");
  if (B.rows() != n) throw DimensionMismatch("halfspace_certificate: basis dimension mismatch");

  std::vector<Vec> cols;
  for (int j = 0; j < k; ++j) cols.push_back(B.col(j));
  const int rank = independence_rank(cols);
  if (rank != k) {
    std::ostringstream os;
    os << "halfspace_certificate: " << k << " basis vectors have numerical rank " << rank;
    throw DependentBasis(os.str());
  }

  Eigen::HouseholderQR<Mat> qr(B);
  const Mat Q = qr.householderQ() * Mat::Identity(n, k);

  const Mat A = materialize(T, F, alpha);
  const Mat AQ = A * Q;
  const Mat compressed = Q.adjoint() * AQ;
  const double invariance = spectral_norm(AQ - Q * compressed);

  // The corollary residual goes through the structured operator actions, an
  // independent route from the materialized matrix above.
  Mat TQ(n, k), FQ(n, k);
  for (int j = 0; j < k; ++j) {
    const Vec q = Q.col(j);
    TQ.col(j) = quasispec::apply(T, q);
    FQ.col(j) = F.e_star(q) * F.f;
  }
  const Mat PTQ = TQ - Q * (Q.adjoint() * TQ).eval();
  const Mat PFQ = FQ - Q * (Q.adjoint() * FQ).eval();
  const Scalar c = -alpha;
  const double corollary = spectral_norm(PTQ - c * PFQ);

  HalfspaceCertificate cert;
  cert.basis_indices = std::move(indices);
  cert.basis_size = k;
  cert.independence_rank = rank;
  cert.invariance_residual = invariance;
  cert.corollary_residual = corollary;
  cert.c = c;
  return cert;
}

}  // namespace

HalfspaceCertificate halfspace_certificate(const OperatorModel& T,
                                           const RankOnePerturbation& F, Scalar alpha,
                                           const std::vector<EigenPair>& pairs,
                                           const std::vector<int>& subset) {
  if (subset.empty()) throw ValidationError("halfspace_certificate: empty eigenpair subset");
  Mat B(T.dim(), static_cast<int>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const int i = subset[j];
    if (i < 0 || i >= static_cast<int>(pairs.size()))
      throw ValidationError("halfspace_certificate: eigenpair index out of range");
    if (pairs[i].y.size() != T.dim())
      throw DimensionMismatch("halfspace_certificate: eigenvector dimension mismatch");
    B.col(static_cast<int>(j)) = pairs[i].y;
  }
  return certificate_from_columns(T, F, alpha, B, subset);
}

HalfspaceCertificate halfspace_certificate_basis(const OperatorModel& T,
                                                 const RankOnePerturbation& F,
                                                 Scalar alpha, const Mat& basis_cols) {
  return certificate_from_columns(T, F, alpha, basis_cols, {});
}

SimilarityPerturbation rank_two_similarity(const OperatorModel& T,
                                           const RankOnePerturbation& N) {
  const int n = T.dim();
  if (N.f.size() != n || N.e_star.dim() != n)
    throw DimensionMismatch("rank_two_similarity: perturbation dimension mismatch");
  const double scale = N.e_star.norm() * N.f.norm();
  if (std::abs(N.e_star(N.f)) > 1e-14 * scale)
    throw NotNilpotent("rank_two_similarity: e*(u) != 0, so u e*^T is not nilpotent");

  const Mat M = materialize_T(T);
  const Mat Nm = N.f * N.e_star.coords().transpose();
  const Mat I = Mat::Identity(n, n);
  SimilarityPerturbation sp;
  sp.S = (I - Nm) * M * (I + Nm);
  sp.rank_of_difference = numerical_rank(M - sp.S);
  return sp;
}

std::vector<std::pair<int, double>> quasinilpotency_trend(const OperatorModel& T,
                                                          const RankOnePerturbation& F,
                                                          Scalar alpha,
                                                          const std::vector<int>& dims) {
  if (dims.empty()) throw ValidationError("quasinilpotency_trend: empty dimension list");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1) throw ValidationError("quasinilpotency_trend: dimensions must be positive");
    if (i > 0 && dims[i] <= dims[i - 1])
      throw ValidationError("quasinilpotency_trend: dimensions must be strictly increasing");
  }
  std::vector<std::pair<int, double>> out;
  for (const int n : dims) {
    const OperatorModel T_n = T.truncated(n);
    const RankOnePerturbation F_n = truncated(F, n);
    const Vec eigs = dense_eigenvalues(materialize(T_n, F_n, alpha));
    out.emplace_back(n, eigs.size() > 0 ? std::abs(eigs(0)) : 0.0);
  }
  return out;
}

}  // namespace quasispec
