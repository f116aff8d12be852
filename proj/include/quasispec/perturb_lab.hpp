#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasispec/moments.hpp"
#include "quasispec/operators.hpp"
#include "quasispec/rootfinder.hpp"
#include "quasispec/types.hpp"

namespace quasispec {

// A candidate eigenpair of T + alpha*F built from a resolvent vector.
struct EigenPair {
  Scalar lambda;
  Vec y;                     // y = R(lambda) f, unnormalized so e*(y) = 1/alpha
  double relative_residual;  // ||(T + alpha F) y - lambda y|| / ||y||
  bool norm_bound_ok;        // ||y|| * |alpha| * ||e*|| >= 1 - 1e-10
  bool accepted;             // relative_residual < 1e-8
};

// Build y = R(lambda) f and certify it as an eigenvector of T + alpha*F.
// The residual is evaluated through the structured operator actions, not a
// materialized matrix. Residuals >= 1e-4 throw NotAnEigenvalue.
EigenPair certify_eigenpair(const OperatorModel& T, const RankOnePerturbation& F,
                            Scalar alpha, Scalar lambda);

// One root <-> dense-oracle eigenvalue association.
struct MatchedPair {
  int root_index;     // index into SpectralReport::roots.roots
  Scalar oracle_eig;
  double distance;
};

// Side-by-side picture of the resolvent root search and the dense eigenvalue
// oracle at a fixed alpha.
struct SpectralReport {
  Scalar alpha;
  Annulus annulus;
  RootSet roots;
  std::vector<EigenPair> eigenpairs;  // parallel to roots.roots
  std::vector<Scalar> oracle_eigs;    // all oracle eigenvalues, |.| descending
  std::vector<MatchedPair> matching;
  std::vector<Scalar> unmatched_large_oracle;  // in-window oracle eigs with no root
  std::vector<int> unmatched_root_indices;     // in-window roots short of oracle partners
  double match_cutoff;
  int oracle_dim;
};

// Find roots, certify each as an eigenpair, compute the dense oracle at
// oracle_dim, and greedily match oracle eigenvalues in the window
// (match_cutoff, r_max] to roots at tolerance 1e-6 * max(1, |lambda|),
// honoring root multiplicities. match_cutoff < 0 means "use annulus.r_min".
SpectralReport spectral_report(const OperatorModel& T, const RankOnePerturbation& F,
                               Scalar alpha, const Annulus& annulus, int oracle_dim,
                               double match_cutoff = -1.0);

// Root counts over a grid of alphas plus the moment classification, used to
// flag candidate exceptional values (persistent moments but zero roots).
struct AlphaScan {
  std::vector<Scalar> grid;
  std::vector<long> counts;                    // winding count per alpha
  std::vector<Scalar> exceptional_candidates;  // grid points with count == 0
  std::string note;                            // set when candidates exceed two
  Classification classification;
};

// Count roots of g(z) = 1/alpha in the annulus for every alpha in the grid.
// With an EventuallyZero classification the count may never exceed the
// eigenvalue bound; a violation throws InvariantViolation. threads > 1
// distributes the grid across worker threads; results stay in grid order.
AlphaScan alpha_scan(const OperatorModel& T, const RankOnePerturbation& F,
                     const std::vector<Scalar>& alphas, const Annulus& annulus,
                     int threads = 1);

// Certificate that span{basis} is invariant under T + alpha*F, with the
// rank-one identity P_perp T Q = c P_perp F Q (c = -alpha) checked through
// independent operator routes.
struct HalfspaceCertificate {
  std::vector<int> basis_indices;  // which eigenpairs were used (empty for raw bases)
  int basis_size;
  int independence_rank;
  double invariance_residual;  // ||A Q - Q (Q^H A Q)||
  double corollary_residual;   // ||P_perp T Q - c P_perp F Q||
  Scalar c;
};

// Certificate from eigenvectors: columns are pairs[subset[i]].y.
HalfspaceCertificate halfspace_certificate(const OperatorModel& T,
                                           const RankOnePerturbation& F, Scalar alpha,
                                           const std::vector<EigenPair>& pairs,
                                           const std::vector<int>& subset);

// Certificate from an explicit basis (columns of basis_cols).
HalfspaceCertificate halfspace_certificate_basis(const OperatorModel& T,
                                                 const RankOnePerturbation& F,
                                                 Scalar alpha, const Mat& basis_cols);

// Conjugation of T by I + N for a rank-one nilpotent N = u e*^T.
struct SimilarityPerturbation {
  Mat S;                   // (I - N) T (I + N)
  int rank_of_difference;  // numerical rank of T - S
};

// Requires e*(u) = 0 (so N^2 = 0); otherwise throws NotNilpotent. The
// difference T - S has rank at most two by construction; the returned rank is
// measured numerically as an independent check.
SimilarityPerturbation rank_two_similarity(const OperatorModel& T,
                                           const RankOnePerturbation& N);

// Spectral radius of the materialized truncation of T + alpha*F at each dim.
// dims must be strictly increasing.
std::vector<std::pair<int, double>> quasinilpotency_trend(const OperatorModel& T,
                                                          const RankOnePerturbation& F,
                                                          Scalar alpha,
                                                          const std::vector<int>& dims);

}  // namespace quasispec
