#pragma once

#include <optional>

#include "quasispec/operators.hpp"
#include "quasispec/types.hpp"

namespace quasispec {

// Moments m_i = e*(T^i f), i = 0..horizon, are the Laurent coefficients of
// g(z) = e*(R(z)f) about 0 (coefficient of z^{-(i+1)}).
//
// Alongside the raw values the sequence carries scale-free diagnostics from
// the normalized orbit:
//   unit_ratio_i   = |e*(u_i)| / ||e*||  with u_i the unit orbit vector,
//   log_envelope_i = log(||e*|| ||T^i f||)  (-inf once the orbit dies).
// unit_ratio decides "is m_i zero" without being fooled by factorial decay of
// the orbit norms; log_envelope feeds the series tail bound.
struct MomentSequence {
  Vec m;
  int horizon = 0;            // M; m has M+1 entries
  double zero_threshold = 0;  // tau
  RealVec unit_ratio;
  RealVec log_envelope;
};

// Default horizon: min(2 dim, 200).
int default_horizon(int dim);

MomentSequence compute_moments(const OperatorModel& T, const Functional& e_star,
                               const Vec& f, int M, double tau = 1e-12);

enum class SingularityTag { AllZero, EventuallyZero, PersistentUpToHorizon };

// Trichotomy of the singularity of g at 0, as far as a finite moment window
// can tell. A moment counts as nonzero when its unit_ratio exceeds tau (i.e.
// e* is not numerically orthogonal to the orbit direction), so the test is
// relative to each moment's own envelope rather than to max |m_i| — a
// factorially decaying sequence of genuinely nonzero moments stays nonzero.
//
//   AllZero                 every moment is zero; no eigenvalues anywhere.
//   EventuallyZero(k)       last nonzero moment is m_k: g has a pole of order
//                           k+1, and g(z) = 1/alpha has at most k+1 solutions.
//   PersistentUpToHorizon   nonzero moments reach into the top quarter of the
//                           window; the data cannot rule out an essential
//                           singularity.
//
// structurally_exact is set when the model is a weighted shift and e* has
// finite support ending early enough that every moment beyond the window's
// last nonzero is zero by support bookkeeping alone (the orbit of f has
// moved past the support of e*). That turns "zero up to the horizon" into
// "zero, period", and overrides the top-quarter heuristic.
struct Classification {
  SingularityTag tag = SingularityTag::AllZero;
  std::optional<int> last_nonzero;     // k, EventuallyZero only
  std::optional<int> pole_order;      // k + 1, EventuallyZero only
  std::optional<int> eig_count_bound; // 0 / k+1 / absent (Persistent)
  bool structurally_exact = false;
  int horizon = 0;
};

// Data-only classification.
Classification classify(const MomentSequence& ms);

// Classification with the structural exactness certificate attempted.
Classification classify(const MomentSequence& ms, const OperatorModel& T,
                        const Functional& e_star, const Vec& f);

std::optional<int> eig_count_bound(const Classification& c);

const char* to_string(SingularityTag tag);

}  // namespace quasispec
