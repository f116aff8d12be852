#include "quasispec/moments.hpp"

#include <cmath>

namespace quasispec {
namespace {

// Support window [first, last] (0-based) of a coordinate vector, or nullopt
// for the zero vector.
std::optional<std::pair<int, int>> support(const Vec& v) {
  int first = -1, last = -1;
  for (int i = 0; i < v.size(); ++i) {
    if (v(i) != Scalar(0)) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return std::nullopt;
  return std::make_pair(first, last);
}

}  // namespace

int default_horizon(int dim) { return std::min(2 * dim, 200); }

MomentSequence compute_moments(const OperatorModel& T, const Functional& e_star,
                               const Vec& f, int M, double tau) {
  if (M < 1) throw ValidationError("compute_moments: horizon must be >= 1");
  if (tau <= 0) throw ValidationError("compute_moments: tau must be positive");
  if (f.size() != T.dim() || e_star.dim() != T.dim())
    throw DimensionMismatch("compute_moments: dims disagree");

  ScaledOrbit so = scaled_orbit(T, f, M);
  const double eno = e_star.norm();

  MomentSequence ms;
  ms.horizon = M;
  ms.zero_threshold = tau;
  ms.m.resize(M + 1);
  ms.unit_ratio.resize(M + 1);
  ms.log_envelope.resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    const Scalar eu = e_star(so.unit[i]);
    // Prefer the raw norm while it is representable: one rounding per step
    // instead of a log/exp round trip.
    const double nrm =
        so.raw_norm(i) > 0 ? so.raw_norm(i) : std::exp(so.log_norm(i));
    ms.m(i) = eu * nrm;
    ms.unit_ratio(i) = (eno > 0 && so.log_norm(i) > -std::numeric_limits<double>::infinity())
                           ? std::abs(eu) / eno
                           : 0.0;
    ms.log_envelope(i) = std::log(eno) + so.log_norm(i);
  }
  return ms;
}

Classification classify(const MomentSequence& ms) {
  Classification c;
  c.horizon = ms.horizon;
  int k = -1;
  for (int i = 0; i <= ms.horizon; ++i)
    if (ms.unit_ratio(i) > ms.zero_threshold) k = i;

  if (k < 0) {
    c.tag = SingularityTag::AllZero;
    c.eig_count_bound = 0;
    return c;
  }
  if (k > (3 * ms.horizon) / 4) {
    c.tag = SingularityTag::PersistentUpToHorizon;
    return c;
  }
  c.tag = SingularityTag::EventuallyZero;
  c.last_nonzero = k;
  c.pole_order = k + 1;
  c.eig_count_bound = k + 1;
  return c;
}

Classification classify(const MomentSequence& ms, const OperatorModel& T,
                        const Functional& e_star, const Vec& f) {
  Classification c = classify(ms);
  if (T.kind() != OperatorKind::WeightedShift) return c;

  // For a shift, T^i f is supported on indices >= min_support(f) + i, so
  // m_i = 0 exactly once that passes max_support(e*): every moment beyond
  // cutoff = max_support(e*) - min_support(f) vanishes by bookkeeping.
  const auto se = support(e_star.coords());
  const auto sf = support(f);
  if (!se || !sf) {
    // One leg is the zero vector: every moment is exactly zero.
    c.tag = SingularityTag::AllZero;
    c.last_nonzero.reset();
    c.pole_order.reset();
    c.eig_count_bound = 0;
    c.structurally_exact = true;
    return c;
  }
  const int cutoff = se->second - sf->first;
  if (cutoff > ms.horizon) return c;  // certificate does not reach the window

  if (cutoff < 0 || c.tag == SingularityTag::AllZero) {
    c.tag = SingularityTag::AllZero;
    c.last_nonzero.reset();
    c.pole_order.reset();
    c.eig_count_bound = 0;
    c.structurally_exact = true;
    return c;
  }
  // Data gives the last nonzero index (<= cutoff necessarily); the structure
  // certifies zeros beyond it, which beats the top-quarter heuristic.
  int k = -1;
  for (int i = 0; i <= ms.horizon; ++i)
    if (ms.unit_ratio(i) > ms.zero_threshold) k = i;
  c.tag = SingularityTag::EventuallyZero;
  c.last_nonzero = k;
  c.pole_order = k + 1;
  c.eig_count_bound = k + 1;
  c.structurally_exact = true;
  return c;
}

std::optional<int> eig_count_bound(const Classification& c) { return c.eig_count_bound; }

const char* to_string(SingularityTag tag) {
  switch (tag) {
    case SingularityTag::AllZero: return "all_zero";
    case SingularityTag::EventuallyZero: return "eventually_zero";
    case SingularityTag::PersistentUpToHorizon: return "persistent_up_to_horizon";
  }
  return "?";
}

}  // namespace quasispec
