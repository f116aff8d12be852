#pragma once

#include "quasispec/moments.hpp"
#include "quasispec/operators.hpp"
#include "quasispec/types.hpp"

namespace quasispec {

enum class GMethod { Series, Solve };

// One evaluation of g(z) = e*(R(z)f). tail_bound is meaningful for the
// Series route only (0 for Solve): it bounds the modulus of the dropped tail
// sum_{i>M} m_i / z^{i+1} under the fitted geometric envelope.
struct GEval {
  Scalar z;
  Scalar value;
  GMethod method;
  double tail_bound = 0.0;
};

// Partial Laurent sum sum_{i=0}^{M} m_i / z^{i+1} with a tail bound fitted on
// the last quarter of the envelope sequence a_i = ||e*|| ||T^i f|| / |z|^i:
// a least-squares geometric fit a_i ~ B q^i gives
//   tail <= B q^{M+1} / ((1 - q) |z|).
// If the orbit died inside the fit window the series is exactly finite and
// the tail bound is 0. If no ratio q < 1 fits, TailNotConvergent is thrown
// (|z| too small for this horizon).
GEval g_series(Scalar z, const MomentSequence& ms);

// Direct route: e*((zI - T)^{-1} f) via the structured solve. The authority
// inside the annulus; no horizon dependence.
GEval g_solve(Scalar z, const OperatorModel& T, const Functional& e_star, const Vec& f);

// g'(z) = -e*(R(z)^2 f), via two successive shifted solves.
Scalar g_prime(Scalar z, const OperatorModel& T, const Functional& e_star, const Vec& f);

}  // namespace quasispec
