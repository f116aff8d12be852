#include <cmath>

#include "doctest.h"
#include "quasispec/resolvent.hpp"

using namespace quasispec;

namespace {

Vec basis(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v(k - 1) = Scalar(1, 0);
  return v;
}

}  // namespace

TEST_CASE("solve route survives extreme cancellation near the negative axis") {
  // At z = -0.05 the pairing's terms reach about 2e6 while the value cancels
  // to order one, i.e. thirteen digits of cancellation; plain double summation
  // would be wrong in the sixth digit of g + 1, and even the rounding of the
  // stored 1/n weights would show in the ninth. References are a 60-digit
  // evaluation of the truncated series sum_{j=1}^{60} z^{-j}/j!.
  const int dim = 60;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  const Functional e = Functional::one_over_n(dim);
  const Vec f = basis(dim, 1);

  const Scalar ref_neg(-0.99996568267162962915, 0.0);
  CHECK(std::abs(g_solve(Scalar(-0.05, 0), T, e, f).value - ref_neg) < 1e-13);

  const Scalar ref_imag(-0.59190461317379436642, -0.91290406466836353268);
  CHECK(std::abs(g_solve(Scalar(0, 0.05), T, e, f).value - ref_imag) < 1e-13);
}

TEST_CASE("g via solve matches exp(1/z) - 1 for the 1/n shift model") {
  const int dim = 60;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  const Functional e = Functional::one_over_n(dim);
  const Vec f = basis(dim, 1);

  const GEval g2 = g_solve(Scalar(2, 0), T, e, f);
  CHECK(g2.method == GMethod::Solve);
  CHECK(g2.tail_bound == 0.0);
  CHECK(std::abs(g2.value - Scalar(std::exp(0.5) - 1.0, 0)) < 1e-12);

  const GEval g1 = g_solve(Scalar(1, 0), T, e, f);
  CHECK(std::abs(g1.value - Scalar(std::exp(1.0) - 1.0, 0)) < 1e-12);

  const Scalar zc(0.4, 0.3);
  const GEval gc = g_solve(zc, T, e, f);
  const Scalar exact = std::exp(Scalar(1, 0) / zc) - Scalar(1, 0);
  CHECK(std::abs(gc.value - exact) < 1e-10);
}

TEST_CASE("g via series agrees within its own tail bound") {
  const int dim = 60;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  const Functional e = Functional::one_over_n(dim);
  const Vec f = basis(dim, 1);
  const MomentSequence ms = compute_moments(T, e, f, 60);

  const GEval s2 = g_series(Scalar(2, 0), ms);
  CHECK(s2.method == GMethod::Series);
  CHECK(s2.tail_bound < 1e-12);
  CHECK(std::abs(s2.value - Scalar(std::exp(0.5) - 1.0, 0)) <= s2.tail_bound + 1e-12);

  const GEval s1 = g_series(Scalar(1, 0), ms);
  CHECK(std::abs(s1.value - Scalar(std::exp(1.0) - 1.0, 0)) <= s1.tail_bound + 1e-12);

  // Two-route agreement at a handful of points.
  for (const Scalar z : {Scalar(0.7, 0), Scalar(1.5, -0.8), Scalar(0.3, 0.4)}) {
    const GEval a = g_solve(z, T, e, f);
    const GEval b = g_series(z, ms);
    CHECK(std::abs(a.value - b.value) <=
          b.tail_bound + 1e-10 * std::max(1.0, std::abs(a.value)));
  }
}

TEST_CASE("derivative of g via two solves") {
  const int dim = 60;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  const Functional e = Functional::one_over_n(dim);
  const Vec f = basis(dim, 1);
  // d/dz (exp(1/z) - 1) = -exp(1/z)/z^2; at z = 1 that is -e.
  CHECK(std::abs(g_prime(Scalar(1, 0), T, e, f) - Scalar(-std::exp(1.0), 0)) < 1e-10);
}

TEST_CASE("pole model: g = 1/(2 z^3) exactly at truncation") {
  const int dim = 40;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  Vec c = Vec::Zero(dim);
  c(2) = Scalar(1, 0);  // e* = e_3^*
  const Functional e = Functional::from_coords(c);
  const Vec f = basis(dim, 1);

  CHECK(std::abs(g_solve(Scalar(1, 0), T, e, f).value - Scalar(0.5, 0)) < 1e-15);
  CHECK(std::abs(g_prime(Scalar(1, 0), T, e, f) - Scalar(-1.5, 0)) < 1e-14);
  const Scalar z(0.5, 0.5);
  const Scalar exact = Scalar(0.5, 0) / (z * z * z);
  CHECK(std::abs(g_solve(z, T, e, f).value - exact) < 1e-13 * std::abs(exact));
}

TEST_CASE("zero operator: g(z) = e*(f)/z") {
  Vec w(1);
  w << Scalar(0, 0);  // 2-dim shift with zero weight: T = 0
  const OperatorModel T = OperatorModel::shift(w);
  Vec c(2);
  c << Scalar(2, 1), Scalar(0, 0);
  const Functional e = Functional::from_coords(c);
  const Vec f = basis(2, 1);
  const Scalar z(0.3, -0.2);
  CHECK(std::abs(g_solve(z, T, e, f).value - Scalar(2, 1) / z) < 1e-14);
}

TEST_CASE("series tail refuses to extrapolate a growing envelope") {
  const int dim = 30;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  const Functional e = Functional::one_over_n(dim);
  const MomentSequence ms = compute_moments(T, e, basis(dim, 1), 20);
  // At |z| = 0.04 the envelope ratio (i+1)|z| stays below 1 across the fit
  // window, so no geometric tail with q < 1 exists.
  CHECK_THROWS_AS((void)g_series(Scalar(0.04, 0), ms), TailNotConvergent);
  CHECK_THROWS_AS((void)g_series(Scalar(0, 0), ms), ZeroShift);
}

TEST_CASE("series of a dead orbit is exactly finite with zero tail") {
  const int dim = 10;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  Vec c = Vec::Zero(dim);
  c(2) = Scalar(1, 0);
  const Functional e = Functional::from_coords(c);
  const MomentSequence ms = compute_moments(T, e, basis(dim, 1), 20);  // orbit dies at 10
  const GEval s = g_series(Scalar(0.9, 0), ms);
  CHECK(s.tail_bound == 0.0);
  const Scalar exact = Scalar(0.5, 0) / std::pow(Scalar(0.9, 0), 3);
  CHECK(std::abs(s.value - exact) < 1e-14);
}
