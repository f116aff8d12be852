#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "quasispec/rootfinder.hpp"

using namespace quasispec;

namespace {

Vec basis(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v(k - 1) = Scalar(1, 0);
  return v;
}

// Model with g(z) = 1/(2 z^3): 1/n shift, e* = e_3^*, f = e_1.
struct PoleModel {
  OperatorModel T = OperatorModel::shift_one_over_n(40);
  Functional e = Functional::from_coords([] {
    Vec c = Vec::Zero(40);
    c(2) = Scalar(1, 0);
    return c;
  }());
  Vec f = basis(40, 1);
  GFunction G{T, e, f};
};

// Model with g(z) = exp(1/z) - 1 up to truncation: 1/n shift + 1/n functional.
struct ExpModel {
  OperatorModel T = OperatorModel::shift_one_over_n(60);
  Functional e = Functional::one_over_n(60);
  Vec f = basis(60, 1);
  GFunction G{T, e, f};
};

void expect_root_near(const RootSet& rs, Scalar z, double tol) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rs.roots) best = std::min(best, std::abs(r.z - z));
  INFO("expected root near ", z.real(), (z.imag() < 0 ? " - " : " + "),
       std::abs(z.imag()), "i, closest claim at distance ", best);
  CHECK(best < tol);
}

}  // namespace

TEST_CASE("annulus construction and the default search window") {
  CHECK_THROWS_AS(Annulus(0.5, 0.5), ValidationError);
  CHECK_THROWS_AS(Annulus(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Annulus(-1.0, 2.0), ValidationError);
  CHECK_THROWS_AS(Annulus(2.0, 1.0), ValidationError);

  const Functional e = Functional::one_over_n(10);
  const Vec f = basis(10, 1);
  const Annulus a = Annulus::default_for(e, f);
  const double s = std::max(1.0, e.norm());
  CHECK(a.r_min == doctest::Approx(1e-3 * s));
  CHECK(a.r_max == doctest::Approx(4.0 * s));
}

TEST_CASE("winding counts the cube-root solutions of 1/(2 z^3) = 1/alpha") {
  PoleModel m;
  CHECK(winding_count(m.G, Scalar(2, 0), Annulus(0.5, 1.5)) == 3);   // |z| = 1
  CHECK(winding_count(m.G, Scalar(1, 0), Annulus(0.5, 1.5)) == 3);   // |z| = 0.7937
  CHECK(winding_count(m.G, Scalar(2, 0), Annulus(1.1, 2.0)) == 0);
  CHECK(winding_count(m.G, Scalar(2, 0), Annulus(0.2, 0.9)) == 0);
  CHECK_THROWS_AS((void)winding_count(m.G, Scalar(0, 0), Annulus(0.5, 1.5)),
                  ValidationError);
}

TEST_CASE("roots exactly on a contour circle engage the radius rescue") {
  PoleModel m;
  // For alpha = 2 all three roots sit at |z| = 1, exactly on the outer circle.
  CHECK(winding_count(m.G, Scalar(2, 0), Annulus(0.2, 1.0)) == 3);
}

TEST_CASE("find_roots recovers the cube roots of unity") {
  PoleModel m;
  const RootSet rs = find_roots(m.G, Scalar(2, 0), Annulus(0.2, 1.5));
  CHECK(rs.total_winding == 3);
  REQUIRE(rs.roots.size() == 3);
  const double tp = 2.0 * std::numbers::pi / 3.0;
  expect_root_near(rs, Scalar(1, 0), 1e-10);
  expect_root_near(rs, std::polar(1.0, tp), 1e-10);
  expect_root_near(rs, std::polar(1.0, -tp), 1e-10);
  for (const auto& r : rs.roots) {
    CHECK(r.multiplicity == 1);
    CHECK(r.residual < 1e-10);
  }
}

TEST_CASE("exponential model: all seven solutions in [0.05, 2] for alpha = 1") {
  ExpModel m;
  const RootSet rs = find_roots(m.G, Scalar(1, 0), Annulus(0.05, 2.0));
  CHECK(rs.total_winding == 7);
  REQUIRE(rs.roots.size() == 7);

  // Solutions of exp(1/z) = 2: z_k = 1 / (log 2 + 2 pi i k).
  const double l2 = std::log(2.0);
  CHECK(std::abs(rs.roots[0].z - Scalar(1.0 / l2, 0)) < 1e-9);  // unique largest
  for (int k = -3; k <= 3; ++k) {
    const Scalar zk = Scalar(1, 0) / Scalar(l2, 2.0 * std::numbers::pi * k);
    expect_root_near(rs, zk, k == 0 ? 1e-9 : 1e-6);
  }
  for (const auto& r : rs.roots) {
    CHECK(r.multiplicity == 1);
    CHECK(r.residual < 1e-8);
  }
}

TEST_CASE("exponential model: alpha = 2 drops the large real solution") {
  ExpModel m;
  const RootSet rs = find_roots(m.G, Scalar(2, 0), Annulus(0.05, 2.0));
  CHECK(rs.total_winding == 6);  // z_0 = 1/log(1.5) = 2.466 lies outside
  REQUIRE(rs.roots.size() == 6);
  const double l15 = std::log(1.5);
  for (int k = 1; k <= 3; ++k) {
    const Scalar d(l15, 2.0 * std::numbers::pi * k);
    expect_root_near(rs, Scalar(1, 0) / d, 1e-6);
    expect_root_near(rs, Scalar(1, 0) / std::conj(d), 1e-6);
  }
}

TEST_CASE("exponential model: alpha = -1 has no solutions away from zero") {
  // exp(1/z) - 1 = -1 has no solution at all; at truncation, however, the
  // equation becomes polynomial and its roots form a ring that shrinks toward
  // zero as the dimension grows. At dimension 60 the ring's outer edge sits
  // at |z| = 0.0565 (the 26 ring roots inside [0.05, 2] are confirmed by a
  // high-precision polynomial solve), so the clean statement lives above it.
  ExpModel m;
  CHECK(winding_count(m.G, Scalar(-1, 0), Annulus(0.1, 2.0)) == 0);
  const RootSet rs = find_roots(m.G, Scalar(-1, 0), Annulus(0.1, 2.0));
  CHECK(rs.total_winding == 0);
  CHECK(rs.roots.empty());

  CHECK(winding_count(m.G, Scalar(-1, 0), Annulus(0.05, 2.0)) == 26);
}

TEST_CASE("a double root is reported once with multiplicity two") {
  // e* = e_1^* - (8/27) e_3^* gives g = 1/z - (4/27)/z^3, and g = 1 is
  // z^3 - z^2 + 4/27 = 0 = (z - 2/3)^2 (z + 1/3).
  const int dim = 40;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  Vec c = Vec::Zero(dim);
  c(0) = Scalar(1, 0);
  c(2) = Scalar(-8.0 / 27.0, 0);
  const Functional e = Functional::from_coords(c);
  const Vec f = basis(dim, 1);
  const GFunction G{T, e, f};

  CHECK(winding_count(G, Scalar(1, 0), Annulus(0.1, 2.0)) == 3);

  const RootSet rs = find_roots(G, Scalar(1, 0), Annulus(0.1, 2.0));
  CHECK(rs.total_winding == 3);
  REQUIRE(rs.roots.size() == 2);
  CHECK(rs.roots[0].multiplicity == 2);  // |2/3| > |1/3|: double root first
  CHECK(std::abs(rs.roots[0].z - Scalar(2.0 / 3.0, 0)) < 1e-6);
  CHECK(rs.roots[0].residual < 1e-10);
  CHECK(rs.roots[1].multiplicity == 1);
  CHECK(std::abs(rs.roots[1].z - Scalar(-1.0 / 3.0, 0)) < 1e-9);
  CHECK(rs.roots[1].residual < 1e-10);
}

TEST_CASE("identically zero g yields an empty root set") {
  const int dim = 30;
  const OperatorModel T = OperatorModel::shift_one_over_n(dim);
  Vec c = Vec::Zero(dim);
  c(0) = Scalar(1, 0);  // e* = e_1^*, f = e_2: the orbit never returns to e_1
  const Functional e = Functional::from_coords(c);
  const Vec f = basis(dim, 2);
  const GFunction G{T, e, f};
  const RootSet rs = find_roots(G, Scalar(1, 0), Annulus(0.05, 2.0));
  CHECK(rs.total_winding == 0);
  CHECK(rs.roots.empty());
}

TEST_CASE("newton polish: convergence, escape, and domain exit") {
  PoleModel m;

  SUBCASE("a starting point already on the root returns immediately") {
    auto [z, res] = newton_polish(m.G, Scalar(2, 0), Scalar(1, 0));
    CHECK(std::abs(z - Scalar(1, 0)) < 1e-15);
    CHECK(res < 1e-11);
  }

  SUBCASE("a nearby start converges quadratically") {
    auto [z, res] = newton_polish(m.G, Scalar(2, 0), Scalar(1.1, 0.05));
    CHECK(std::abs(z - Scalar(1, 0)) < 1e-10);
    CHECK(res < 1e-11);
  }

  SUBCASE("a far start diverges and is reported as a stall") {
    CHECK_THROWS_AS((void)newton_polish(m.G, Scalar(2, 0), Scalar(3, 0)),
                    NewtonStall);
  }

  SUBCASE("an iterate falling into the inner disc is a domain exit") {
    // g = 1/z: Newton for 1/z = 1 maps z -> 2z - z^2; from 0.045 the first
    // step lands at 0.088 < r_min/2.
    const int dim = 5;
    const OperatorModel T = OperatorModel::shift_one_over_n(dim);
    Vec c = Vec::Zero(dim);
    c(0) = Scalar(1, 0);
    const Functional e = Functional::from_coords(c);
    const Vec f = basis(dim, 1);
    const GFunction G{T, e, f};
    CHECK_THROWS_AS((void)newton_polish(G, Scalar(1, 0), Scalar(0.045, 0), 0.2),
                    LeftDomain);
  }

  SUBCASE("zero alpha and zero start are rejected") {
    CHECK_THROWS_AS((void)newton_polish(m.G, Scalar(0, 0), Scalar(1, 0)),
                    ValidationError);
    CHECK_THROWS_AS((void)newton_polish(m.G, Scalar(2, 0), Scalar(0, 0)),
                    ValidationError);
  }
}
