#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "quasispec/numkernel.hpp"
#include "quasispec/types.hpp"

using namespace quasispec;

namespace {

// Smallest singular value of A - lambda I, the backward-error certificate for
// a reported eigenvalue.
double sigma_min_shifted(const Mat& A, Scalar lambda) {
  Mat S = A;
  S.diagonal().array() -= lambda;
  Eigen::BDCSVD<Mat> svd(S);
  return svd.singularValues().minCoeff();
}

}  // namespace

TEST_CASE("lower bidiagonal solve follows the forward recurrence") {
  // z = 2, subdiag (1, 1/2), rhs = e_1: x_1 = 1/2, x_2 = (0 + 1*(1/2))/2 = 1/4,
  // x_3 = (0 + (1/2)(1/4))/2 = 1/16.
  Vec sub(2);
  sub << Scalar(1, 0), Scalar(0.5, 0);
  Vec rhs = Vec::Zero(3);
  rhs(0) = Scalar(1, 0);
  const Vec x = solve_lower_bidiagonal(Scalar(2, 0), sub, rhs);
  CHECK(std::abs(x(0) - Scalar(0.5, 0)) == 0.0);
  CHECK(std::abs(x(1) - Scalar(0.25, 0)) == 0.0);
  CHECK(std::abs(x(2) - Scalar(0.0625, 0)) == 0.0);
}

TEST_CASE("lower bidiagonal solve meets the residual contract") {
  const int n = 40;
  Vec sub(n - 1), rhs(n);
  for (int i = 0; i < n - 1; ++i) sub(i) = Scalar(1.0 / (i + 1), 0.3 * std::sin(i + 1.0));
  for (int i = 0; i < n; ++i) rhs(i) = Scalar(std::cos(2.0 * i), std::sin(3.0 * i));
  const Scalar z(0.7, -0.4);
  const Vec x = solve_lower_bidiagonal(z, sub, rhs);

  Vec resid = z * x - rhs;           // (zI - T)x - rhs with T the subdiagonal part
  for (int i = 1; i < n; ++i) resid(i) -= sub(i - 1) * x(i - 1);
  const double eps = std::numeric_limits<double>::epsilon();
  CHECK(resid.norm() <= 10 * eps * (rhs.norm() + std::abs(z) * x.norm()));
}

TEST_CASE("lower bidiagonal solve rejects bad inputs") {
  Vec sub(2), rhs(3), short_rhs(2);
  sub.setZero();
  rhs.setZero();
  short_rhs.setZero();
  CHECK_THROWS_AS((void)solve_lower_bidiagonal(Scalar(0, 0), sub, rhs), ZeroShift);
  CHECK_THROWS_AS((void)solve_lower_bidiagonal(Scalar(1, 0), sub, short_rhs),
                  DimensionMismatch);
}

TEST_CASE("dense shifted solve agrees with a full LU solve") {
  const int n = 25;
  Mat L = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) L(i, j) = Scalar(std::sin(i * 3.1 + j), std::cos(i - 2.0 * j)) / 6.0;
  Vec rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = Scalar(1.0 / (i + 1), i * 0.1);
  const Scalar z(0.9, 0.2);

  const Vec x = solve_shifted_strictly_lower(z, L, rhs);
  const Mat A = z * Mat::Identity(n, n) - L;
  const Vec x_lu = A.partialPivLu().solve(rhs);
  CHECK((x - x_lu).norm() <= 1e-12 * std::max(1.0, x_lu.norm()));
  CHECK((A * x - rhs).norm() <= 1e-12 * (rhs.norm() + std::abs(z) * x.norm()));
  CHECK_THROWS_AS((void)solve_shifted_strictly_lower(Scalar(0, 0), L, rhs), ZeroShift);
}

TEST_CASE("dense eigenvalues: companion matrix of z^3 = 1") {
  Mat C = Mat::Zero(3, 3);
  C(0, 2) = Scalar(1, 0);
  C(1, 0) = Scalar(1, 0);
  C(2, 1) = Scalar(1, 0);
  const Vec eigs = dense_eigenvalues(C);
  REQUIRE(eigs.size() == 3);
  // All on the unit circle. The equal moduli differ by rounding, so the sort
  // order between them is not a contract: match as a set.
  const double tpi = 2.0 * 3.14159265358979323846;
  for (int k = -1; k <= 1; ++k) {
    const Scalar want = std::polar(1.0, k * tpi / 3);
    double best = 1e300;
    for (int i = 0; i < 3; ++i) best = std::min(best, std::abs(eigs(i) - want));
    CHECK(best < 1e-12);
  }
  for (int i = 0; i < 3; ++i)
    CHECK(sigma_min_shifted(C, eigs(i)) <= 1e-8 * std::max(1.0, C.norm()));
}

TEST_CASE("dense eigenvalues: strictly triangular inputs deflate to exact zeros") {
  Mat J = Mat::Zero(4, 4);  // nilpotent Jordan block
  J(1, 0) = J(2, 1) = J(3, 2) = Scalar(1, 0);
  const Vec ej = dense_eigenvalues(J);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ej(i)) == 0.0);

  Mat L = Mat::Zero(30, 30);
  for (int i = 1; i < 30; ++i)
    for (int j = 0; j < i; ++j) L(i, j) = Scalar(std::sin(7.0 * i + j), std::cos(i * j + 1.0));
  const Vec el = dense_eigenvalues(L);
  for (int i = 0; i < 30; ++i) CHECK(std::abs(el(i)) < 1e-10);
}

TEST_CASE("dense eigenvalues: ordering and similarity invariance") {
  Mat D = Mat::Zero(3, 3);
  D(0, 0) = Scalar(1, 0);
  D(1, 1) = Scalar(-2, 0);
  D(2, 2) = Scalar(0, 1);
  const Vec eigs = dense_eigenvalues(D);
  CHECK(std::abs(eigs(0) - Scalar(-2, 0)) < 1e-14);  // largest modulus first
  CHECK(std::abs(eigs(1) - Scalar(1, 0)) < 1e-14);   // then arg ascending
  CHECK(std::abs(eigs(2) - Scalar(0, 1)) < 1e-14);

  // Conjugation by an ill-scaled diagonal must not move the spectrum (the
  // balancing step absorbs the scaling).
  const int n = 12;
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = Scalar(std::sin(i + 1.0) * std::cos(j + 2.0), 0.1 * i - 0.05 * j);
  Mat P = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) P(i, i) = Scalar(std::pow(10.0, (i % 5) - 2), 0);
  const Mat B = P * A * P.inverse();
  Vec ea = dense_eigenvalues(A), eb = dense_eigenvalues(B);
  std::vector<Scalar> va(ea.data(), ea.data() + n), vb(eb.data(), eb.data() + n);
  double worst = 0;
  for (const Scalar& lam : va) {
    double best = 1e300;
    for (const Scalar& mu : vb) best = std::min(best, std::abs(lam - mu));
    worst = std::max(worst, best);
  }
  CHECK(worst < 1e-6 * std::max(1.0, A.norm()));
}

TEST_CASE("dense eigenvalues: guard rails") {
  Mat rect = Mat::Zero(2, 3);
  CHECK_THROWS_AS((void)dense_eigenvalues(rect), DimensionMismatch);
  Mat big = Mat::Zero(1025, 1025);
  CHECK_THROWS_AS((void)dense_eigenvalues(big), ValidationError);
}

TEST_CASE("numerical rank") {
  Vec u(4), v(4);
  u << Scalar(1, 0), Scalar(0, 2), Scalar(-1, 1), Scalar(0.5, 0);
  v << Scalar(2, 0), Scalar(1, -1), Scalar(0, 0.5), Scalar(3, 0);
  const Mat outer = u * v.transpose();
  CHECK(numerical_rank(outer) == 1);
  CHECK(numerical_rank(Mat::Zero(5, 5)) == 0);
  CHECK(numerical_rank(Mat::Identity(6, 6)) == 6);

  Mat two = Mat::Zero(4, 4);
  two += u * v.transpose();
  Vec w(4);
  w << Scalar(0, 1), Scalar(1, 0), Scalar(1, 1), Scalar(-1, 0);
  two += w * u.transpose();
  CHECK(numerical_rank(two) == 2);
}

TEST_CASE("independence rank") {
  Vec e1 = Vec::Zero(5), e2 = Vec::Zero(5);
  e1(0) = Scalar(1, 0);
  e2(1) = Scalar(1, 0);
  const Vec s = e1 + e2;
  CHECK(independence_rank({e1, e2}) == 2);
  CHECK(independence_rank({e1, e2, s}) == 2);
  CHECK(independence_rank({e1}) == 1);
}

TEST_CASE("spectral norm estimate") {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = Scalar(3, 0);
  D(1, 1) = Scalar(-4, 0);
  CHECK(spectral_norm(D) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(spectral_norm(Mat::Zero(3, 3)) == 0.0);

  Mat A(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = Scalar(std::sin(i + 2.0 * j), std::cos(3.0 * i - j));
  Eigen::BDCSVD<Mat> svd(A);
  CHECK(spectral_norm(A) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-6));
}
