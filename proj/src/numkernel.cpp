#include "quasispec/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "quasispec/rng.hpp"

namespace quasispec {
namespace {

// Parlett-Reinsch balancing. First a permutation phase isolates eigenvalues
// that can be read off the diagonal (rows/columns with no off-diagonal mass
// inside the active window); then radix-2 diagonal scaling equalizes row and
// column norms without rounding error. Returns the active window [lo, hi].
// A strictly triangular matrix deflates completely, so its eigenvalues come
// out exactly zero instead of as a QR-iteration noise cloud.
std::pair<int, int> balance(Mat& A) {
  const int n = static_cast<int>(A.rows());
  int lo = 0, hi = n - 1;

  auto off_row = [&](int i) {
    double s = 0;
    for (int j = lo; j <= hi; ++j)
      if (j != i) s += std::abs(A(i, j));
    return s;
  };
  auto off_col = [&](int j) {
    double s = 0;
    for (int i = lo; i <= hi; ++i)
      if (i != j) s += std::abs(A(i, j));
    return s;
  };
  auto swap_rc = [&](int a, int b) {
    if (a == b) return;
    A.row(a).swap(A.row(b));
    A.col(a).swap(A.col(b));
  };

  // Rows with zero off-diagonal part move to the bottom of the window.
  for (bool changed = true; changed && lo <= hi;) {
    changed = false;
    for (int i = hi; i >= lo; --i) {
      if (off_row(i) == 0.0) {
        swap_rc(i, hi);
        --hi;
        changed = true;
        break;
      }
    }
  }
  // Columns with zero off-diagonal part move to the top.
  for (bool changed = true; changed && lo <= hi;) {
    changed = false;
    for (int j = lo; j <= hi; ++j) {
      if (off_col(j) == 0.0) {
        swap_rc(j, lo);
        ++lo;
        changed = true;
        break;
      }
    }
  }

  // Diagonal scaling by powers of two (exact in binary floating point).
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = lo; i <= hi; ++i) {
      double c = off_col(i), r = off_row(i);
      if (c == 0.0 || r == 0.0) continue;
      const double c0 = c, r0 = r;
      double f = 1.0;
      while (c < r / 2.0) { c *= 2.0; r /= 2.0; f *= 2.0; }
      while (c >= r * 2.0) { c /= 2.0; r *= 2.0; f /= 2.0; }
      if (f != 1.0 && (c + r) < 0.95 * (c0 + r0)) {
        A.col(i) *= f;
        A.row(i) /= f;
        changed = true;
      }
    }
  }
  return {lo, hi};
}

}  // namespace

Vec solve_lower_bidiagonal(Scalar z, const Vec& subdiag, const Vec& rhs) {
  if (z == Scalar(0)) throw ZeroShift("solve_lower_bidiagonal: z = 0");
  const Eigen::Index n = rhs.size();
  if (subdiag.size() != n - 1)
    throw DimensionMismatch("solve_lower_bidiagonal: subdiag length must be dim - 1");
  Vec x(n);
  if (n == 0) return x;
  x(0) = rhs(0) / z;
  for (Eigen::Index j = 0; j + 1 < n; ++j) x(j + 1) = (rhs(j + 1) + subdiag(j) * x(j)) / z;
  return x;
}

Vec solve_shifted_strictly_lower(Scalar z, const Mat& L, const Vec& rhs) {
  if (z == Scalar(0)) throw ZeroShift("solve_shifted_strictly_lower: z = 0");
  const Eigen::Index n = rhs.size();
  if (L.rows() != n || L.cols() != n)
    throw DimensionMismatch("solve_shifted_strictly_lower: matrix/vector dims disagree");
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = rhs(i);
    if (i > 0) acc += (L.row(i).head(i) * x.head(i)).value();
    x(i) = acc / z;
  }
  return x;
}

Vec dense_eigenvalues(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw DimensionMismatch("dense_eigenvalues: matrix must be square");
  if (n > 1024) throw ValidationError("dense_eigenvalues: dim > 1024 unsupported");
  Vec eigs(n);
  if (n == 0) return eigs;

  Mat B = A;
  auto [lo, hi] = balance(B);
  int idx = 0;
  for (int i = 0; i < lo; ++i) eigs(idx++) = B(i, i);
  for (int i = hi + 1; i < n; ++i) eigs(idx++) = B(i, i);
  if (hi >= lo) {
    const int m = hi - lo + 1;
    Eigen::ComplexSchur<Mat> schur;
    schur.compute(B.block(lo, lo, m, m), /*computeU=*/false);
    if (schur.info() != Eigen::Success)
      throw NoConvergence("dense_eigenvalues: Schur iteration failed");
    for (int i = 0; i < m; ++i) eigs(idx++) = schur.matrixT()(i, i);
  }

  std::sort(eigs.data(), eigs.data() + n, [](Scalar a, Scalar b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
  return eigs;
}

int numerical_rank(const Mat& A, double tau) {
  if (tau <= 0) throw ValidationError("numerical_rank: tau must be positive");
  if (A.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double bar = tau * std::max(1.0, sv(0));
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > bar) ++r;
  return r;
}

int independence_rank(const std::vector<Vec>& vs, double tau) {
  if (vs.empty()) return 0;
  const Eigen::Index n = vs.front().size();
  Mat cols(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (vs[k].size() != n)
      throw DimensionMismatch("independence_rank: vectors have unequal dims");
    cols.col(static_cast<Eigen::Index>(k)) = vs[k];
  }
  return numerical_rank(cols, tau);
}

double spectral_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  const double fro = A.norm();
  if (fro == 0.0) return 0.0;
  // For an essentially-zero block the Frobenius norm is a tight upper bound
  // and saves iterating on denormals.
  if (fro < 1e-200) return fro;

  DetRng rng(0x5DEECE66Dull);
  Vec v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.csym();
  v.normalize();

  double prev = 0.0;
  double est = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vec w = A * v;
    est = w.norm();
    if (it > 0 && std::abs(est - prev) <= 1e-9 * std::max(est, 1e-300)) return est;
    prev = est;
    Vec y = A.adjoint() * w;
    const double ny = y.norm();
    if (ny == 0.0) return est;
    v = y / ny;
  }
  return est;
}

}  // namespace quasispec
