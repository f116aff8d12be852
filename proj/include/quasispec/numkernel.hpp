#pragma once

#include <vector>

#include "quasispec/types.hpp"

namespace quasispec {

// Solves (zI - T) x = rhs where T is the lower-bidiagonal matrix with zero
// diagonal and subdiagonal entries subdiag[j] (so the system matrix has
// diagonal z and subdiagonal -subdiag[j]). Forward substitution:
//   x_1 = rhs_1 / z,   x_{j+1} = (rhs_{j+1} + subdiag_j * x_j) / z.
// Residual guarantee: ||(zI-T)x - rhs|| <= 10 eps (||rhs|| + |z| ||x||).
Vec solve_lower_bidiagonal(Scalar z, const Vec& subdiag, const Vec& rhs);

// Solves (zI - L) x = rhs for a strictly lower triangular dense L by forward
// substitution. Same shape of residual bound, with constant ~dim.
Vec solve_shifted_strictly_lower(Scalar z, const Mat& L, const Vec& rhs);

// All dim eigenvalues of a square complex matrix, dim <= 1024. The matrix is
// balanced first (permutation deflation + radix-2 diagonal scaling), then the
// remaining block goes through a complex Schur decomposition. Strictly
// triangular matrices deflate completely and return exact diagonal values.
// Returned sorted by |lambda| descending, then by argument ascending.
// Throws NoConvergence if the QR iteration fails (nothing partial returned).
Vec dense_eigenvalues(const Mat& A);

// Number of singular values exceeding tau * max(1, sigma_max(A)).
int numerical_rank(const Mat& A, double tau = 1e-10);

// Numerical rank of the matrix whose columns are vs.
int independence_rank(const std::vector<Vec>& vs, double tau = 1e-10);

// Largest singular value, estimated by power iteration on A^H A to 1e-6
// relative accuracy (exact enough for threshold checks; cheap for thin
// residual blocks). Works for rectangular A.
double spectral_norm(const Mat& A);

}  // namespace quasispec
