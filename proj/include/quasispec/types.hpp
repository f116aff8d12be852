#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace quasispec {

using Scalar  = std::complex<double>;
using Vec     = Eigen::VectorXcd;
using Mat     = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

// Root of the library's error hierarchy. Everything thrown on purpose derives
// from Error so callers can distinguish library failures from std ones.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };

// z = 0 requested in a shifted solve; the origin is always in the spectrum here.
struct ZeroShift : Error { using Error::Error; };

// The dense eigenvalue iteration failed; no partial results are returned.
struct NoConvergence : Error { using Error::Error; };

// No geometric envelope with ratio < 1 fits the series tail at this z.
struct TailNotConvergent : Error { using Error::Error; };

// |g - 1/alpha| fell below the contour floor even after radius perturbations.
struct ContourThroughRoot : Error { using Error::Error; };

// Adaptive contour sampling hit its refinement cap without certification.
struct PhaseStepTooLarge : Error { using Error::Error; };

// Newton iteration ran out of iterations (or the iterate escaped/went singular).
struct NewtonStall : Error { using Error::Error; };

// Newton iterate left the search domain toward the origin.
struct LeftDomain : Error { using Error::Error; };

// Residual of a candidate eigenpair is too large for the value to be a root.
struct NotAnEigenvalue : Error { using Error::Error; };

// Selected eigenvectors are numerically dependent; no projector is formed.
struct DependentBasis : Error { using Error::Error; };

// Rank-one similarity generator fails e*(u) = 0, so (I+N) is not unipotent.
struct NotNilpotent : Error { using Error::Error; };

// Bad input: scenario fields, preconditions, argument shapes.
struct ValidationError : Error { using Error::Error; };

// Input text is not valid JSON / UTF-8.
struct ParseError : Error { using Error::Error; };

// A cross-checked mathematical invariant failed at runtime (e.g. root count
// vs. winding, oracle eigenvalue without a matching root). Mapped to a
// distinct process exit code by the CLI.
struct InvariantViolation : Error { using Error::Error; };

}  // namespace quasispec
