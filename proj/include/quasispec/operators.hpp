#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "quasispec/types.hpp"

namespace quasispec {

enum class OperatorKind { WeightedShift, DenseStrictlyLower, VolterraQuadrature };

// A truncated quasinilpotent operator model. All models are strictly lower
// triangular at truncation, hence nilpotent there. Immutable after
// construction; construct via the factories.
class OperatorModel {
 public:
  // w_n = 1/n rule, regenerated on re-truncation.
  static OperatorModel shift_one_over_n(int dim);
  // Explicit subdiagonal weights (length dim - 1).
  static OperatorModel shift(Vec weights);
  // Strictly lower triangular entries drawn from mt19937_64(seed): for each
  // row i = 2..dim, columns j = 1..i-1 in order, entry = (u + iv)/(2 sqrt(dim))
  // with u, v uniform in [-1, 1). Growing row by row, so smaller truncations
  // are leading corners of larger ones with the same seed.
  static OperatorModel dense_seeded(int dim, std::uint64_t seed);
  // Explicit strictly lower triangular entries (strict lower part is used).
  static OperatorModel dense(Mat entries);
  // Left-rectangle quadrature of the integration operator: entries 1/dim
  // strictly below the diagonal. Regenerated (with new 1/dim) on re-truncation.
  static OperatorModel volterra(int dim);

  int dim() const { return dim_; }
  OperatorKind kind() const { return kind_; }
  bool one_over_n_rule() const { return one_over_n_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  const Vec& weights() const;  // WeightedShift only

  // Truncation to the leading N x N corner, following the family rule:
  // rule-generated weights/entries are regenerated at size N, explicit
  // weights/entries are sliced (N must not exceed the stored size), and
  // Volterra entries become 1/N.
  OperatorModel truncated(int N) const;

  friend Vec apply(const OperatorModel& T, const Vec& x);
  friend Vec resolvent_apply(const OperatorModel& T, Scalar z, const Vec& v);
  friend Mat materialize_T(const OperatorModel& T);

 private:
  OperatorModel() = default;
  OperatorKind kind_ = OperatorKind::WeightedShift;
  int dim_ = 0;
  Vec weights_;   // shift models
  Mat entries_;   // explicit dense models
  bool one_over_n_ = false;
  std::optional<std::uint64_t> seed_;
};

// A bounded functional acting bilinearly: e(x) = sum_j coords_j x_j. There is
// no complex conjugation, so the Laurent coefficients of z -> e(R(z)f) are
// exactly the moments e(T^i f).
class Functional {
 public:
  static Functional one_over_n(int dim);    // coords_j = 1/j, regenerated on re-truncation
  static Functional from_coords(Vec coords);

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  bool one_over_n_rule() const { return one_over_n_; }
  double norm() const { return coords_.norm(); }
  Scalar operator()(const Vec& x) const;

  Functional truncated(int N) const;

 private:
  Functional() = default;
  Vec coords_;
  bool one_over_n_ = false;
};

// F = e* (x) f  acting as  x -> e*(x) f.
struct RankOnePerturbation {
  Functional e_star;
  Vec f;
};

Vec apply(const OperatorModel& T, const Vec& x);

// (f, Tf, ..., T^M f) by iterated application (exact per-coordinate products
// for shift models, since each step multiplies coordinates independently).
std::vector<Vec> orbit(const OperatorModel& T, const Vec& f, int M);

// Orbit in normalized form: unit vectors plus log norms, so factorially
// decaying orbits survive far past double underflow. raw_norm mirrors the
// plain norm while it is representable and is 0 after underflow; log_norm is
// -inf once the orbit hits the zero vector.
struct ScaledOrbit {
  std::vector<Vec> unit;  // unit vectors (zero vector once the orbit dies)
  RealVec log_norm;
  RealVec raw_norm;
};
ScaledOrbit scaled_orbit(const OperatorModel& T, const Vec& f, int M);

// x = (zI - T)^{-1} v at truncation, via the structured solve for the model.
Vec resolvent_apply(const OperatorModel& T, Scalar z, const Vec& v);

// Dense matrix of the bare model.
Mat materialize_T(const OperatorModel& T);

// Dense matrix of T + alpha F.
Mat materialize(const OperatorModel& T, const RankOnePerturbation& F, Scalar alpha);

// Slices a plain vector to dimension N; nonzero coordinates beyond N are an
// error (the vector does not fit the truncation family).
Vec truncate_vector(const Vec& v, int N);

// Truncates both legs of the perturbation.
RankOnePerturbation truncated(const RankOnePerturbation& F, int N);

}  // namespace quasispec
