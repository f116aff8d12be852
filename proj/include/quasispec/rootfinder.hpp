#pragma once

#include <utility>
#include <vector>

#include "quasispec/operators.hpp"
#include "quasispec/resolvent.hpp"
#include "quasispec/types.hpp"

namespace quasispec {

// Search region: 0 < r_min < r_max. The inner disc is excluded on purpose —
// for a persistent singularity the roots accumulate at 0, so any annulus
// holds finitely many while the full punctured disc may not.
struct Annulus {
  double r_min = 0;
  double r_max = 0;
  Annulus() = default;
  Annulus(double lo, double hi);
  // Default search window around the natural scale of g: r_scale = max(1,
  // ||f|| ||e*||), annulus [1e-3 r_scale, 4 r_scale].
  static Annulus default_for(const Functional& e_star, const Vec& f);
};

struct Root {
  Scalar z;
  int multiplicity = 1;   // winding multiplicity of the final cell
  double residual = 0.0;  // |g(z) - 1/alpha|
};

// Every root lies inside the annulus; the sum of multiplicities equals
// total_winding (checked); sorted by |z| descending, then argument ascending.
struct RootSet {
  std::vector<Root> roots;
  long total_winding = 0;
};

// Bound evaluator for one (T, e*, f) triple; h(z) = g(z) - 1/alpha is what
// winding counts and Newton polishes.
class GFunction {
 public:
  GFunction(const OperatorModel& T, const Functional& e_star, const Vec& f)
      : T_(&T), e_(&e_star), f_(&f) {}
  Scalar g(Scalar z) const { return g_solve(z, *T_, *e_, *f_).value; }
  Scalar gp(Scalar z) const { return g_prime(z, *T_, *e_, *f_); }

 private:
  const OperatorModel* T_;
  const Functional* e_;
  const Vec* f_;
};

// Argument-principle count of solutions of g(z) = 1/alpha inside the annulus,
// as the sum of two independent closed-circle windings (outer CCW + inner CW),
// so a pole of any order at 0 stays outside. Adaptive sampling: 64 points per
// circle doubling until every phase step < pi/2, cap 2^16; the summed phase
// must land within 0.25 of an integer. A circle in trouble near a root —
// |h| below 1e-12 max(1,|1/alpha|), or a phase step that refinement cannot
// shrink — gets the radii perturbed up to 3 times before the error is thrown.
long winding_count(const GFunction& G, Scalar alpha, const Annulus& a);

// All solutions of g(z) = 1/alpha in the annulus: recursive subdivision of
// (log r, theta) sector cells until each holds winding <= 1, Newton polish of
// simple roots, clusters below cluster_radius = 1e-8 r_max reported once with
// their winding multiplicity. Completeness (sum of multiplicities == annulus
// winding) is enforced.
RootSet find_roots(const GFunction& G, Scalar alpha, const Annulus& a);

// Newton iteration on h = g - 1/alpha from z0. Stops successfully when
// |h| < 1e-11 max(1,|1/alpha|) and |dz| < 1e-12 |z|; throws NewtonStall after
// 50 iterations (or a non-finite/escaped iterate), LeftDomain if the iterate
// falls below r_min/2. Returns (root, |h(root)|).
std::pair<Scalar, double> newton_polish(const GFunction& G, Scalar alpha, Scalar z0,
                                        double r_min = 0.0, double r_escape = 1e30);

}  // namespace quasispec
