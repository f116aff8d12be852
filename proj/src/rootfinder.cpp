#include "quasispec/rootfinder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quasispec {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr int kMaxLoopPoints = 1 << 16;
// Relative radius perturbation step for the contour-rescue ladder. Must be
// large enough that a root formerly ON the circle can be resolved at the
// sample cap after one nudge: the straddle step needs spacing < 2 * distance,
// i.e. about pi / kRadiusNudge points, so 2^-12 needs ~13k of the 2^16 cap.
constexpr double kRadiusNudge = 0x1.0p-12;

// One boundary piece of a cell in (log r, theta) coordinates.
// arc: theta runs a -> b at radius fixed; radial: log r runs a -> b at angle fixed.
struct Edge {
  bool arc;
  double a, b, fixed;
};

Scalar edge_point(const Edge& e, double t) {
  const double u = e.a + (e.b - e.a) * t;
  return e.arc ? Scalar(e.fixed * std::cos(u), e.fixed * std::sin(u))
               : std::exp(u) * Scalar(std::cos(e.fixed), std::sin(e.fixed));
}

double phase_step(Scalar h0, Scalar h1) { return std::arg(h1 / h0); }

// Winding of h over one closed circle, adaptive doubling.
long closed_loop_winding(const GFunction& G, Scalar inv_a, const Edge& e, double hmin_floor) {
  int n = 64;
  while (true) {
    std::vector<Scalar> hs(n);
    for (int j = 0; j < n; ++j)
      hs[j] = G.g(edge_point(e, static_cast<double>(j) / n)) - inv_a;
    double mn = std::numeric_limits<double>::infinity();
    for (auto& h : hs) mn = std::min(mn, std::abs(h));
    if (mn < hmin_floor) throw ContourThroughRoot("contour passes within floor of a root");

    bool bad = false;
    double sum = 0;
    for (int j = 0; j < n; ++j) {
      const double d = phase_step(hs[j], hs[(j + 1) % n]);
      if (std::abs(d) >= kHalfPi) { bad = true; break; }
      sum += d;
    }
    if (!bad) {
      const double W = sum / kTwoPi;
      if (std::abs(W - std::round(W)) < 0.25) return std::lround(W);
    }
    if (n >= kMaxLoopPoints)
      throw PhaseStepTooLarge("phase steps not resolved at maximum refinement");
    n *= 2;
  }
}

// Winding of h over the boundary of the sector [lr_lo,lr_hi] x [th_lo,th_hi].
// A full annulus (theta span = 2 pi) is measured as two independent closed
// circles, outer CCW plus inner CW; stitching them through radial junctions
// would create phase jumps no refinement can shrink.
long cell_winding(const GFunction& G, Scalar alpha, double lr_lo, double lr_hi,
                  double th_lo, double th_hi, double hmin_floor) {
  const Scalar inv_a = Scalar(1, 0) / alpha;
  const double r_lo = std::exp(lr_lo), r_hi = std::exp(lr_hi);
  if (std::abs((th_hi - th_lo) - kTwoPi) < 1e-15) {
    const Edge outer{true, th_lo, th_hi, r_hi};
    const Edge inner{true, th_hi, th_lo, r_lo};
    return closed_loop_winding(G, inv_a, outer, hmin_floor) +
           closed_loop_winding(G, inv_a, inner, hmin_floor);
  }

  const Edge edges[4] = {
      {true, th_lo, th_hi, r_hi},   // outer arc, CCW
      {false, lr_hi, lr_lo, th_hi}, // radial inward
      {true, th_hi, th_lo, r_lo},   // inner arc, CW
      {false, lr_lo, lr_hi, th_lo}, // radial outward
  };
  int counts[4];
  for (int ei = 0; ei < 4; ++ei)
    counts[ei] = edges[ei].arc
                     ? std::max(16, static_cast<int>(64.0 * std::abs(edges[ei].b - edges[ei].a) / kTwoPi))
                     : 16;

  for (int round = 0; round < 16; ++round) {
    std::vector<Scalar> hs;
    std::vector<int> seg;
    for (int ei = 0; ei < 4; ++ei) {
      const int n = counts[ei];
      for (int j = (ei == 0 ? 0 : 1); j <= n; ++j) {
        hs.push_back(G.g(edge_point(edges[ei], static_cast<double>(j) / n)) - inv_a);
        seg.push_back(ei);
      }
    }
    const int m = static_cast<int>(hs.size());
    double mn = std::numeric_limits<double>::infinity();
    for (auto& h : hs) mn = std::min(mn, std::abs(h));
    if (mn < hmin_floor) throw ContourThroughRoot("contour passes within floor of a root");

    std::vector<char> bad(m, 0);
    bool any_bad = false;
    double sum = 0;
    for (int j = 0; j < m; ++j) {
      const double d = phase_step(hs[j], hs[(j + 1) % m]);
      if (std::abs(d) >= kHalfPi) { bad[j] = 1; any_bad = true; }
      sum += d;
    }
    bool refine[4] = {false, false, false, false};
    if (!any_bad) {
      const double W = sum / kTwoPi;
      if (std::abs(W - std::round(W)) < 0.25) return std::lround(W);
      refine[0] = refine[1] = refine[2] = refine[3] = true;  // uncertified: refine all
    } else {
      for (int j = 0; j < m; ++j)
        if (bad[j]) { refine[seg[j]] = true; refine[seg[(j + 1) % m]] = true; }
    }
    for (int ei = 0; ei < 4; ++ei) {
      if (!refine[ei]) continue;
      if (counts[ei] >= kMaxLoopPoints)
        throw PhaseStepTooLarge("phase steps not resolved at maximum refinement");
      counts[ei] *= 2;
    }
  }
  throw PhaseStepTooLarge("phase steps not resolved within refinement rounds");
}

// Full-annulus winding with the radius-perturbation ladder; on success
// reports the (possibly nudged) radii actually used.
long annulus_winding(const GFunction& G, Scalar alpha, const Annulus& a, double hmin_floor,
                     double& r_min_used, double& r_max_used) {
  for (int t = 0;; ++t) {
    r_min_used = a.r_min * (1.0 - t * kRadiusNudge);
    r_max_used = a.r_max * (1.0 + t * kRadiusNudge);
    try {
      const double th0 = -std::numbers::pi + 0.37;
      return cell_winding(G, alpha, std::log(r_min_used), std::log(r_max_used), th0,
                          th0 + kTwoPi, hmin_floor);
    } catch (const ContourThroughRoot&) {
      if (t >= 3) throw;
    } catch (const PhaseStepTooLarge&) {
      // A root sitting exactly on a circle never dips below the |h| floor —
      // the straddling phase step just stays at ~pi — so it surfaces here.
      if (t >= 3) throw;
    }
  }
}

struct Cell {
  double lr_lo, lr_hi, th_lo, th_hi;
  long w;
};

constexpr double kSplitFracs[5] = {0.5, 0.53, 0.46, 0.59, 0.41};

}  // namespace

Annulus::Annulus(double lo, double hi) : r_min(lo), r_max(hi) {
  if (!(0 < lo && lo < hi))
    throw ValidationError("annulus requires 0 < r_min < r_max");
}

Annulus Annulus::default_for(const Functional& e_star, const Vec& f) {
  const double r_scale = std::max(1.0, f.norm() * e_star.norm());
  return Annulus(1e-3 * r_scale, 4.0 * r_scale);
}

long winding_count(const GFunction& G, Scalar alpha, const Annulus& a) {
  if (alpha == Scalar(0)) throw ValidationError("winding_count: alpha must be nonzero");
  const double scale = std::max(1.0, std::abs(Scalar(1, 0) / alpha));
  double rmin_u, rmax_u;
  return annulus_winding(G, alpha, a, 1e-12 * scale, rmin_u, rmax_u);
}

std::pair<Scalar, double> newton_polish(const GFunction& G, Scalar alpha, Scalar z0,
                                        double r_min, double r_escape) {
  if (alpha == Scalar(0)) throw ValidationError("newton_polish: alpha must be nonzero");
  if (z0 == Scalar(0)) throw ValidationError("newton_polish: z0 must be nonzero");
  const Scalar inv_a = Scalar(1, 0) / alpha;
  const double scale = std::max(1.0, std::abs(inv_a));
  Scalar z = z0;
  for (int it = 0; it < 50; ++it) {
    const Scalar h = G.g(z) - inv_a;
    if (!std::isfinite(std::abs(h))) throw NewtonStall("newton: non-finite value");
    if (std::abs(h) < 1e-11 * scale) return {z, std::abs(h)};
    const Scalar d = G.gp(z);
    if (d == Scalar(0) || !std::isfinite(std::abs(d)))
      throw NewtonStall("newton: derivative unusable");
    const Scalar dz = -h / d;
    z += dz;
    if (std::abs(z) < r_min / 2) throw LeftDomain("newton: iterate fell inside the inner disc");
    if (std::abs(z) > r_escape) throw NewtonStall("newton: iterate escaped the search region");
    if (std::abs(dz) < 1e-12 * std::abs(z)) {
      // The step has hit the position noise floor. Near a simple root that is
      // as good as the evaluation allows, even when |h| itself plateaus above
      // the absolute tolerance because the pairing's rounding floor is higher;
      // accept if the value is small in absolute terms as well.
      const Scalar h2 = G.g(z) - inv_a;
      if (std::abs(h2) < 1e-6 * scale) return {z, std::abs(h2)};
    }
  }
  throw NewtonStall("newton: no convergence in 50 iterations");
}

RootSet find_roots(const GFunction& G, Scalar alpha, const Annulus& a) {
  if (alpha == Scalar(0)) throw ValidationError("find_roots: alpha must be nonzero");
  const Scalar inv_a = Scalar(1, 0) / alpha;
  const double scale = std::max(1.0, std::abs(inv_a));
  const double floor = 1e-12 * scale;
  const double cluster = 1e-8 * a.r_max;

  double rmin_w, rmax_w;
  const long W = annulus_winding(G, alpha, a, floor, rmin_w, rmax_w);

  const double th0 = -std::numbers::pi + 0.37;
  std::vector<Cell> stack;
  stack.push_back({std::log(rmin_w), std::log(rmax_w), th0, th0 + kTwoPi, W});

  struct Found {
    Scalar z;
    long mult;
    double res;
  };
  std::vector<Found> found;

  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    if (c.w == 0) continue;

    const double r_mid = std::exp(0.5 * (c.lr_lo + c.lr_hi));
    const double th_mid = 0.5 * (c.th_lo + c.th_hi);
    const double diam = r_mid * std::hypot(c.lr_hi - c.lr_lo, c.th_hi - c.th_lo);
    const Scalar zc = r_mid * Scalar(std::cos(th_mid), std::sin(th_mid));

    if (c.w == 1) {
      try {
        auto [z, res] = newton_polish(G, alpha, zc, rmin_w, 100.0 * rmax_w);
        const double lr = std::log(std::abs(z));
        double th = std::arg(z);
        while (th < c.th_lo - std::numbers::pi) th += kTwoPi;
        while (th > c.th_hi + std::numbers::pi) th -= kTwoPi;
        const double m = cluster / r_mid;
        if (c.lr_lo - m <= lr && lr <= c.lr_hi + m && c.th_lo - m <= th &&
            th <= c.th_hi + m && rmin_w <= std::abs(z) && std::abs(z) <= rmax_w) {
          found.push_back({z, 1, res});
          continue;
        }
      } catch (const Error&) {
        // fall through to subdivision
      }
    }

    if (diam < cluster) {
      found.push_back({zc, c.w, std::abs(G.g(zc) - inv_a)});
      continue;
    }

    const bool split_r = (c.lr_hi - c.lr_lo) >= (c.th_hi - c.th_lo);
    bool done = false;
    for (const double frac : kSplitFracs) {
      Cell c1 = c, c2 = c;
      if (split_r) {
        const double mid = c.lr_lo + frac * (c.lr_hi - c.lr_lo);
        c1.lr_hi = mid;
        c2.lr_lo = mid;
      } else {
        const double mid = c.th_lo + frac * (c.th_hi - c.th_lo);
        c1.th_hi = mid;
        c2.th_lo = mid;
      }
      long w1, w2;
      try {
        w1 = cell_winding(G, alpha, c1.lr_lo, c1.lr_hi, c1.th_lo, c1.th_hi, floor);
        w2 = cell_winding(G, alpha, c2.lr_lo, c2.lr_hi, c2.th_lo, c2.th_hi, floor);
      } catch (const ContourThroughRoot&) {
        continue;
      } catch (const PhaseStepTooLarge&) {
        continue;
      }
      if (w1 + w2 != c.w) continue;  // inconsistent sampling; try another split
      c1.w = w1;
      c2.w = w2;
      stack.push_back(c1);
      stack.push_back(c2);
      done = true;
      break;
    }
    if (!done) {
      // Every split failed: treat the cell as one tight cluster; polish from
      // the center if Newton cooperates.
      try {
        auto [z, res] = newton_polish(G, alpha, zc, rmin_w, 100.0 * rmax_w);
        found.push_back({z, c.w, res});
      } catch (const Error&) {
        found.push_back({zc, c.w, std::abs(G.g(zc) - inv_a)});
      }
    }
  }

  // Merge claims closer than the cluster radius (e.g. the same root polished
  // from two neighboring cells).
  std::vector<Found> merged;
  for (const auto& f : found) {
    bool hit = false;
    for (auto& m : merged) {
      if (std::abs(f.z - m.z) < cluster) {
        m.mult = std::max(m.mult, f.mult);
        m.res = std::min(m.res, f.res);
        hit = true;
        break;
      }
    }
    if (!hit) merged.push_back(f);
  }

  long total = 0;
  for (const auto& m : merged) total += m.mult;
  if (total != W)
    throw InvariantViolation("find_roots: multiplicities sum to " + std::to_string(total) +
                             " but the annulus winding is " + std::to_string(W));

  std::sort(merged.begin(), merged.end(), [](const Found& x, const Found& y) {
    const double mx = std::abs(x.z), my = std::abs(y.z);
    if (mx != my) return mx > my;
    return std::arg(x.z) < std::arg(y.z);
  });

  RootSet rs;
  rs.total_winding = W;
  for (const auto& m : merged)
    rs.roots.push_back({m.z, static_cast<int>(m.mult), m.res});
  return rs;
}

}  // namespace quasispec
