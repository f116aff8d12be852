#include "quasispec/resolvent.hpp"

#include <cmath>
#include <limits>

namespace quasispec {

namespace {

// ---- double-double kernels for the high-cancellation regime ----------------
//
// The structured solve evaluates e(R(z)f) as a sum whose intermediate terms
// can exceed the final value by many orders of magnitude (for the 1/n shift
// the orbit reproduces the series of e^{1/z}, so near the negative real axis
// the terms reach e^{1/|z|} while the pairing cancels down to order one).
// Plain double arithmetic then carries an absolute error of roughly
// eps * max_term, which drowns contour values near an annulus's inner edge.
// When the measured term-to-value ratio is large the recurrence is re-run in
// double-double arithmetic, which removes the cancellation error entirely.

struct DD {
  double hi = 0.0, lo = 0.0;
};

inline DD quick_two_sum(double a, double b) {  // requires |a| >= |b| or a == 0
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  const DD s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD dd_sub(DD a, DD b) { return dd_add(a, DD{-b.hi, -b.lo}); }

inline DD dd_mul(DD a, DD b) {
  const DD p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline DD dd_div_d(DD a, double b) {
  const double q0 = a.hi / b;
  const DD p = two_prod(q0, b);
  const double r = ((a.hi - p.hi) - p.lo) + a.lo;
  return quick_two_sum(q0, r / b);
}

struct CDD {
  DD re, im;
};

inline CDD cdd_from(Scalar s) { return {{s.real(), 0.0}, {s.imag(), 0.0}}; }

inline CDD cdd_add(CDD a, CDD b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

inline CDD cdd_mul(CDD a, CDD b) {
  return {dd_sub(dd_mul(a.re, b.re), dd_mul(a.im, b.im)),
          dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))};
}

inline Scalar cdd_round(CDD a) { return {a.re.hi + a.re.lo, a.im.hi + a.im.lo}; }

inline CDD cdd_div_d(CDD a, double b) { return {dd_div_d(a.re, b), dd_div_d(a.im, b)}; }

// Reciprocal of a double complex to double-double accuracy: one Newton
// correction of the double quotient, r = r0 + r0 (1 - z r0).
inline CDD cdd_inv(Scalar z) {
  const Scalar r0 = Scalar(1, 0) / z;
  const CDD zr = cdd_mul(cdd_from(z), cdd_from(r0));
  const CDD e = {dd_sub(DD{1.0, 0.0}, zr.re), dd_sub(DD{0.0, 0.0}, zr.im)};
  return cdd_add(cdd_from(r0), cdd_mul(cdd_from(r0), e));
}

// e((zI - T)^{-1} f) for a weighted shift, with the forward recurrence and the
// pairing both carried in double-double. For 1/n-rule weights or coordinates
// the division is by the exact integer, not by the stored rounded double: the
// stored value's rounding is itself a coherent perturbation of order
// eps * max_term, which in the high-cancellation regime would plant genuine
// zeros of the rounded model just inside an annulus where the mathematical
// model has none. Exact division evaluates the mathematical model instead.
Scalar pair_shift_dd(Scalar z, const OperatorModel& T, const Functional& e_star,
                     const Vec& f) {
  const CDD invz = cdd_inv(z);
  const Vec& w = T.weights();
  const Vec& c = e_star.coords();
  const bool w_rule = T.one_over_n_rule();       // weights_(i) = 1/(i+1)
  const bool c_rule = e_star.one_over_n_rule();  // coords_(i) = 1/(i+1)
  const int n = T.dim();
  CDD x = cdd_mul(cdd_from(f(0)), invz);
  CDD acc = c_rule ? x : cdd_mul(cdd_from(c(0)), x);
  for (int k = 1; k < n; ++k) {
    const CDD wx = w_rule ? cdd_div_d(x, double(k)) : cdd_mul(cdd_from(w(k - 1)), x);
    x = cdd_mul(cdd_add(cdd_from(f(k)), wx), invz);
    const CDD t = c_rule ? cdd_div_d(x, double(k + 1)) : cdd_mul(cdd_from(c(k)), x);
    acc = cdd_add(acc, t);
  }
  return cdd_round(acc);
}

}  // namespace

GEval g_series(Scalar z, const MomentSequence& ms) {
  if (z == Scalar(0)) throw ZeroShift("g_series: z = 0");
  const int M = ms.horizon;

  // Horner in w = 1/z: g = (...((m_M w + m_{M-1}) w + ...) w + m_0) w.
  const Scalar w = Scalar(1.0, 0.0) / z;
  Scalar s(0, 0);
  for (int i = M; i >= 0; --i) s = (s + ms.m(i)) * w;

  const double ninf = -std::numeric_limits<double>::infinity();
  double tail = 0.0;
  if (ms.log_envelope(M) > ninf) {
    // The orbit is still alive at the horizon end, so (death being permanent)
    // the whole fit window is alive. Envelope in log space:
    // y_i = log a_i = log_envelope_i - i log|z|; least-squares slope -> log q.
    const double ljz = std::log(std::abs(z));
    const int lo = std::max(0, M - std::max(2, (M + 1) / 4) + 1);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (int i = lo; i <= M; ++i) {
      const double y = ms.log_envelope(i) - i * ljz;
      sx += i; sy += y; sxx += double(i) * i; sxy += double(i) * y; n += 1;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(slope < 0.0))
      throw TailNotConvergent("g_series: no geometric envelope with ratio < 1 fits the tail");
    double logB = ninf;
    for (int i = lo; i <= M; ++i)
      logB = std::max(logB, ms.log_envelope(i) - i * ljz - i * slope);
    const double q = std::exp(slope);
    tail = std::exp(logB + (M + 1) * slope - std::log1p(-q) - ljz);
  }
  // Envelope dead at M: the orbit was exhausted inside the window, the series
  // is exactly finite, and the dropped tail is zero.

  return {z, s, GMethod::Series, tail};
}

GEval g_solve(Scalar z, const OperatorModel& T, const Functional& e_star, const Vec& f) {
  const Vec x = resolvent_apply(T, z, f);
  Scalar val = e_star(x);
  if (T.kind() == OperatorKind::WeightedShift) {
    // Cancellation ratio of the pairing; see the double-double kernels above.
    // Only the shift family drives it to catastrophic levels inside the
    // annuli the lab works in, so only that family has a boosted path.
    const double sum_abs = e_star.coords().cwiseProduct(x).cwiseAbs().sum();
    if (sum_abs > 1e4 * std::abs(val)) val = pair_shift_dd(z, T, e_star, f);
  }
  return {z, val, GMethod::Solve, 0.0};
}

Scalar g_prime(Scalar z, const OperatorModel& T, const Functional& e_star, const Vec& f) {
  const Vec r1 = resolvent_apply(T, z, f);
  const Vec r2 = resolvent_apply(T, z, r1);
  return -e_star(r2);
}

}  // namespace quasispec
