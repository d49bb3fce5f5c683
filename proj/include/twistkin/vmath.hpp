#pragma once

#include <cmath>
#include <cstddef>

// Lane abstraction for the batch kernels. Both lanes expose the same set of
// correctly rounded primitives (add, sub, mul, div, sqrt, fma, min, max,
// nearest-even rounding, floor, compares, blends), and every transcendental
// below is built from those primitives in a fixed straight-line order, so a
// scalar lane and a 4-wide AVX2 lane produce bit-identical doubles. That is
// what lets the runtime kernel choice stay invisible to every consumer.

namespace twistkin::vm {

struct ScalarLane {
  static constexpr int width = 1;
  struct vec {
    double v;
  };
  struct mask {
    bool m;
  };

  static vec splat(double x) { return {x}; }
  static vec load(const double* p) { return {*p}; }
  static void store(double* p, vec a) { *p = a.v; }

  static vec add(vec a, vec b) { return {a.v + b.v}; }
  static vec sub(vec a, vec b) { return {a.v - b.v}; }
  static vec mul(vec a, vec b) { return {a.v * b.v}; }
  static vec div(vec a, vec b) { return {a.v / b.v}; }
  static vec sqrt(vec a) { return {std::sqrt(a.v)}; }
  static vec fma(vec a, vec b, vec c) { return {std::fma(a.v, b.v, c.v)}; }
  static vec neg(vec a) { return {-a.v}; }
  static vec abs(vec a) { return {std::fabs(a.v)}; }
  // Ties to even, matching _mm256_round_pd under the default FP environment.
  static vec round_ne(vec a) { return {std::nearbyint(a.v)}; }
  static vec floor(vec a) { return {std::floor(a.v)}; }
  static vec min(vec a, vec b) { return {a.v < b.v ? a.v : b.v}; }
  static vec max(vec a, vec b) { return {a.v > b.v ? a.v : b.v}; }

  static mask lt(vec a, vec b) { return {a.v < b.v}; }
  static mask le(vec a, vec b) { return {a.v <= b.v}; }
  static mask gt(vec a, vec b) { return {a.v > b.v}; }
  static mask ge(vec a, vec b) { return {a.v >= b.v}; }
  static mask eq(vec a, vec b) { return {a.v == b.v}; }
  static mask logical_and(mask a, mask b) { return {a.m && b.m}; }
  static mask logical_or(mask a, mask b) { return {a.m || b.m}; }
  static vec select(mask m, vec a, vec b) { return {m.m ? a.v : b.v}; }
};

namespace detail {

// asin rational minimax on z in [0, 0.25]: asin(x) = x + x * R(x^2).
inline constexpr double kAsinP0 = 1.66666666666666657415e-01;
inline constexpr double kAsinP1 = -3.25565818622400915405e-01;
inline constexpr double kAsinP2 = 2.01212532134862925881e-01;
inline constexpr double kAsinP3 = -4.00555345006794114027e-02;
inline constexpr double kAsinP4 = 7.91534994289814532176e-04;
inline constexpr double kAsinP5 = 3.47933107596021167570e-05;
inline constexpr double kAsinQ1 = -2.40339491173441421878e+00;
inline constexpr double kAsinQ2 = 2.02094576023350569471e+00;
inline constexpr double kAsinQ3 = -6.88283971605453293030e-01;
inline constexpr double kAsinQ4 = 7.70381505559019352791e-02;

inline constexpr double kPiO2Hi = 1.57079632679489655800e+00;
inline constexpr double kPiO2Lo = 6.12323399573676603587e-17;
inline constexpr double kPi = 3.14159265358979311600e+00;

// sin/cos kernels on |y| <= pi/4.
inline constexpr double kSin1 = -1.66666666666666324348e-01;
inline constexpr double kSin2 = 8.33333333332248946124e-03;
inline constexpr double kSin3 = -1.98412698298579493134e-04;
inline constexpr double kSin4 = 2.75573137070700676789e-06;
inline constexpr double kSin5 = -2.50507602534068634195e-08;
inline constexpr double kSin6 = 1.58969099521155010221e-10;

inline constexpr double kCos1 = 4.16666666666666019037e-02;
inline constexpr double kCos2 = -1.38888888888741095749e-03;
inline constexpr double kCos3 = 2.48015872894767294178e-05;
inline constexpr double kCos4 = -2.75573143513906633035e-07;
inline constexpr double kCos5 = 2.08757232129817482790e-09;
inline constexpr double kCos6 = -1.13596475577881948265e-11;

// Argument reduction by pi/2 split into a 33-bit head plus tail. Exact for
// quotients below 2^20, far beyond any phase the kernels ever build.
inline constexpr double kInvPiO2 = 6.36619772367581382433e-01;
inline constexpr double kPiO2A = 1.57079632673412561417e+00;
inline constexpr double kPiO2At = 6.07710050650619224932e-11;

}  // namespace detail

// acos with the argument clamped into [-1, 1]. Max error a few ulp.
template <class L>
typename L::vec acos_v(typename L::vec x) {
  using V = typename L::vec;
  using M = typename L::mask;
  using namespace detail;

  const V one = L::splat(1.0);
  const V half = L::splat(0.5);
  x = L::min(L::max(x, L::splat(-1.0)), one);

  const V ax = L::abs(x);
  const M small = L::lt(ax, half);
  const V z_small = L::mul(x, x);
  const V z_big = L::mul(L::sub(one, ax), half);
  const V z = L::select(small, z_small, z_big);

  V p = L::fma(z, L::splat(kAsinP5), L::splat(kAsinP4));
  p = L::fma(z, p, L::splat(kAsinP3));
  p = L::fma(z, p, L::splat(kAsinP2));
  p = L::fma(z, p, L::splat(kAsinP1));
  p = L::fma(z, p, L::splat(kAsinP0));
  p = L::mul(z, p);
  V q = L::fma(z, L::splat(kAsinQ4), L::splat(kAsinQ3));
  q = L::fma(z, q, L::splat(kAsinQ2));
  q = L::fma(z, q, L::splat(kAsinQ1));
  q = L::fma(z, q, one);
  const V r = L::div(p, q);

  // |x| < 0.5: pi/2 - (x - (pio2_lo - x r))
  const V xr = L::mul(x, r);
  const V res_small =
      L::sub(L::splat(kPiO2Hi), L::sub(x, L::sub(L::splat(kPiO2Lo), xr)));

  const V s = L::sqrt(z_big);
  const V sr = L::mul(s, r);
  // x >= 0.5: 2 (s + s r)
  const V res_pos = L::mul(L::splat(2.0), L::add(s, sr));
  // x <= -0.5: pi - 2 (s + (s r - pio2_lo))
  const V res_neg = L::sub(
      L::splat(kPi),
      L::mul(L::splat(2.0), L::add(s, L::sub(sr, L::splat(kPiO2Lo)))));

  const M positive = L::ge(x, L::splat(0.0));
  return L::select(small, res_small, L::select(positive, res_pos, res_neg));
}

// Simultaneous sin and cos. Valid for |x| below about 1e6; the callers only
// ever form phases bounded by the orbital indices times pi.
template <class L>
void sincos_v(typename L::vec x, typename L::vec& s_out,
              typename L::vec& c_out) {
  using V = typename L::vec;
  using M = typename L::mask;
  using namespace detail;

  const V fn = L::round_ne(L::mul(x, L::splat(kInvPiO2)));
  // fn * kPiO2A is exact: 20-bit quotient times 33-bit constant.
  const V r = L::sub(x, L::mul(fn, L::splat(kPiO2A)));
  const V w = L::mul(fn, L::splat(kPiO2At));
  const V y = L::sub(r, w);

  // Quadrant index fn mod 4, kept in doubles.
  const V q = L::sub(fn, L::mul(L::splat(4.0), L::floor(L::mul(fn, L::splat(0.25)))));

  const V z = L::mul(y, y);

  V sp = L::fma(z, L::splat(kSin6), L::splat(kSin5));
  sp = L::fma(z, sp, L::splat(kSin4));
  sp = L::fma(z, sp, L::splat(kSin3));
  sp = L::fma(z, sp, L::splat(kSin2));
  sp = L::fma(z, sp, L::splat(kSin1));
  const V ks = L::fma(L::mul(y, z), sp, y);

  V cp = L::fma(z, L::splat(kCos6), L::splat(kCos5));
  cp = L::fma(z, cp, L::splat(kCos4));
  cp = L::fma(z, cp, L::splat(kCos3));
  cp = L::fma(z, cp, L::splat(kCos2));
  cp = L::fma(z, cp, L::splat(kCos1));
  const V hz = L::mul(L::splat(0.5), z);
  const V kc = L::add(L::sub(L::splat(1.0), hz), L::mul(L::mul(z, z), cp));

  const M q0 = L::eq(q, L::splat(0.0));
  const M q1 = L::eq(q, L::splat(1.0));
  const M q2 = L::eq(q, L::splat(2.0));

  s_out = L::select(
      q0, ks, L::select(q1, kc, L::select(q2, L::neg(ks), L::neg(kc))));
  c_out = L::select(
      q0, kc, L::select(q1, L::neg(ks), L::select(q2, L::neg(kc), ks)));
}

}  // namespace twistkin::vm
