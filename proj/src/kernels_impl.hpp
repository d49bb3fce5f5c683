#pragma once

#include <cstring>

#include "twistkin/kernels.hpp"
#include "twistkin/vmath.hpp"

// Kernel bodies shared by the scalar and AVX2 translation units. Everything
// is expressed through the lane primitives so both instantiations round
// identically.

namespace twistkin::kern::detail {

template <class L>
struct Triangle {
  typename L::vec delta1;
  typename L::vec delta2;
  typename L::vec sixteen_a2;
  typename L::mask inside;
};

template <class L, class P>
Triangle<L> triangle_block(const P& p, typename L::vec k) {
  using V = typename L::vec;
  const double lo = std::fabs(p.kappa1 - p.kappa2);
  const double hi = p.kappa1 + p.kappa2;
  const V k2 = L::mul(k, k);
  const V t1 = L::sub(L::splat(hi * hi), k2);
  const V t2 = L::sub(k2, L::splat(lo * lo));
  const V d1 = L::splat(p.kappa1 * p.kappa1 - p.kappa2 * p.kappa2);

  Triangle<L> t;
  t.sixteen_a2 = L::mul(t1, t2);
  t.delta1 = vm::acos_v<L>(
      L::div(L::add(k2, d1), L::mul(L::splat(2.0 * p.kappa1), k)));
  t.delta2 = vm::acos_v<L>(
      L::div(L::sub(k2, d1), L::mul(L::splat(2.0 * p.kappa2), k)));
  t.inside = L::logical_and(L::gt(k, L::splat(p.kmin)),
                            L::lt(k, L::splat(p.kmax)));
  return t;
}

template <class L>
typename L::vec density_element(const DensityParams& p, typename L::vec k) {
  using V = typename L::vec;
  const Triangle<L> t = triangle_block<L>(p, k);
  const V phi = L::fma(L::splat(p.m1), t.delta1,
                       L::mul(L::splat(p.m2), t.delta2));
  V s2, c2;
  vm::sincos_v<L>(L::add(phi, phi), s2, c2);
  // The bracket is a squared magnitude; rounding can push a fully
  // destructive configuration a few ulp below zero.
  const V bracket =
      L::max(L::fma(L::splat(p.c_coef), s2,
                    L::fma(L::splat(p.b_coef), c2, L::splat(p.a_coef))),
             L::splat(0.0));
  const double cenv = 4.0 * (p.kappa1 * p.kappa2) * (p.kappa1 * p.kappa2);
  const V val = L::div(L::mul(L::splat(cenv), bracket), t.sixteen_a2);
  return L::select(t.inside, val, L::splat(0.0));
}

template <class L>
typename L::vec cos_phase_element(const PhaseParams& p, typename L::vec k) {
  using V = typename L::vec;
  const Triangle<L> t = triangle_block<L>(p, k);
  const V phi = L::fma(L::splat(p.m1), t.delta1,
                       L::mul(L::splat(p.m2), t.delta2));
  V s, c;
  vm::sincos_v<L>(L::add(phi, L::splat(p.phase_offset)), s, c);
  return L::select(t.inside, c, L::splat(0.0));
}

template <class L, class P, class F>
void run_batch(const P& p, const double* in, double* out, std::size_t n,
               F element) {
  constexpr int w = L::width;
  std::size_t i = 0;
  for (; i + w <= n; i += w) {
    L::store(out + i, element(p, L::load(in + i)));
  }
  if (i < n) {
    // Padding value 0 falls outside (kmin, kmax), so the masked lanes are
    // inert.
    double tin[w] = {0.0};
    double tout[w];
    std::memcpy(tin, in + i, (n - i) * sizeof(double));
    L::store(tout, element(p, L::load(tin)));
    std::memcpy(out + i, tout, (n - i) * sizeof(double));
  }
}

template <class L>
void density_batch_impl(const DensityParams& p, const double* kperp,
                        double* out, std::size_t n) {
  run_batch<L>(p, kperp, out, n,
               [](const DensityParams& q, typename L::vec k) {
                 return density_element<L>(q, k);
               });
}

template <class L>
void cos_phase_batch_impl(const PhaseParams& p, const double* kperp,
                          double* out, std::size_t n) {
  run_batch<L>(p, kperp, out, n,
               [](const PhaseParams& q, typename L::vec k) {
                 return cos_phase_element<L>(q, k);
               });
}

}  // namespace twistkin::kern::detail
