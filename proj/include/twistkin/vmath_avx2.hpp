#pragma once

// AVX2 + FMA lane. Only include from a translation unit compiled with
// -mavx2 -mfma; everything here mirrors ScalarLane operation for operation.

#include <immintrin.h>

namespace twistkin::vm {

struct Avx2Lane {
  static constexpr int width = 4;
  struct vec {
    __m256d v;
  };
  struct mask {
    __m256d m;
  };

  static vec splat(double x) { return {_mm256_set1_pd(x)}; }
  static vec load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void store(double* p, vec a) { _mm256_storeu_pd(p, a.v); }

  static vec add(vec a, vec b) { return {_mm256_add_pd(a.v, b.v)}; }
  static vec sub(vec a, vec b) { return {_mm256_sub_pd(a.v, b.v)}; }
  static vec mul(vec a, vec b) { return {_mm256_mul_pd(a.v, b.v)}; }
  static vec div(vec a, vec b) { return {_mm256_div_pd(a.v, b.v)}; }
  static vec sqrt(vec a) { return {_mm256_sqrt_pd(a.v)}; }
  static vec fma(vec a, vec b, vec c) {
    return {_mm256_fmadd_pd(a.v, b.v, c.v)};
  }
  static vec neg(vec a) {
    return {_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))};
  }
  static vec abs(vec a) {
    return {_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v)};
  }
  static vec round_ne(vec a) {
    return {_mm256_round_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
  }
  static vec floor(vec a) { return {_mm256_floor_pd(a.v)}; }
  static vec min(vec a, vec b) { return {_mm256_min_pd(a.v, b.v)}; }
  static vec max(vec a, vec b) { return {_mm256_max_pd(a.v, b.v)}; }

  static mask lt(vec a, vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
  static mask le(vec a, vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ)}; }
  static mask gt(vec a, vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
  static mask ge(vec a, vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }
  static mask eq(vec a, vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ)}; }
  static mask logical_and(mask a, mask b) { return {_mm256_and_pd(a.m, b.m)}; }
  static mask logical_or(mask a, mask b) { return {_mm256_or_pd(a.m, b.m)}; }
  static vec select(mask m, vec a, vec b) {
    return {_mm256_blendv_pd(b.v, a.v, m.m)};
  }
};

}  // namespace twistkin::vm
