// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace hfbm::simd::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  const __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void polyphase_analysis_avx2(const double* even, const double* odd, std::size_t out_n,
                             const double* lo, const double* hi, std::size_t taps,
                             double* approx, double* detail) {
  std::size_t k = 0;
  for (; k + 4 <= out_n; k += 4) {
    __m256d a = _mm256_setzero_pd();
    __m256d d = _mm256_setzero_pd();
    for (std::size_t l = 0; l < taps; ++l) {
      const std::size_t shift = taps - 1 - l;
      const double* src = (shift & 1u) ? odd : even;
      const __m256d x = _mm256_loadu_pd(src + k + (shift >> 1));
      a = _mm256_fmadd_pd(_mm256_set1_pd(lo[l]), x, a);
      d = _mm256_fmadd_pd(_mm256_set1_pd(hi[l]), x, d);
    }
    _mm256_storeu_pd(approx + k, a);
    _mm256_storeu_pd(detail + k, d);
  }
  if (k < out_n) {
    // Tail: the scalar path indexes from 2k, so offset both phases by k.
    polyphase_analysis_scalar(even + k, odd + k, out_n - k, lo, hi, taps, approx + k,
                              detail + k);
  }
}

void strided_correlate_avx2(const double* taps, std::size_t taps_n, const double* signal,
                            std::size_t stride, std::size_t count, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = dot_avx2(taps, signal + i * stride, taps_n);
  }
}

}  // namespace hfbm::simd::detail
