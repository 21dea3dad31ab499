#include "kernels_internal.hpp"

namespace hfbm::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void polyphase_analysis_scalar(const double* even, const double* odd, std::size_t out_n,
                               const double* lo, const double* hi, std::size_t taps,
                               double* approx, double* detail) {
  for (std::size_t k = 0; k < out_n; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t l = 0; l < taps; ++l) {
      const std::size_t idx = 2 * k + taps - 1 - l;
      const double x = (idx & 1u) ? odd[idx >> 1] : even[idx >> 1];
      a += lo[l] * x;
      d += hi[l] * x;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

void strided_correlate_scalar(const double* taps, std::size_t taps_n, const double* signal,
                              std::size_t stride, std::size_t count, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = dot_scalar(taps, signal + i * stride, taps_n);
  }
}

}  // namespace hfbm::simd::detail
