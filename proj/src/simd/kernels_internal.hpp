#pragma once

#include <cstddef>

namespace hfbm::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void polyphase_analysis_scalar(const double* even, const double* odd, std::size_t out_n,
                               const double* lo, const double* hi, std::size_t taps,
                               double* approx, double* detail);
void strided_correlate_scalar(const double* taps, std::size_t taps_n, const double* signal,
                              std::size_t stride, std::size_t count, double* out);

#if defined(HFBM_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void polyphase_analysis_avx2(const double* even, const double* odd, std::size_t out_n,
                             const double* lo, const double* hi, std::size_t taps,
                             double* approx, double* detail);
void strided_correlate_avx2(const double* taps, std::size_t taps_n, const double* signal,
                            std::size_t stride, std::size_t count, double* out);
#endif

}  // namespace hfbm::simd::detail
