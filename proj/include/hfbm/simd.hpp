#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version. The active table is chosen once at startup
// from CPUID; HFBM_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace hfbm::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // Two-channel polyphase analysis step. With the input split into its even
  // and odd samples, computes for k < out_n
  //   approx[k] = sum_l lo[l] * x[2k + taps - 1 - l]
  //   detail[k] = sum_l hi[l] * x[2k + taps - 1 - l]
  // where x[2i] = even[i] and x[2i + 1] = odd[i].
  void (*polyphase_analysis)(const double* even, const double* odd, std::size_t out_n,
                             const double* lo, const double* hi, std::size_t taps,
                             double* approx, double* detail);

  // out[i] = sum_u taps[u] * signal[offset + i * stride + u] for i < count.
  // Batched sliding dot product used for lag-kernel evaluation.
  void (*strided_correlate)(const double* taps, std::size_t taps_n, const double* signal,
                            std::size_t stride, std::size_t count, double* out);
};

const KernelTable& scalar_kernels();
bool isa_available(Isa isa);
const KernelTable& kernels_for(Isa isa);

// Table selected for this process.
const KernelTable& kernels();

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace hfbm::simd
