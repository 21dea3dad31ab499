#pragma once

#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include "hfbm/synth.hpp"

namespace hfbm {

struct FilterBank {
  std::vector<double> h;  // low-pass
  std::vector<double> g;  // high-pass, g[k] = (-1)^k h[L-1-k]
  int n_vanishing = 2;

  std::size_t taps() const { return h.size(); }
};

// Only N_psi = 2 (4 taps) is available; other orders throw UnsupportedWavelet.
FilterBank build_filters(int n_vanishing = 2);

// Coefficients left after j valid-mode filter/decimate steps on n samples.
std::size_t detail_count(std::size_t n, int j, std::size_t taps = 4);

// (3, floor(log2 n) - N_psi)
std::pair<int, int> default_octaves(std::size_t n, int n_vanishing = 2);

struct WaveletPyramid {
  int m = 0;
  std::size_t n = 0;
  int j1 = 1;
  int j2 = 1;
  // details[j - j1][q] holds d_q(j, k), k < count(j), scaled by 2^{-j/2}.
  std::vector<std::vector<std::vector<double>>> details;
  std::vector<std::size_t> counts;
  // Mean square of each component's first differences, the reference level
  // for deciding that a wavelet variance is numerically zero.
  std::vector<double> power;

  const std::vector<double>& detail(int j, int q) const { return details[j - j1][q]; }
  std::size_t count(int j) const { return counts[j - j1]; }
  int octaves() const { return j2 - j1 + 1; }
};

// Decimated Mallat pyramid with a_q(0, k) = X_q(k), valid convolutions only.
// Requires 1 <= j1 <= j2 and n >= 2^j2 * taps (SeriesTooShort otherwise).
WaveletPyramid transform(const MultiPath& path, int j1, int j2,
                         const FilterBank& fb = build_filters());

// S^{(q1 q2)}(2^j) = mean_k d_q1(j,k) d_q2(j,k), indexed by j - j1.
std::vector<double> wavelet_variance(const WaveletPyramid& pyr, int q1, int q2);

void write_pyramid_csv(const WaveletPyramid& pyr, std::ostream& os);

}  // namespace hfbm
