#pragma once

#include <complex>
#include <cstddef>

namespace hfbm::fft {

enum class Direction { Forward, Backward };

// Unnormalised in-place complex DFT of length n. Forward uses e^{-2 pi i},
// backward e^{+2 pi i}. Plans are cached per (n, direction) and shared
// between threads.
void transform(std::complex<double>* data, std::size_t n, Direction dir);

}  // namespace hfbm::fft
