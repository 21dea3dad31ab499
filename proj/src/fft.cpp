#include "hfbm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace hfbm::fft {

namespace {

std::mutex g_mu;

fftw_plan plan_for(std::size_t n, Direction dir) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::lock_guard<std::mutex> lock(g_mu);
  auto key = std::make_pair(n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  // FFTW_ESTIMATE leaves the scratch buffer untouched, so any buffer works.
  std::vector<std::complex<double>> scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void transform(std::complex<double>* data, std::size_t n, Direction dir) {
  if (n <= 1) return;
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(n, dir), p, p);
}

}  // namespace hfbm::fft
