#include "hfbm/dwt.hpp"

#include <cmath>

#include "hfbm/errors.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/simd.hpp"

namespace hfbm {

FilterBank build_filters(int n_vanishing) {
  if (n_vanishing != 2) {
    throw UnsupportedWavelet("unsupported number of vanishing moments " +
                             std::to_string(n_vanishing) + " (only 2 is available)");
  }
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  FilterBank fb;
  fb.n_vanishing = 2;
  fb.h = {(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm};
  const std::size_t L = fb.h.size();
  fb.g.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    fb.g[k] = (k % 2 ? -1.0 : 1.0) * fb.h[L - 1 - k];
  }
  return fb;
}

std::size_t detail_count(std::size_t n, int j, std::size_t taps) {
  std::size_t len = n;
  for (int i = 0; i < j; ++i) {
    if (len < taps) return 0;
    len = (len - taps) / 2 + 1;
  }
  return len;
}

std::pair<int, int> default_octaves(std::size_t n, int n_vanishing) {
  const int log2n = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
  return {3, log2n - n_vanishing};
}

WaveletPyramid transform(const MultiPath& path, int j1, int j2, const FilterBank& fb) {
  if (j1 < 1 || j2 < j1) {
    throw InvalidArgument("octave range must satisfy 1 <= j1 <= j2");
  }
  const std::size_t n = path.n();
  const std::size_t L = fb.taps();
  if (static_cast<double>(n) < std::ldexp(static_cast<double>(L), j2)) {
    throw SeriesTooShort("series of length " + std::to_string(n) + " too short for j2=" +
                         std::to_string(j2) + " (need at least 2^j2 * " + std::to_string(L) +
                         ")");
  }
  WaveletPyramid pyr;
  pyr.m = path.m();
  pyr.n = n;
  pyr.j1 = j1;
  pyr.j2 = j2;
  pyr.details.assign(static_cast<std::size_t>(j2 - j1 + 1),
                     std::vector<std::vector<double>>(static_cast<std::size_t>(pyr.m)));
  pyr.counts.resize(static_cast<std::size_t>(j2 - j1 + 1));
  for (int j = j1; j <= j2; ++j) pyr.counts[j - j1] = detail_count(n, j, L);
  pyr.power.assign(static_cast<std::size_t>(pyr.m), 0.0);

  const auto& kern = simd::kernels();
  parallel_for(static_cast<std::size_t>(pyr.m), [&](std::size_t q) {
    const auto row = path.data.row(static_cast<Eigen::Index>(q));
    double pw = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      const double d = row(static_cast<Eigen::Index>(t)) - row(static_cast<Eigen::Index>(t - 1));
      pw += d * d;
    }
    pyr.power[q] = n > 1 ? pw / static_cast<double>(n - 1) : 0.0;

    std::vector<double> even((n + 1) / 2);
    std::vector<double> odd(n / 2);
    for (std::size_t t = 0; t < n; ++t) {
      (t % 2 ? odd[t / 2] : even[t / 2]) = row(static_cast<Eigen::Index>(t));
    }
    std::vector<double> approx;
    std::vector<double> detail;
    std::size_t len = n;
    for (int j = 1; j <= j2; ++j) {
      const std::size_t out_n = (len - L) / 2 + 1;
      approx.resize(out_n);
      detail.resize(out_n);
      kern.polyphase_analysis(even.data(), odd.data(), out_n, fb.h.data(), fb.g.data(), L,
                              approx.data(), detail.data());
      if (j >= j1) {
        const double scale = std::pow(2.0, -0.5 * j);
        auto& dst = pyr.details[j - j1][q];
        dst.resize(out_n);
        for (std::size_t k = 0; k < out_n; ++k) dst[k] = detail[k] * scale;
      }
      len = out_n;
      even.resize((len + 1) / 2);
      odd.resize(len / 2);
      for (std::size_t t = 0; t < len; ++t) (t % 2 ? odd[t / 2] : even[t / 2]) = approx[t];
    }
  });
  return pyr;
}

std::vector<double> wavelet_variance(const WaveletPyramid& pyr, int q1, int q2) {
  if (q1 < 0 || q2 < 0 || q1 >= pyr.m || q2 >= pyr.m) {
    throw InvalidArgument("component index out of range");
  }
  // Symmetric in (q1, q2) bit for bit: order the operands canonically.
  if (q2 < q1) std::swap(q1, q2);
  std::vector<double> s(static_cast<std::size_t>(pyr.octaves()));
  for (int j = pyr.j1; j <= pyr.j2; ++j) {
    const auto& a = pyr.detail(j, q1);
    const auto& b = pyr.detail(j, q2);
    s[j - pyr.j1] = simd::dot(a, b) / static_cast<double>(pyr.count(j));
  }
  return s;
}

void write_pyramid_csv(const WaveletPyramid& pyr, std::ostream& os) {
  os << "j,q,k,d\n";
  os.precision(17);
  for (int j = pyr.j1; j <= pyr.j2; ++j) {
    for (int q = 0; q < pyr.m; ++q) {
      const auto& d = pyr.detail(j, q);
      for (std::size_t k = 0; k < d.size(); ++k) os << j << ',' << q << ',' << k << ',' << d[k] << '\n';
    }
  }
}

}  // namespace hfbm
