#include <cmath>
#include <vector>

#include "doctest.h"
#include "hfbm/rng.hpp"
#include "hfbm/simd.hpp"

using namespace hfbm;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t stream) {
  CounterRng rng(99, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double close(double a, double b, double scale) { return std::abs(a - b) <= 1e-13 * (scale + 1.0); }

}  // namespace

TEST_CASE("dispatch") {
  CHECK(simd::isa_available(simd::Isa::Scalar));
  CHECK(simd::kernels_for(simd::Isa::Scalar).isa == simd::Isa::Scalar);
  CHECK(&simd::scalar_kernels() == &simd::kernels_for(simd::Isa::Scalar));
  if (!simd::isa_available(simd::Isa::Avx2)) {
    CHECK(simd::kernels_for(simd::Isa::Avx2).isa == simd::Isa::Scalar);
  }
  CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
  MESSAGE("active kernels: " << simd::isa_name(simd::kernels().isa));
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!simd::isa_available(simd::Isa::Avx2)) {
    MESSAGE("AVX2 not available, nothing to compare");
    return;
  }
  const auto& s = simd::scalar_kernels();
  const auto& v = simd::kernels_for(simd::Isa::Avx2);
  REQUIRE(v.isa == simd::Isa::Avx2);

  SUBCASE("dot") {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 1000u, 4099u}) {
      const auto a = noise(n, 1), b = noise(n, 2);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
      CHECK(close(s.dot(a.data(), b.data(), n), v.dot(a.data(), b.data(), n), scale));
    }
  }
  SUBCASE("polyphase analysis") {
    const double lo[4] = {0.48, 0.84, 0.22, -0.13}, hi[4] = {-0.13, -0.22, 0.84, -0.48};
    for (std::size_t len : {4u, 5u, 9u, 16u, 33u, 1000u, 1027u}) {
      const auto x = noise(len, 3);
      std::vector<double> even((len + 1) / 2), odd(len / 2);
      for (std::size_t t = 0; t < len; ++t) (t % 2 ? odd[t / 2] : even[t / 2]) = x[t];
      const std::size_t out_n = (len - 4) / 2 + 1;
      std::vector<double> a1(out_n), d1(out_n), a2(out_n), d2(out_n);
      s.polyphase_analysis(even.data(), odd.data(), out_n, lo, hi, 4, a1.data(), d1.data());
      v.polyphase_analysis(even.data(), odd.data(), out_n, lo, hi, 4, a2.data(), d2.data());
      for (std::size_t k = 0; k < out_n; ++k) {
        CHECK(close(a1[k], a2[k], 4.0));
        CHECK(close(d1[k], d2[k], 4.0));
        double ref = 0.0;
        for (std::size_t l = 0; l < 4; ++l) ref += lo[l] * x[2 * k + 3 - l];
        CHECK(close(a1[k], ref, 4.0));
      }
    }
  }
  SUBCASE("strided correlation") {
    for (std::size_t taps_n : {1u, 3u, 4u, 7u, 22u, 45u}) {
      for (std::size_t stride : {1u, 2u, 8u}) {
        const std::size_t count = 37;
        const auto taps = noise(taps_n, 4);
        const auto sig = noise(taps_n + stride * count, 5);
        std::vector<double> o1(count), o2(count);
        s.strided_correlate(taps.data(), taps_n, sig.data(), stride, count, o1.data());
        v.strided_correlate(taps.data(), taps_n, sig.data(), stride, count, o2.data());
        for (std::size_t i = 0; i < count; ++i) {
          double ref = 0.0;
          for (std::size_t u = 0; u < taps_n; ++u) ref += taps[u] * sig[i * stride + u];
          CHECK(close(o1[i], ref, static_cast<double>(taps_n)));
          CHECK(close(o2[i], ref, static_cast<double>(taps_n)));
        }
      }
    }
  }
}
