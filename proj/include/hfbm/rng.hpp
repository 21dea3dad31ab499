#pragma once

// Counter-based generator. A stream is identified by (seed, stream id); the
// n-th draw of a stream is a pure function of (seed, stream, n), so work can
// be split across threads without changing the output.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace hfbm {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for replication `rep` of study/cell `id`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id,
                                    std::uint64_t rep) noexcept {
  return mix64(mix64(seed ^ mix64(id)) + rep);
}

constexpr std::uint64_t hash_label(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream))) {}

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + (ctr_++) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on (0, 1): never returns 0, safe for log().
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller; both values of a pair are used.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hfbm
