#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hfbm/parallel.hpp"
#include "hfbm/rng.hpp"

using namespace hfbm;

TEST_CASE("counter RNG streams are pure functions of (seed, stream)") {
  CounterRng a(5, 7), b(5, 7), c(5, 8), d(6, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(hash_label("abc") != hash_label("abd"));
  static_assert(hash_label("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("normal draws have the right first moments") {
  CounterRng rng(42, 0);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0, umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
  }
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
}

TEST_CASE("parallel_for visits every index once") {
  for (std::size_t threads : {1u, 2u, 5u}) {
    set_thread_count(threads);
    CHECK(thread_count() == threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  set_thread_count(0);
  CHECK(thread_count() >= 1);
  parallel_for(0, [](std::size_t) { FAIL("no iterations expected"); });
}

TEST_CASE("parallel_for rethrows after joining") {
  set_thread_count(3);
  std::atomic<int> done{0};
  CHECK_THROWS_AS(parallel_for(100,
                               [&](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                                 done++;
                               }),
                  std::runtime_error);
  // nested loops run serially on the worker
  std::vector<int> grid(6 * 6, 0);
  parallel_for(6, [&](std::size_t i) { parallel_for(6, [&](std::size_t j) { grid[i * 6 + j]++; }); });
  for (int g : grid) CHECK(g == 1);
  set_thread_count(0);
}

TEST_CASE("HFBM_THREADS is the fallback worker count") {
  set_thread_count(0);
  ::setenv("HFBM_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  ::unsetenv("HFBM_THREADS");
  set_thread_count(2);
  CHECK(thread_count() == 2);
  set_thread_count(0);
}
