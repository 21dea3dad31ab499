#include <cmath>
#include <vector>

#include "doctest.h"
#include "hfbm/errors.hpp"
#include "hfbm/stats.hpp"

using namespace hfbm;

TEST_CASE("normal cdf and quantile against reference values") {
  CHECK(stats::normal_cdf(0.0) == 0.5);
  CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-15));
  CHECK(stats::normal_cdf(-3.0) == doctest::Approx(1.3498980316300946e-3).epsilon(1e-13));
  CHECK(stats::normal_cdf(-10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(stats::normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-14));
  CHECK(stats::normal_quantile(0.001) == doctest::Approx(-3.090232306167813).epsilon(1e-14));
  CHECK(stats::normal_quantile(1e-12) == doctest::Approx(-7.034483825301131).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.5) == 0.0);
  CHECK(std::isinf(stats::normal_quantile(0.0)));
  CHECK_THROWS_AS(stats::normal_quantile(1.5), InvalidArgument);
  for (double p = 0.001; p < 1.0; p += 0.0137)
    CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("chi-square survival function closed forms") {
  for (double x : {0.1, 1.0, 3.7, 12.0}) {
    CHECK(stats::chisq_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
    CHECK(stats::chisq_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2))).epsilon(1e-12));
    CHECK(stats::chisq_sf(x, 4) == doctest::Approx(std::exp(-x / 2) * (1 + x / 2)).epsilon(1e-12));
  }
  CHECK(stats::chisq_sf(0.0, 3) == 1.0);
  CHECK(stats::chisq_sf(-1.0, 3) == 1.0);
}

TEST_CASE("sample moments") {
  const std::vector<double> x{1, 2, 3, 4, 10};
  const auto m = stats::moments(x);
  CHECK(m.count == 5);
  CHECK(m.mean == doctest::Approx(4.0));
  CHECK(m.variance == doctest::Approx(12.5));
  // population moments: m2 = 10, m3 = 36, m4 = 278.8
  CHECK(m.skewness == doctest::Approx(36.0 / std::pow(10.0, 1.5)));
  CHECK(m.excess_kurtosis == doctest::Approx(278.8 / 100.0 - 3.0));
  const std::vector<double> c(7, 2.5);
  const auto mc = stats::moments(c);
  CHECK(mc.variance == 0.0);
  CHECK(mc.skewness == 0.0);
  CHECK(stats::moments(std::vector<double>{}).count == 0);
  const std::vector<double> y{2, 4, 6, 8, 20};
  CHECK(stats::covariance(x, y) == doctest::Approx(25.0));
}

TEST_CASE("KS distance and OLS slope") {
  CHECK(stats::ks_uniform({0.5}) == doctest::Approx(0.5));
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  CHECK(stats::ks_uniform(grid) == doctest::Approx(0.005));
  CHECK(stats::ks_uniform({0.1, 0.2, 0.3}) == doctest::Approx(0.7));
  const std::vector<double> xs{1, 2, 3, 4}, ys{3, 5, 7, 9};
  CHECK(stats::ols_slope(xs, ys) == doctest::Approx(2.0));
}
