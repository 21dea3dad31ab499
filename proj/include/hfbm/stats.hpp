#pragma once

#include <span>
#include <vector>

namespace hfbm::stats {

double normal_cdf(double x);
// Inverse of normal_cdf (GSL, Wichura AS241); +-inf at 0 and 1.
double normal_quantile(double p);
// P(X > x) for X ~ chi^2 with dof degrees of freedom.
double chisq_sf(double x, double dof);

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments moments(std::span<const double> x);
double covariance(std::span<const double> x, std::span<const double> y);  // unbiased

// Kolmogorov-Smirnov distance between the sample and U(0, 1).
double ks_uniform(std::vector<double> x);

// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hfbm::stats
