#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hfbm/dwt.hpp"
#include "json.hpp"

namespace hfbm {

enum class Weighting { Uniform, ByCount };

Weighting weighting_from_string(const std::string& s);
std::string to_string(Weighting w);

struct RegressionWeights {
  int j1 = 1;
  int j2 = 2;
  std::vector<double> w;  // w[j - j1]

  double at(int j) const { return w[j - j1]; }
};

// Weights of the (weighted) least-squares slope over octaves j1..j2:
// sum w = 0 and sum j w = 1. ByCount weights octave j by n_j, which needs
// the series length n.
RegressionWeights regression_weights(int j1, int j2, Weighting weighting, std::size_t n = 0);

struct ScalingEstimate {
  int m = 0;
  std::size_t n = 0;
  int j1 = 0;
  int j2 = 0;
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd delta;
  Eigen::MatrixXd rho;

  nlohmann::json to_json() const;
};

// alpha_hat(q1,q2) = sum_j w_j log2 |S^{(q1 q2)}(2^j)|. Leaves delta at 0 and
// rho at the identity. Throws DegenerateVariance when some |S| is zero
// relative to the components' increment power.
ScalingEstimate estimate_alpha(const WaveletPyramid& pyr, const RegressionWeights& weights);

ScalingEstimate estimate_delta(ScalingEstimate est);

// Pearson correlation of first differences. Throws DegenerateInput when a
// difference series has zero variance.
Eigen::MatrixXd estimate_rho(const MultiPath& path);

// estimate_alpha + estimate_delta + estimate_rho.
ScalingEstimate estimate_all(const MultiPath& path, const WaveletPyramid& pyr,
                             const RegressionWeights& weights);

}  // namespace hfbm
