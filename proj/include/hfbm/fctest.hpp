#pragma once

#include <string>
#include <vector>

#include "hfbm/dwt.hpp"
#include "json.hpp"

namespace hfbm {

enum class TestMethod { Hfbm, Wcf };

struct TestReport {
  int q1 = 0;
  int q2 = 1;
  TestMethod method = TestMethod::Hfbm;
  double statistic = 0.0;      // delta_hat (HFBM) or chi-square T (WCF)
  double variance_used = 0.0;  // HFBM only
  double s = 0.1;
  bool reject = false;
  double p_value = 1.0;

  nlohmann::json to_json() const;  // pair indices are 1-based
};

// Two-sided Gaussian test of delta = 0. Throws InvalidVariance if var <= 0
// and InvalidArgument unless 0 < s < 1.
TestReport hfbm_test(double delta_hat, double var_delta, double s, int q1 = 0, int q2 = 1);

// Wavelet-coherence baseline: Fisher z of the per-octave coherence, equal
// means tested by a chi-square statistic with J - 1 degrees of freedom.
TestReport wcf_test(const WaveletPyramid& pyr, int q1, int q2, int j1, int j2, double s);

struct AdjustedSignificance {
  double s_tilde = 0.0;
  double achieved_size = 0.0;  // fraction of H0 p-values below s_tilde
};

// Empirical significance level giving rejection rate `target` on H0 p-values.
// Needs at least 50 values.
AdjustedSignificance adjust_significance(std::vector<double> p_values, double target);

std::string to_string(TestMethod m);

}  // namespace hfbm
