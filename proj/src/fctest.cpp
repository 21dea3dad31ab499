#include "hfbm/fctest.hpp"

#include <algorithm>
#include <cmath>

#include "hfbm/errors.hpp"
#include "hfbm/stats.hpp"

namespace hfbm {

std::string to_string(TestMethod m) { return m == TestMethod::Hfbm ? "hfbm" : "wcf"; }

nlohmann::json TestReport::to_json() const {
  nlohmann::json j{{"pair", {q1 + 1, q2 + 1}},
                   {"method", to_string(method)},
                   {"stat", statistic},
                   {"p", p_value},
                   {"s", s},
                   {"decision", reject ? "reject" : "keep"}};
  if (method == TestMethod::Hfbm) j["variance"] = variance_used;
  return j;
}

namespace {
void check_level(double s) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("significance must lie in (0,1)");
}
}  // namespace

TestReport hfbm_test(double delta_hat, double var_delta, double s, int q1, int q2) {
  check_level(s);
  if (!(var_delta > 0.0) || !std::isfinite(var_delta)) {
    throw InvalidVariance("Var(delta_hat) must be positive and finite, got " +
                          std::to_string(var_delta));
  }
  TestReport r;
  r.q1 = q1;
  r.q2 = q2;
  r.method = TestMethod::Hfbm;
  r.statistic = delta_hat;
  r.variance_used = var_delta;
  r.s = s;
  r.p_value = std::clamp(2.0 * stats::normal_cdf(-std::abs(delta_hat) / std::sqrt(var_delta)),
                         0.0, 1.0);
  // |delta| > sqrt(var) z_{1-s/2} and p < s are the same event; deciding on p
  // keeps the two formulations in exact agreement.
  r.reject = r.p_value < s;
  return r;
}

TestReport wcf_test(const WaveletPyramid& pyr, int q1, int q2, int j1, int j2, double s) {
  check_level(s);
  if (j1 < pyr.j1 || j2 > pyr.j2 || j2 <= j1) {
    throw InvalidArgument("WCF octave range must lie inside the pyramid and span two octaves");
  }
  const auto s12 = wavelet_variance(pyr, q1, q2);
  const auto s11 = wavelet_variance(pyr, q1, q1);
  const auto s22 = wavelet_variance(pyr, q2, q2);
  std::vector<double> z, v;
  for (int j = j1; j <= j2; ++j) {
    const std::size_t nj = pyr.count(j);
    if (nj <= 3) {
      throw SeriesTooShort("WCF needs more than 3 coefficients at octave " + std::to_string(j));
    }
    const std::size_t i = static_cast<std::size_t>(j - pyr.j1);
    const double den = std::sqrt(s11[i] * s22[i]);
    const double gamma = den > 0.0 ? s12[i] / den : 1.0;
    if (!(std::abs(gamma) < 1.0)) {
      throw DegenerateCoherence("wavelet coherence is +-1 at octave " + std::to_string(j));
    }
    z.push_back(std::atanh(gamma));
    v.push_back(1.0 / static_cast<double>(nj - 3));
  }
  double zw = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zw += z[i] / v[i];
    wsum += 1.0 / v[i];
  }
  const double zbar = zw / wsum;
  double T = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) T += (z[i] - zbar) * (z[i] - zbar) / v[i];

  TestReport r;
  r.q1 = q1;
  r.q2 = q2;
  r.method = TestMethod::Wcf;
  r.statistic = T;
  r.s = s;
  r.p_value = stats::chisq_sf(T, static_cast<double>(z.size() - 1));
  r.reject = r.p_value < s;
  return r;
}

AdjustedSignificance adjust_significance(std::vector<double> p, double target) {
  if (p.size() < 50) {
    throw InvalidArgument("adjusting the significance needs at least 50 H0 replications, got " +
                          std::to_string(p.size()));
  }
  if (!(target > 0.0 && target < 1.0)) throw InvalidArgument("target rate must be in (0,1)");
  std::sort(p.begin(), p.end());
  const std::size_t R = p.size();
  const auto k = static_cast<std::size_t>(std::lround(target * static_cast<double>(R)));
  AdjustedSignificance out;
  // Reject iff p < s_tilde: put s_tilde between the k-th and (k+1)-th
  // smallest p-values so that exactly k of them fall below it.
  if (k == 0) {
    out.s_tilde = p[0];
  } else if (k >= R) {
    out.s_tilde = std::nextafter(p[R - 1], 2.0);
  } else {
    out.s_tilde = p[k - 1] < p[k] ? 0.5 * (p[k - 1] + p[k]) : p[k];
  }
  const auto below = std::lower_bound(p.begin(), p.end(), out.s_tilde) - p.begin();
  out.achieved_size = static_cast<double>(below) / static_cast<double>(R);
  return out;
}

}  // namespace hfbm
