#include "hfbm/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "hfbm/errors.hpp"

namespace hfbm {

namespace {
constexpr double kDegenerateRatio = 1e-20;

nlohmann::json mat(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}
}  // namespace

Weighting weighting_from_string(const std::string& s) {
  if (s == "uniform") return Weighting::Uniform;
  if (s == "by_count") return Weighting::ByCount;
  throw InvalidArgument("unknown weighting '" + s + "' (uniform|by_count)");
}

std::string to_string(Weighting w) { return w == Weighting::Uniform ? "uniform" : "by_count"; }

RegressionWeights regression_weights(int j1, int j2, Weighting weighting, std::size_t n) {
  if (j2 <= j1) throw InvalidArgument("regression needs j2 > j1");
  if (weighting == Weighting::ByCount && n == 0) {
    throw InvalidArgument("by_count weighting needs the series length");
  }
  const auto J = static_cast<std::size_t>(j2 - j1 + 1);
  std::vector<double> b(J, 1.0);
  if (weighting == Weighting::ByCount) {
    for (int j = j1; j <= j2; ++j) {
      b[j - j1] = static_cast<double>(detail_count(n, j));
      if (b[j - j1] <= 0.0) throw SeriesTooShort("no coefficients at octave " + std::to_string(j));
    }
  }
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int j = j1; j <= j2; ++j) {
    const double bj = b[j - j1];
    s0 += bj;
    s1 += bj * j;
    s2 += bj * j * j;
  }
  const double det = s0 * s2 - s1 * s1;
  RegressionWeights rw{j1, j2, std::vector<double>(J)};
  for (int j = j1; j <= j2; ++j) rw.w[j - j1] = b[j - j1] * (s0 * j - s1) / det;
  return rw;
}

nlohmann::json ScalingEstimate::to_json() const {
  return {{"alpha", mat(alpha)}, {"delta", mat(delta)}, {"rho", mat(rho)},
          {"j1", j1},           {"j2", j2},            {"n", n}};
}

ScalingEstimate estimate_alpha(const WaveletPyramid& pyr, const RegressionWeights& weights) {
  if (weights.j1 < pyr.j1 || weights.j2 > pyr.j2) {
    throw InvalidArgument("regression range exceeds the pyramid octaves");
  }
  ScalingEstimate est;
  est.m = pyr.m;
  est.n = pyr.n;
  est.j1 = weights.j1;
  est.j2 = weights.j2;
  est.alpha = Eigen::MatrixXd::Zero(pyr.m, pyr.m);
  est.delta = Eigen::MatrixXd::Zero(pyr.m, pyr.m);
  est.rho = Eigen::MatrixXd::Identity(pyr.m, pyr.m);
  for (int q1 = 0; q1 < pyr.m; ++q1) {
    for (int q2 = q1; q2 < pyr.m; ++q2) {
      const std::vector<double> S = wavelet_variance(pyr, q1, q2);
      const double ref = std::sqrt(pyr.power[q1] * pyr.power[q2]);
      double a = 0.0;
      for (int j = weights.j1; j <= weights.j2; ++j) {
        const double s = std::abs(S[j - pyr.j1]);
        if (ref == 0.0 || s == 0.0 || s <= kDegenerateRatio * ref) {
          throw DegenerateVariance("wavelet variance of pair (" + std::to_string(q1 + 1) + "," +
                                   std::to_string(q2 + 1) + ") vanishes at octave " +
                                   std::to_string(j));
        }
        a += weights.at(j) * std::log2(s);
      }
      est.alpha(q1, q2) = a;
      est.alpha(q2, q1) = a;
    }
  }
  return est;
}

ScalingEstimate estimate_delta(ScalingEstimate est) {
  est.delta.resize(est.m, est.m);
  for (int a = 0; a < est.m; ++a) {
    for (int b = 0; b < est.m; ++b) {
      est.delta(a, b) =
          a == b ? 0.0 : 0.5 * (est.alpha(a, a) + est.alpha(b, b)) - est.alpha(a, b);
    }
  }
  return est;
}

Eigen::MatrixXd estimate_rho(const MultiPath& path) {
  const std::size_t n = path.n();
  if (n < 3) throw SeriesTooShort("correlation needs at least 3 samples");
  const int m = path.m();
  const Eigen::Index len = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd dx(m, len);
  for (int q = 0; q < m; ++q) {
    dx.row(q) = path.data.row(q).tail(len) - path.data.row(q).head(len);
    dx.row(q).array() -= dx.row(q).mean();
  }
  Eigen::VectorXd ss(m);
  for (int q = 0; q < m; ++q) {
    ss(q) = dx.row(q).squaredNorm();
    if (!(ss(q) > 0.0)) {
      throw DegenerateInput("component " + std::to_string(q + 1) + " has constant increments");
    }
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double v =
          std::clamp(dx.row(a).dot(dx.row(b)) / std::sqrt(ss(a) * ss(b)), -1.0, 1.0);
      r(a, b) = v;
      r(b, a) = v;
    }
  }
  return r;
}

ScalingEstimate estimate_all(const MultiPath& path, const WaveletPyramid& pyr,
                             const RegressionWeights& weights) {
  ScalingEstimate est = estimate_delta(estimate_alpha(pyr, weights));
  est.rho = estimate_rho(path);
  return est;
}

}  // namespace hfbm
