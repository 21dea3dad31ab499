#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "hfbm/estimate.hpp"
#include "hfbm/model.hpp"
#include "json.hpp"

namespace hfbm {

// Exponents and time-domain increment correlations feeding the wavelet
// correlation function. rho here is the lag-0 correlation of the increments,
// which is what the Pearson estimate of the difference series targets.
struct CorrelationParams {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd rho;

  int m() const { return static_cast<int>(alpha.rows()); }
};

CorrelationParams theoretical_params(const HfBmModel& model);
// Plug-in parameters. alpha_hat is clamped to [1e-3, 2 - 1e-3], the range in
// which |t|^alpha kernels give positive normalisers.
CorrelationParams plugin_params(const ScalingEstimate& est);

enum class Coupling {
  Full,
  Impulse,  // coefficients treated as uncorrelated except with themselves
};

namespace detail {
struct Cascade;
}

// r_{q1q2}(j,k; j',k') for the valid-mode pyramid of a length-n series,
// together with the lag-collapsed sums used by the covariance formulas.
// Immutable after construction; safe to share between threads.
class WaveletCorrelation {
 public:
  WaveletCorrelation(CorrelationParams params, int j1, int j2, std::size_t n,
                     Coupling coupling = Coupling::Full);

  // Correlation between d_q1 at octave j, time index k, and d_q2 at octave
  // jp, time index kp (positions 2^j k + c_j and 2^jp kp + c_jp).
  double r(int q1, int q2, int j, long k, int jp, long kp) const;

  // r_{q1q2}(j, 0; j, 0)
  double self_corr(int q1, int q2, int j) const;

  int j1() const { return j1_; }
  int j2() const { return j2_; }
  std::size_t n() const { return n_; }
  std::size_t count(int j) const;
  const CorrelationParams& params() const { return params_; }
  Coupling coupling() const { return coupling_; }

  struct Terms {
    double term1 = 0.0;  // variance of each coefficient
    double term2 = 0.0;  // same octave, different position
    double term3 = 0.0;  // different octaves

    double total() const { return term1 + term2 + term3; }
  };

  // Cov(alpha_hat_{q1q2}, alpha_hat_{q3q4}), split into its three parts.
  Terms cov_terms(int q1, int q2, int q3, int q4, const RegressionWeights& w) const;
  double cov(int q1, int q2, int q3, int q4, const RegressionWeights& w) const {
    return cov_terms(q1, q2, q3, q4, w).total();
  }

  // Raw kernel -sum_u x_{jj'}(u) |delta - u|^alpha, evaluated directly.
  double kernel(int j, int jp, double alpha, long delta) const;

 private:
  int kernel_index(int a, int b) const;
  double diag_norm(int kid, int j) const;

  CorrelationParams params_;
  int j1_;
  int j2_;
  std::size_t n_;
  Coupling coupling_;
  std::shared_ptr<const detail::Cascade> cascade_;
  int nk_ = 0;  // number of distinct kernels, m(m+1)/2
  // Per block (j <= jp, row-major over octave pairs): Gram matrices of the
  // kernel vectors weighted by lag multiplicity. `zero` holds the lag-0
  // contribution of same-octave blocks, `rest` everything else.
  std::vector<std::vector<double>> gram_zero_;
  std::vector<std::vector<double>> gram_rest_;
  std::vector<double> diag_;  // KN_{jj}(0) per (kernel, octave)
};

struct PairIndex {
  int q1;
  int q2;
};

struct CovEntry {
  PairIndex a;
  PairIndex b;
  double value;
  std::optional<WaveletCorrelation::Terms> terms;
};

struct EstimatorCovariance {
  int m = 0;
  Eigen::MatrixXd var_alpha;
  std::vector<CovEntry> cov;  // every unordered pair of (q1 <= q2) index pairs
  Eigen::MatrixXd var_delta;

  std::optional<double> lookup(PairIndex a, PairIndex b) const;
  const CovEntry* entry(PairIndex a, PairIndex b) const;
};

EstimatorCovariance estimator_covariance(const WaveletCorrelation& wc,
                                         const RegressionWeights& w, bool with_terms = false);

// Single covariance entry; builds the correlation tables on the fly.
double cov_alpha(const CorrelationParams& params, int j1, int j2, const RegressionWeights& w,
                 std::size_t n, PairIndex a, PairIndex b);

WaveletCorrelation::Terms term_decomposition(const CorrelationParams& params, int j1, int j2,
                                             const RegressionWeights& w, std::size_t n,
                                             PairIndex a, PairIndex b);

// Linear combination giving Var(delta_hat_{q1q2}) from the stored entries.
// Throws InvalidArgument if a constituent is missing.
double var_delta(const EstimatorCovariance& cov, int q1, int q2);

enum class FirstOrder { VarAlphaAuto, VarAlphaCross, CovAutoAuto, CovAutoCross, VarDelta };

// Leading-order forms ignoring intra- and inter-scale correlation. The pair
// (q1, q2) selects r = r_{q1q2}(j,0;j,0); VarAlphaAuto uses q1 only. Throws
// InfiniteVariance when r = 0 in a 1/r^2 form.
double first_order(const CorrelationParams& params, int j1, int j2, const RegressionWeights& w,
                   std::size_t n, FirstOrder which, int q1 = 0, int q2 = 1);

struct PluginReport {
  EstimatorCovariance cov;
  double level = 0.95;
  Eigen::MatrixXd alpha_lo, alpha_hi;
  Eigen::MatrixXd delta_lo, delta_hi;

  nlohmann::json to_json() const;
};

// Evaluates the covariance model at (alpha_hat, rho_hat) and attaches
// Gaussian confidence intervals at the given level. Throws InfiniteVariance
// when an off-diagonal |rho_hat| is below 1e-6.
PluginReport plugin_covariance(const ScalingEstimate& est, const RegressionWeights& w,
                               double level = 0.95);

nlohmann::json covariance_to_json(const EstimatorCovariance& cov);

}  // namespace hfbm
