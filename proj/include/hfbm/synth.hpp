#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfbm/model.hpp"
#include "json.hpp"

namespace hfbm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// rho_sigma * (|s|^a + |t|^a - |s - t|^a), no 1/2 factor.
double fbm_cross_covariance(double s, double t, double alpha, double rho_sigma);

// Covariance of the increment process X(t) = B(t) - B(t-1):
// cov[tau](q1, q2) = E[X_q1(t + tau) X_q2(t)] for tau = 0 .. lags-1.
// Both supported regularisations give even, symmetric C, so negative lags
// follow from C(-tau) = C(tau)^T = C(tau).
struct IncrementCovariance {
  HfBmModel model;
  std::vector<Eigen::MatrixXd> cov;
  double quadrature_error = 0.0;  // largest absolute error estimate (Gaussian case)

  std::size_t lags() const { return cov.size(); }
};

IncrementCovariance increment_covariance(const HfBmModel& model, std::size_t lags);

// Smallest power of two >= 2(n - 1), at least 2.
std::size_t embedding_length(std::size_t n);

struct SpectralReport {
  std::size_t embedding_length = 0;
  std::vector<double> min_eigenvalue;  // per frequency
  double global_min = 0.0;
  std::size_t argmin_frequency = 0;
  double tolerance = 0.0;
  double hermitian_error = 0.0;  // relative, before the eigensolve
  std::vector<std::size_t> negative_frequencies;  // eigenvalue < -tolerance
  double clipped_mass = 0.0;  // |clipped eigenvalues| / total trace
  bool psd = true;

  nlohmann::json to_json() const;
};

// Diagnostic only: builds the circulant embedding of cov (extending it from
// the stored model when the embedding needs more lags) and reports the
// eigenvalues of every per-frequency spectral matrix.
SpectralReport embed_and_check(const IncrementCovariance& cov);

struct SynthOptions {
  bool clip = true;  // false: throw EmbeddingNotPsd instead of clipping
};

struct MultiPath {
  RowMatrix data;  // m x n, row q holds B_q(1) .. B_q(n)
  std::optional<std::uint64_t> seed;
  std::optional<HfBmModel> model;

  int m() const { return static_cast<int>(data.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(data.cols()); }

  // First differences with B(0) = 0, so increments(q, 0) = B_q(1).
  RowMatrix increments() const;
  static MultiPath from_increments(const RowMatrix& x);
};

// Precomputed square-root factors of the embedded spectral matrices. Build
// once per (model, n) and draw as many seeded paths as needed; draw() is
// const and thread-safe.
class CirculantSynthesizer {
 public:
  CirculantSynthesizer(const HfBmModel& model, std::size_t n, SynthOptions opts = {});

  RowMatrix draw_increments(std::uint64_t seed) const;
  MultiPath draw(std::uint64_t seed) const;

  const SpectralReport& report() const { return report_; }
  std::size_t n() const { return n_; }
  int m() const { return m_; }

 private:
  HfBmModel model_;
  std::size_t n_;
  int m_;
  std::size_t M_;
  std::vector<double> factors_;  // M blocks of m x m, column-major
  SpectralReport report_;
};

MultiPath synthesize(const HfBmModel& model, std::size_t n, std::uint64_t seed,
                     SynthOptions opts = {});

// Path I/O. CSV: header comp_0,...; one row per time step. Binary: "HFBM",
// u32 m, u64 n, then m*n little-endian f64 in row-major (component) order.
void write_csv(const MultiPath& path, const std::string& file);
void write_csv(const MultiPath& path, std::ostream& os);
void write_binary(const MultiPath& path, const std::string& file);
MultiPath read_path(const std::string& file);  // format sniffed from the magic

}  // namespace hfbm
