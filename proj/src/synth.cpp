#include "hfbm/synth.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "hfbm/errors.hpp"
#include "hfbm/fft.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/rng.hpp"

namespace hfbm {

namespace {

double second_difference(double tau, double alpha) {
  return std::pow(std::abs(tau + 1.0), alpha) - 2.0 * std::pow(std::abs(tau), alpha) +
         std::pow(std::abs(tau - 1.0), alpha);
}

struct GslWorkspace {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
  gsl_integration_qawo_table* table =
      gsl_integration_qawo_table_alloc(1.0, kUpper, GSL_INTEG_COSINE, 50);
  ~GslWorkspace() {
    gsl_integration_qawo_table_free(table);
    gsl_integration_workspace_free(ws);
  }
  static constexpr double kUpper = 9.0;  // e^{-81} is below double resolution
};

double gaussian_integrand(double x, void* p) {
  const double alpha = *static_cast<double*>(p);
  if (x <= 0.0) return 0.0;
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s * std::pow(x, -1.0 - alpha) * std::exp(-x * x);
}

// 4 int_0^inf cos(tau x) (1 - cos x) x^{-1-alpha} e^{-x^2} dx, the increment
// covariance of a process with spectral density |x|^{-1-alpha} e^{-x^2}.
double gaussian_increment_cov(std::size_t tau, double alpha, double& abserr) {
  thread_local GslWorkspace w;
  gsl_function f{&gaussian_integrand, &alpha};
  double result = 0.0;
  int status;
  if (tau == 0) {
    status = gsl_integration_qags(&f, 0.0, GslWorkspace::kUpper, 1e-14, 1e-11, 2000, w.ws,
                                  &result, &abserr);
  } else {
    gsl_integration_qawo_table_set(w.table, static_cast<double>(tau), GslWorkspace::kUpper,
                                   GSL_INTEG_COSINE);
    status = gsl_integration_qawo(&f, 0.0, 1e-14, 1e-10, 2000, w.ws, w.table, &result,
                                  &abserr);
  }
  if (status != GSL_SUCCESS && abserr > 1e-9) {
    throw QuadratureError("Gaussian-regularised covariance at lag " + std::to_string(tau) +
                              ": " + gsl_strerror(status),
                          abserr);
  }
  abserr *= 4.0;
  return 4.0 * result;
}

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};
const GslInit g_gsl_init;

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

double fbm_cross_covariance(double s, double t, double alpha, double rho_sigma) {
  return rho_sigma *
         (std::pow(std::abs(s), alpha) + std::pow(std::abs(t), alpha) -
          std::pow(std::abs(s - t), alpha));
}

IncrementCovariance increment_covariance(const HfBmModel& model, std::size_t lags) {
  if (lags < 1) throw InvalidArgument("need at least one lag");
  require_valid(model);
  const int m = model.m;
  const Eigen::MatrixXd a = model.alpha();
  const Eigen::MatrixXd rho_t = time_domain_rho(model);
  IncrementCovariance out{model, std::vector<Eigen::MatrixXd>(lags, Eigen::MatrixXd(m, m))};

  for (int q1 = 0; q1 < m; ++q1) {
    for (int q2 = q1; q2 < m; ++q2) {
      const double amp = model.sigma(q1) * model.sigma(q2);
      const bool gaussian = q1 != q2 && model.regularization == Regularization::GaussianSpectral;
      std::vector<double> seq(lags);
      std::vector<double> err(lags, 0.0);
      if (gaussian) {
        const double k = model.rho(q1, q2) * amp *
                         std::sqrt(spectral_constant(a(q1, q1)) * spectral_constant(a(q2, q2)));
        const double alpha = a(q1, q2);
        parallel_for(lags, [&](std::size_t tau) {
          seq[tau] = k * gaussian_increment_cov(tau, alpha, err[tau]);
          err[tau] *= std::abs(k);
        });
        out.quadrature_error =
            std::max(out.quadrature_error, *std::max_element(err.begin(), err.end()));
      } else {
        const double c = rho_t(q1, q2) * amp;
        for (std::size_t tau = 0; tau < lags; ++tau) {
          seq[tau] = c * second_difference(static_cast<double>(tau), a(q1, q2));
        }
      }
      for (std::size_t tau = 0; tau < lags; ++tau) {
        out.cov[tau](q1, q2) = seq[tau];
        out.cov[tau](q2, q1) = seq[tau];
      }
    }
  }
  return out;
}

std::size_t embedding_length(std::size_t n) {
  std::size_t M = 2;
  while (M < 2 * (n - 1)) M <<= 1;
  return M;
}

namespace {

// Per-frequency spectral matrices (real symmetric here) laid out as M blocks
// of m x m, column-major. Also fills the Hermitian check.
std::vector<double> spectral_matrices(const IncrementCovariance& cov, std::size_t M,
                                      double& hermitian_error) {
  const int m = cov.model.m;
  const std::size_t half = M / 2;
  IncrementCovariance ext = cov.lags() > half ? cov : increment_covariance(cov.model, half + 1);

  std::vector<std::vector<std::complex<double>>> spec(static_cast<std::size_t>(m * m));
  for (int q1 = 0; q1 < m; ++q1) {
    for (int q2 = 0; q2 < m; ++q2) {
      auto& s = spec[static_cast<std::size_t>(q1 + m * q2)];
      s.assign(M, {0.0, 0.0});
      for (std::size_t k = 0; k < M; ++k) {
        // Row of the block-circulant: C(k) for k <= M/2, C(M-k)^T beyond.
        s[k] = k <= half ? ext.cov[k](q1, q2) : ext.cov[M - k](q2, q1);
      }
      fft::transform(s.data(), M, fft::Direction::Forward);
    }
  }

  std::vector<double> out(M * static_cast<std::size_t>(m * m));
  double herm = 0.0;
  for (std::size_t f = 0; f < M; ++f) {
    double scale = 0.0;
    for (int q = 0; q < m; ++q) scale = std::max(scale, std::abs(spec[q + m * q][f]));
    for (int q1 = 0; q1 < m; ++q1) {
      for (int q2 = 0; q2 < m; ++q2) {
        const auto v = spec[static_cast<std::size_t>(q1 + m * q2)][f];
        const auto w = spec[static_cast<std::size_t>(q2 + m * q1)][f];
        if (scale > 0.0) {
          herm = std::max(herm, std::abs(v - std::conj(w)) / scale);
          herm = std::max(herm, std::abs(v.imag()) / scale);
        }
        out[f * m * m + q1 + m * q2] = v.real();
      }
    }
  }
  hermitian_error = herm;
  return out;
}

SpectralReport factorize(const IncrementCovariance& cov, std::size_t M, bool clip,
                         std::vector<double>* factors) {
  const int m = cov.model.m;
  const std::size_t mm = static_cast<std::size_t>(m * m);
  SpectralReport rep;
  rep.embedding_length = M;
  std::vector<double> S = spectral_matrices(cov, M, rep.hermitian_error);

  double max_diag = 0.0;
  for (std::size_t f = 0; f < M; ++f) {
    for (int q = 0; q < m; ++q) max_diag = std::max(max_diag, S[f * mm + q + m * q]);
  }
  rep.tolerance = 1e-10 * max_diag;
  rep.min_eigenvalue.resize(M);
  if (factors) factors->assign(M * mm, 0.0);

  double trace = 0.0;
  double clipped = 0.0;
  rep.global_min = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  for (std::size_t f = 0; f < M; ++f) {
    Eigen::Map<const Eigen::MatrixXd> Sf(S.data() + f * mm, m, m);
    solver.compute(Sf);
    const Eigen::VectorXd lam = solver.eigenvalues();
    rep.min_eigenvalue[f] = lam.minCoeff();
    if (rep.min_eigenvalue[f] < rep.global_min) {
      rep.global_min = rep.min_eigenvalue[f];
      rep.argmin_frequency = f;
    }
    trace += lam.cwiseAbs().sum();
    if (rep.min_eigenvalue[f] < -rep.tolerance) {
      rep.negative_frequencies.push_back(f);
      if (!clip && factors) throw EmbeddingNotPsd(rep.min_eigenvalue[f], f);
    }
    for (int i = 0; i < m; ++i) {
      if (lam(i) < 0.0) clipped += -lam(i);
    }
    if (factors) {
      const Eigen::VectorXd root = lam.cwiseMax(0.0).cwiseSqrt();
      Eigen::Map<Eigen::MatrixXd> A(factors->data() + f * mm, m, m);
      A = solver.eigenvectors() * root.asDiagonal();
    }
  }
  rep.psd = rep.negative_frequencies.empty();
  rep.clipped_mass = trace > 0.0 ? clipped / trace : 0.0;
  return rep;
}

}  // namespace

SpectralReport embed_and_check(const IncrementCovariance& cov) {
  const std::size_t M = embedding_length(cov.lags());
  return factorize(cov, M, true, nullptr);
}

nlohmann::json SpectralReport::to_json() const {
  nlohmann::json j;
  j["embedding_length"] = embedding_length;
  j["min_eigenvalue"] = global_min;
  j["argmin_frequency"] = argmin_frequency;
  j["tolerance"] = tolerance;
  j["hermitian_error"] = hermitian_error;
  j["negative_frequencies"] = negative_frequencies.size();
  j["clipped_mass"] = clipped_mass;
  j["psd"] = psd;
  return j;
}

CirculantSynthesizer::CirculantSynthesizer(const HfBmModel& model, std::size_t n,
                                           SynthOptions opts)
    : model_(model), n_(n), m_(model.m) {
  if (n < 2) throw InvalidArgument("path length must be >= 2");
  require_valid(model);
  M_ = embedding_length(n);
  const IncrementCovariance cov = increment_covariance(model, M_ / 2 + 1);
  report_ = factorize(cov, M_, opts.clip, &factors_);
}

RowMatrix CirculantSynthesizer::draw_increments(std::uint64_t seed) const {
  const std::size_t mm = static_cast<std::size_t>(m_ * m_);
  std::vector<std::vector<std::complex<double>>> w(static_cast<std::size_t>(m_),
                                                   std::vector<std::complex<double>>(M_));
  std::vector<double> re(static_cast<std::size_t>(m_));
  std::vector<double> im(static_cast<std::size_t>(m_));
  for (std::size_t f = 0; f < M_; ++f) {
    CounterRng rng(seed, f);
    for (int r = 0; r < m_; ++r) {
      re[r] = rng.normal();
      im[r] = rng.normal();
    }
    const double* A = factors_.data() + f * mm;
    for (int q = 0; q < m_; ++q) {
      double a = 0.0;
      double b = 0.0;
      for (int r = 0; r < m_; ++r) {
        a += A[q + m_ * r] * re[r];
        b += A[q + m_ * r] * im[r];
      }
      w[q][f] = {a, b};
    }
  }
  RowMatrix x(m_, static_cast<Eigen::Index>(n_));
  const double scale = 1.0 / std::sqrt(static_cast<double>(M_));
  for (int q = 0; q < m_; ++q) {
    fft::transform(w[q].data(), M_, fft::Direction::Backward);
    for (std::size_t t = 0; t < n_; ++t) x(q, static_cast<Eigen::Index>(t)) = w[q][t].real() * scale;
  }
  return x;
}

MultiPath CirculantSynthesizer::draw(std::uint64_t seed) const {
  MultiPath p = MultiPath::from_increments(draw_increments(seed));
  p.seed = seed;
  p.model = model_;
  return p;
}

MultiPath synthesize(const HfBmModel& model, std::size_t n, std::uint64_t seed,
                     SynthOptions opts) {
  return CirculantSynthesizer(model, n, opts).draw(seed);
}

RowMatrix MultiPath::increments() const {
  RowMatrix x(data.rows(), data.cols());
  for (Eigen::Index q = 0; q < data.rows(); ++q) {
    double prev = 0.0;
    for (Eigen::Index t = 0; t < data.cols(); ++t) {
      x(q, t) = data(q, t) - prev;
      prev = data(q, t);
    }
  }
  return x;
}

MultiPath MultiPath::from_increments(const RowMatrix& x) {
  MultiPath p;
  p.data.resize(x.rows(), x.cols());
  for (Eigen::Index q = 0; q < x.rows(); ++q) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
      acc += x(q, t);
      p.data(q, t) = acc;
    }
  }
  return p;
}

void write_csv(const MultiPath& path, std::ostream& os) {
  std::string buf;
  for (int q = 0; q < path.m(); ++q) {
    if (q) buf += ',';
    buf += "comp_" + std::to_string(q);
  }
  buf += '\n';
  for (Eigen::Index t = 0; t < path.data.cols(); ++t) {
    for (Eigen::Index q = 0; q < path.data.rows(); ++q) {
      if (q) buf += ',';
      append_double(buf, path.data(q, t));
    }
    buf += '\n';
  }
  os << buf;
  if (!os) throw IoError("write failed");
}

void write_csv(const MultiPath& path, const std::string& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw IoError("cannot open " + file + " for writing");
  write_csv(path, os);
}

void write_binary(const MultiPath& path, const std::string& file) {
  static_assert(std::endian::native == std::endian::little, "binary format is little-endian");
  std::ofstream os(file, std::ios::binary);
  if (!os) throw IoError("cannot open " + file + " for writing");
  const std::uint32_t m = static_cast<std::uint32_t>(path.m());
  const std::uint64_t n = path.n();
  os.write("HFBM", 4);
  os.write(reinterpret_cast<const char*>(&m), sizeof m);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(path.data.data()),
           static_cast<std::streamsize>(sizeof(double) * m * n));
  if (!os) throw IoError("write failed: " + file);
}

namespace {

MultiPath read_binary(std::istream& in, const std::string& file) {
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || m == 0) throw IoError("truncated header in " + file);
  MultiPath p;
  p.data.resize(m, static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(p.data.data()),
          static_cast<std::streamsize>(sizeof(double) * m * n));
  if (!in) throw IoError("truncated data in " + file);
  return p;
}

bool parse_row(const std::string& line, std::vector<double>& vals) {
  vals.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (end > p && (end[-1] == '\r' || end[-1] == ' ')) --end;
  if (p == end) return false;
  for (;;) {
    while (p < end && *p == ' ') ++p;
    double v = 0.0;
    auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) return false;
    vals.push_back(v);
    p = res.ptr;
    while (p < end && *p == ' ') ++p;
    if (p == end) return true;
    if (*p != ',') return false;
    ++p;
  }
}

MultiPath read_csv(std::istream& in, const std::string& file) {
  std::string line;
  std::vector<double> vals;
  std::vector<std::vector<double>> cols;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!parse_row(line, vals)) {
      if (lineno == 1) continue;  // header
      throw InvalidArgument(file + ":" + std::to_string(lineno) + ": not a numeric row");
    }
    if (cols.empty()) cols.resize(vals.size());
    if (vals.size() != cols.size()) {
      throw DimensionError(file + ":" + std::to_string(lineno) + ": column count changed");
    }
    for (std::size_t q = 0; q < vals.size(); ++q) cols[q].push_back(vals[q]);
  }
  if (cols.empty()) throw InvalidArgument(file + ": no data rows");
  MultiPath p;
  p.data.resize(static_cast<Eigen::Index>(cols.size()),
                static_cast<Eigen::Index>(cols[0].size()));
  for (std::size_t q = 0; q < cols.size(); ++q) {
    for (std::size_t t = 0; t < cols[q].size(); ++t) {
      p.data(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(t)) = cols[q][t];
    }
  }
  if (!p.data.allFinite()) throw InvalidArgument(file + ": non-finite sample");
  return p;
}

}  // namespace

MultiPath read_path(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, "HFBM", 4) == 0) return read_binary(in, file);
  in.clear();
  in.seekg(0);
  return read_csv(in, file);
}

}  // namespace hfbm
