#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hfbm/errors.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/synth.hpp"

using namespace hfbm;

namespace {

HfBmModel univariate(double h) {
  HfBmModel m;
  m.m = 1;
  m.h = Eigen::MatrixXd::Constant(1, 1, h);
  m.rho = Eigen::MatrixXd::Ones(1, 1);
  m.sigma = Eigen::VectorXd::Ones(1);
  return m;
}

double c_alpha(double a) { return std::tgamma(a + 1) * std::sin(M_PI * a / 2) / M_PI; }

// 2K int_{-pi}^{pi} cos(tau x)(1 - cos x) sum_k |x+2 pi k|^{-1-a} e^{-(x+2 pi k)^2} dx
// by composite Simpson after the substitution x = u^4 (removes the x = 0 singularity).
double aliased_gaussian_cov(int tau, double a, double K) {
  auto f = [&](double x) {
    double s = 0.0;
    for (int k = -3; k <= 3; ++k) {
      const double y = std::abs(x + 2 * M_PI * k);
      if (y == 0.0) continue;
      s += std::pow(y, -1.0 - a) * std::exp(-y * y);
    }
    const double h = std::sin(0.5 * x);
    return std::cos(tau * x) * 2.0 * h * h * s;
  };
  auto g = [&](double u) { return u == 0.0 ? 0.0 : f(std::pow(u, 4)) * 4 * u * u * u; };
  const int N = 40000;
  const double U = std::pow(M_PI, 0.25), hstep = U / N;
  double acc = g(0) + g(U);
  for (int i = 1; i < N; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(i * hstep);
  return 2.0 * K * 2.0 * acc * hstep / 3.0;  // symmetric integrand: twice the (0, pi] part
}

std::vector<double> sample_autocov(const RowMatrix& x, int q1, int q2, int max_lag) {
  const auto n = static_cast<std::size_t>(x.cols());
  std::vector<double> out(max_lag + 1, 0.0);
  for (int t = 0; t <= max_lag; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) s += x(q1, i) * x(q2, i + t);
    out[t] = s / static_cast<double>(n - t);
  }
  return out;
}

}  // namespace

TEST_CASE("fbm_cross_covariance examples") {
  CHECK(fbm_cross_covariance(1, 1, 0.8, 1.0) == doctest::Approx(2.0));
  CHECK(fbm_cross_covariance(1, 0, 0.8, 1.0) == doctest::Approx(0.0));
  CHECK(fbm_cross_covariance(2, 1, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(fbm_cross_covariance(3, 5, 1.0, 0.5) == doctest::Approx(0.5 * 2 * 3));
}

TEST_CASE("ideal increment covariance examples") {
  const auto c08 = increment_covariance(univariate(0.4), 3);
  CHECK(c08.cov[0](0, 0) == doctest::Approx(2.0));
  CHECK(c08.cov[1](0, 0) == doctest::Approx(std::pow(2.0, 0.8) - 2.0).epsilon(1e-12));
  const auto c1 = increment_covariance(univariate(0.5), 4);
  CHECK(c1.cov[1](0, 0) == doctest::Approx(0.0).scale(1.0));
  CHECK(std::abs(c1.cov[3](0, 0)) < 1e-14);
}

TEST_CASE("increment covariance is the second difference of the path covariance") {
  const auto m = bivariate(0.4, 0.8, 0.2, 0.6);
  const auto c = increment_covariance(m, 6);
  const double rt = time_domain_rho(m)(0, 1);
  const double a = m.alpha()(0, 1);
  for (int tau = 0; tau < 6; ++tau) {
    const double s = 10.0, t = s + tau;
    const double ref = fbm_cross_covariance(s + 1, t + 1, a, rt) - fbm_cross_covariance(s + 1, t, a, rt) -
                       fbm_cross_covariance(s, t + 1, a, rt) + fbm_cross_covariance(s, t, a, rt);
    CHECK(c.cov[tau](0, 1) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(c.cov[tau](1, 0) == c.cov[tau](0, 1));
  }
}

TEST_CASE("Gaussian regularisation: quadrature matches the aliased spectral sum") {
  for (double a12 : {0.4, 0.8, 1.2}) {
    const double delta = 0.1;
    const double a11 = a12 + delta - 0.2, a22 = a12 + delta + 0.2;
    const auto m = bivariate(a11, a22, delta, 0.5, Regularization::GaussianSpectral);
    REQUIRE(m.alpha()(0, 1) == doctest::Approx(a12));
    const auto cov = increment_covariance(m, 12);
    const double K = 0.5 * std::sqrt(c_alpha(a11) * c_alpha(a22));
    double scale = 0.0;
    for (int t = 0; t < 12; ++t) scale = std::max(scale, std::abs(cov.cov[t](0, 1)));
    for (int t = 0; t < 12; ++t) {
      const double ref = aliased_gaussian_cov(t, a12, K);
      CHECK(std::abs(cov.cov[t](0, 1) - ref) < 1e-7 * scale);
    }
    CHECK(cov.cov[0](0, 0) == doctest::Approx(2.0));  // diagonals stay ideal
    CHECK(cov.quadrature_error < 1e-8);
  }
}

TEST_CASE("Gaussian regularisation approaches the ideal covariance at long lags") {
  const auto mg = bivariate(0.4, 0.8, 0.0, 0.6, Regularization::GaussianSpectral);
  const auto mi = bivariate(0.4, 0.8, 0.0, 0.6);
  const auto g = increment_covariance(mg, 301);
  const auto i = increment_covariance(mi, 301);
  CHECK(g.cov[300](0, 1) / i.cov[300](0, 1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(g.cov[0](0, 1) / i.cov[0](0, 1) - 1.0) > 1e-3);  // but differs at lag 0
}

TEST_CASE("synthesis is deterministic given model, n and seed") {
  const auto m = bivariate(0.4, 0.8, 0.0, 0.6);
  const auto a = synthesize(m, 1024, 7);
  const auto b = synthesize(m, 1024, 7);
  CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);
  const auto c = synthesize(m, 1024, 8);
  CHECK((a.data - c.data).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.seed == std::optional<std::uint64_t>(7));
}

TEST_CASE("synthesis does not depend on the thread count") {
  const auto m = bivariate(0.2, 0.6, 0.0, 0.9, Regularization::GaussianSpectral);
  set_thread_count(1);
  const auto a = synthesize(m, 3000, 11);
  set_thread_count(4);
  const auto b = synthesize(m, 3000, 11);
  set_thread_count(0);
  CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("path is the cumulative sum of its increments from B(0) = 0") {
  const auto p = synthesize(bivariate(0.4, 0.8, 0.2, 0.6), 500, 3);
  const RowMatrix x = p.increments();
  for (int q = 0; q < 2; ++q) {
    CHECK(x(q, 0) == p.data(q, 0));
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      s += x(q, i);
      CHECK(p.data(q, i) == doctest::Approx(s).epsilon(1e-12));
    }
  }
  const auto back = MultiPath::from_increments(x);
  CHECK((back.data - p.data).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Brownian case: lag-1 autocorrelation vanishes and variance ratio is 1") {
  const std::size_t n = 1 << 14;
  const CirculantSynthesizer s(univariate(0.5), n);
  double lag1 = 0.0, ratio = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto x = s.draw_increments(1000 + r);
    const auto ac = sample_autocov(x, 0, 0, 1);
    lag1 += ac[1] / ac[0] / reps;
    ratio += ac[0] / 2.0 / reps;
  }
  CHECK(std::abs(lag1) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("MC cross-covariance at lag 0 matches the closed form within 3 standard errors") {
  const auto m = bivariate(0.4, 0.8, 0.0, 0.6);
  const std::size_t n = 1 << 12;
  const CirculantSynthesizer s(m, n);
  const double exact = increment_covariance(m, 1).cov[0](0, 1);
  std::vector<double> v;
  for (int r = 0; r < 500; ++r) v.push_back(sample_autocov(s.draw_increments(r), 0, 1, 0)[0]);
  double mean = 0, var = 0;
  for (double x : v) mean += x / v.size();
  for (double x : v) var += (x - mean) * (x - mean) / (v.size() - 1);
  CHECK(std::abs(mean - exact) < 3.0 * std::sqrt(var / v.size()));
}

TEST_CASE("sample covariance error shrinks like reps^(-1/2)") {
  const auto m = bivariate(0.4, 0.8, 0.0, 0.6);
  const std::size_t n = 1 << 10;
  const CirculantSynthesizer s(m, n);
  const auto exact = increment_covariance(m, 9);
  auto max_err = [&](int reps, std::uint64_t base) {
    std::vector<double> acc(9, 0.0);
    for (int r = 0; r < reps; ++r) {
      const auto ac = sample_autocov(s.draw_increments(base + r), 0, 1, 8);
      for (int t = 0; t < 9; ++t) acc[t] += ac[t] / reps;
    }
    double e = 0.0;
    for (int t = 0; t < 9; ++t) e = std::max(e, std::abs(acc[t] - exact.cov[t](0, 1)));
    return e;
  };
  // Averaged over independent batches so that the ratio is stable.
  double small = 0.0, large = 0.0;
  const int batches = 12;
  for (int b = 0; b < batches; ++b) {
    small += max_err(25, 100000 + 1000 * b) / batches;
    large += max_err(100, 500000 + 1000 * b) / batches;
  }
  const double ratio = large / small;
  CHECK(ratio > 0.35);
  CHECK(ratio < 0.7);
}

TEST_CASE("embedding diagnostics") {
  SUBCASE("white increments give a flat spectrum") {
    const auto rep = embed_and_check(increment_covariance(univariate(0.5), 64));
    REQUIRE(rep.psd);
    const auto [lo, hi] = std::minmax_element(rep.min_eigenvalue.begin(), rep.min_eigenvalue.end());
    CHECK(*lo > 0.0);
    CHECK(*hi - *lo < 1e-12 * *hi);
    CHECK(rep.embedding_length == embedding_length(64));
  }
  SUBCASE("fractally connected ideal model embeds") {
    const CirculantSynthesizer s(bivariate(0.4, 0.8, 0.0, 0.6), 1024);
    CHECK(s.report().psd);
    CHECK(s.report().negative_frequencies.empty());
    CHECK(s.report().hermitian_error < 1e-12);
    CHECK(s.report().clipped_mass == 0.0);
  }
  SUBCASE("large delta with strong correlation lists the offending frequencies") {
    const auto m = bivariate(0.2, 0.6, 0.2, 0.95);
    const CirculantSynthesizer s(m, 1024);
    const auto& rep = s.report();
    REQUIRE_FALSE(rep.psd);
    REQUIRE_FALSE(rep.negative_frequencies.empty());
    for (std::size_t f = 0; f < rep.min_eigenvalue.size(); ++f) {
      const bool listed = std::find(rep.negative_frequencies.begin(), rep.negative_frequencies.end(),
                                    f) != rep.negative_frequencies.end();
      CHECK(listed == (rep.min_eigenvalue[f] < -rep.tolerance));
    }
    CHECK(rep.min_eigenvalue[rep.argmin_frequency] == rep.global_min);
    CHECK(rep.clipped_mass > 0.0);
    try {
      CirculantSynthesizer strict(m, 1024, SynthOptions{false});
      FAIL("expected EmbeddingNotPsd");
    } catch (const EmbeddingNotPsd& e) {
      CHECK(e.min_eigenvalue() < -rep.tolerance);
      CHECK(e.min_eigenvalue() >= rep.global_min);
      CHECK(e.min_eigenvalue() == rep.min_eigenvalue[e.frequency_index()]);
    }
  }
  SUBCASE("embedding length") {
    CHECK(embedding_length(2) == 2);
    CHECK(embedding_length(1024) == 2048);
    CHECK(embedding_length(1025) == 2048);
    CHECK(embedding_length(1026) == 4096);
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(synthesize(bivariate(0.2, 0.6, -0.1, 0.5), 64, 1), AdmissibilityError);
  CHECK_THROWS_AS(synthesize(bivariate(0.2, 0.6, 0.0, 0.5), 1, 1), InvalidArgument);
}

TEST_CASE("CSV and binary round trips are exact") {
  const auto p = synthesize(bivariate(0.4, 0.8, 0.2, 0.6), 257, 5);
  const auto dir = std::filesystem::temp_directory_path() / "hfbm_unit_synth";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "p.csv").string(), bin = (dir / "p.bin").string();
  write_csv(p, csv);
  write_binary(p, bin);
  const auto a = read_path(csv), b = read_path(bin);
  CHECK((a.data - p.data).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.data - p.data).cwiseAbs().maxCoeff() == 0.0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "comp_0,comp_1");
  std::ifstream bi(bin, std::ios::binary);
  char magic[4];
  bi.read(magic, 4);
  CHECK(std::string(magic, 4) == "HFBM");
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  bi.read(reinterpret_cast<char*>(&m), 4);
  bi.read(reinterpret_cast<char*>(&n), 8);
  CHECK(m == 2);
  CHECK(n == 257);
  CHECK(std::filesystem::file_size(bin) == 16 + 2 * 257 * 8);
  CHECK_THROWS_AS(write_csv(p, (dir / "missing" / "x.csv").string()), IoError);
  CHECK_THROWS_AS(read_path((dir / "nope.csv").string()), IoError);
  std::filesystem::remove_all(dir);
}
