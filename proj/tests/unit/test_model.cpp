#include <cmath>

#include "doctest.h"
#include "hfbm/errors.hpp"
#include "hfbm/model.hpp"

using namespace hfbm;

namespace {

HfBmModel make(double h11, double h12, double h22, double rho) {
  HfBmModel m;
  m.m = 2;
  m.h.resize(2, 2);
  m.h << h11, h12, h12, h22;
  m.rho.resize(2, 2);
  m.rho << 1, rho, rho, 1;
  m.sigma = Eigen::VectorXd::Ones(2);
  return m;
}

HfBmModel permuted(const HfBmModel& m, const std::vector<int>& p) {
  HfBmModel out = m;
  for (int a = 0; a < m.m; ++a) {
    out.sigma(a) = m.sigma(p[a]);
    for (int b = 0; b < m.m; ++b) {
      out.h(a, b) = m.h(p[a], p[b]);
      out.rho(a, b) = m.rho(p[a], p[b]);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("validate: fractally connected bivariate model is admissible") {
  const auto r = validate_model(make(0.2, 0.3, 0.4, 0.6));
  CHECK(r.ok());
  CHECK(delta_of(make(0.2, 0.3, 0.4, 0.6)).delta(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validate: departure from fractal connectivity is admissible") {
  const auto m = make(0.2, 0.2, 0.4, 0.6);
  CHECK(validate_model(m).ok());
  CHECK(delta_of(m).delta(0, 1) == doctest::Approx(0.2));  // alpha scale: (0.4 + 0.8)/2 - 0.4
}

TEST_CASE("validate: cross exponent above the average is a violation") {
  const auto r = validate_model(make(0.2, 0.5, 0.4, 0.6));
  REQUIRE_FALSE(r.ok());
  CHECK(r.describe().find("h12=0.5") != std::string::npos);
  CHECK(r.describe().find("0.3") != std::string::npos);
  CHECK_THROWS_AS(require_valid(make(0.2, 0.5, 0.4, 0.6)), AdmissibilityError);
}

TEST_CASE("validate: bounds on h, rho, sigma and structure") {
  CHECK_FALSE(validate_model(make(0.0, 0.1, 0.4, 0.5)).ok());
  CHECK_FALSE(validate_model(make(1.0, 0.5, 0.4, 0.5)).ok());
  CHECK_FALSE(validate_model(make(0.2, 0.3, 0.4, 1.2)).ok());
  auto m = make(0.2, 0.3, 0.4, 0.5);
  m.sigma(1) = 0.0;
  CHECK_FALSE(validate_model(m).ok());
  m = make(0.2, 0.3, 0.4, 0.5);
  m.h(0, 1) = 0.25;
  CHECK_FALSE(validate_model(m).ok());
  m = make(0.2, 0.3, 0.4, 0.5);
  m.sigma = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(validate_model(m), DimensionError);
}

TEST_CASE("delta_of examples") {
  CHECK(delta_of(bivariate(0.4, 0.8, 0.2, 0.6)).delta(0, 1) == doctest::Approx(0.2));
  CHECK(bivariate(0.4, 0.8, 0.2, 0.6).alpha()(0, 1) == doctest::Approx(0.4));
  CHECK(delta_of(make(0.3, 0.3, 0.3, 0.1)).delta(0, 1) == doctest::Approx(0.0));
  const auto t3 = bivariate(0.2, 0.6, 0.0, 0.9);
  CHECK(t3.alpha()(0, 1) == doctest::Approx(0.4));
  CHECK(delta_of(t3).delta(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  const auto d = delta_of(t3).delta;
  CHECK(d(0, 0) == 0.0);
  CHECK(d(1, 1) == 0.0);
  CHECK(d(1, 0) == d(0, 1));
}

TEST_CASE("delta_of commutes with component permutation") {
  HfBmModel m;
  m.m = 3;
  m.h.resize(3, 3);
  m.h << 0.2, 0.25, 0.3, 0.25, 0.35, 0.35, 0.3, 0.35, 0.45;
  m.rho.resize(3, 3);
  m.rho << 1, 0.3, -0.2, 0.3, 1, 0.5, -0.2, 0.5, 1;
  m.sigma = Eigen::Vector3d(1.0, 2.0, 0.5);
  REQUIRE(validate_model(m).ok());
  const std::vector<int> p{2, 0, 1};
  const auto d = delta_of(m).delta;
  const auto dp = delta_of(permuted(m, p)).delta;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(dp(a, b) == doctest::Approx(d(p[a], p[b])).epsilon(1e-14));
  }
}

TEST_CASE("validation passes exactly when delta is nonnegative and bounds hold") {
  for (double h11 : {0.1, 0.3, 0.5, 0.7}) {
    for (double h22 : {0.2, 0.4, 0.6, 0.9}) {
      for (double h12 : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8}) {
        const auto m = make(h11, h12, h22, 0.4);
        const bool nonneg = delta_of(m).delta(0, 1) >= -1e-12;
        CHECK(validate_model(m).ok() == nonneg);
      }
    }
  }
}

TEST_CASE("JSON round trip and schema") {
  auto m = bivariate(0.4, 0.8, 0.2, 0.6, Regularization::GaussianSpectral);
  m.sigma(1) = 2.5;
  const auto j = to_json(m);
  CHECK(j.at("m") == 2);
  CHECK(j.at("regularization") == "gaussian");
  CHECK(j.at("h").size() == 2);
  const auto back = model_from_json(j);
  CHECK(back.m == 2);
  CHECK((back.h - m.h).norm() == 0.0);
  CHECK((back.rho - m.rho).norm() == 0.0);
  CHECK((back.sigma - m.sigma).norm() == 0.0);
  CHECK(back.regularization == Regularization::GaussianSpectral);
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"m", 2}}), InvalidArgument);
  auto bad = j;
  bad["regularization"] = "cauchy";
  CHECK_THROWS_AS(model_from_json(bad), InvalidArgument);
  bad = j;
  bad["h"] = {{0.2, 0.3}};
  CHECK_THROWS_AS(model_from_json(bad), DimensionError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

TEST_CASE("time-domain rho: identity when exponents coincide, ratio of spectral constants otherwise") {
  const auto eq = bivariate(0.6, 0.6, 0.0, 0.7);
  CHECK(time_domain_rho(eq)(0, 1) == doctest::Approx(0.7).epsilon(1e-14));
  const double a1 = 0.2, a2 = 0.6, a12 = 0.4;
  auto c = [](double a) { return std::tgamma(a + 1) * std::sin(M_PI * a / 2) / M_PI; };
  const auto m = bivariate(a1, a2, 0.0, 0.9);
  CHECK(time_domain_rho(m)(0, 1) == doctest::Approx(0.9 * std::sqrt(c(a1) * c(a2)) / c(a12)));
  CHECK(spectral_constant(1.0) == doctest::Approx(1.0 / M_PI));
  // Cauchy-Schwarz on the spectral constants keeps the correlation in [-1, 1] for delta = 0.
  CHECK(std::abs(time_domain_rho(m)(0, 1)) <= 1.0);
}
