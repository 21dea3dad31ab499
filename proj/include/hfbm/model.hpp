#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

namespace hfbm {

enum class Regularization { Ideal, GaussianSpectral };

// Parameters of an m-variate HfBm. rho is the spectral coherence parameter:
// the cross spectral density is rho * sigma1 * sigma2 * sqrt(c(a11) c(a22)) *
// |x|^{-(a12 + 1)} with c() from spectral_constant(). For the auto terms this
// reduces to the usual fBm normalisation.
struct HfBmModel {
  int m = 1;
  Eigen::MatrixXd h;
  Eigen::MatrixXd rho;
  Eigen::VectorXd sigma;
  Regularization regularization = Regularization::Ideal;

  Eigen::MatrixXd alpha() const { return 2.0 * h; }
};

struct Violation {
  int q1;
  int q2;
  std::string constraint;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

// Throws DimensionError for structural problems (sizes, non-finite entries);
// constraint violations are returned, not thrown.
ValidationResult validate_model(const HfBmModel& model);

// Throws AdmissibilityError listing every violation.
void require_valid(const HfBmModel& model);

struct DeltaMatrix {
  Eigen::MatrixXd delta;
};

DeltaMatrix delta_of(const HfBmModel& model);

// Two components with unit amplitudes; alpha12 = (a11 + a22)/2 - delta.
HfBmModel bivariate(double alpha11, double alpha22, double delta, double rho,
                    Regularization reg = Regularization::Ideal);

// Gamma(a + 1) sin(pi a / 2) / pi: the constant linking |x|^{-(a+1)} spectra
// to the time-domain kernel |t|^a.
double spectral_constant(double alpha);

// Correlation of the increments at lag 0 implied by the model, i.e. the
// constant multiplying sigma1 sigma2 |t|^{a12} in the time domain.
Eigen::MatrixXd time_domain_rho(const HfBmModel& model);

nlohmann::json to_json(const HfBmModel& model);
HfBmModel model_from_json(const nlohmann::json& j);
HfBmModel load_model(const std::string& path);

std::string to_string(Regularization r);

}  // namespace hfbm
