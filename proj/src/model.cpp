#include "hfbm/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hfbm/errors.hpp"

namespace hfbm {

namespace {

constexpr double kSymTol = 1e-12;

std::string pair_name(int q1, int q2) {
  return "(" + std::to_string(q1 + 1) + "," + std::to_string(q2 + 1) + ")";
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array()) throw DimensionError(std::string(name) + " must be a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd out(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw DimensionError(std::string(name) + " must be square");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      out(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return out;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace

std::string ValidationResult::describe() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "pair " << pair_name(v.q1, v.q2) << ": " << v.constraint << "\n";
  }
  return os.str();
}

ValidationResult validate_model(const HfBmModel& model) {
  const Eigen::Index m = model.m;
  if (m < 1) throw DimensionError("component count must be >= 1");
  if (model.h.rows() != m || model.h.cols() != m) throw DimensionError("h must be m x m");
  if (model.rho.rows() != m || model.rho.cols() != m) {
    throw DimensionError("rho must be m x m");
  }
  if (model.sigma.size() != m) throw DimensionError("sigma must have m entries");
  if (!model.h.allFinite() || !model.rho.allFinite() || !model.sigma.allFinite()) {
    throw DimensionError("model parameters must be finite");
  }

  ValidationResult res;
  auto add = [&](Eigen::Index a, Eigen::Index b, std::string what) {
    res.violations.push_back({static_cast<int>(a), static_cast<int>(b), std::move(what)});
  };
  for (Eigen::Index a = 0; a < m; ++a) {
    if (!(model.sigma(a) > 0.0)) add(a, a, "sigma must be > 0");
    if (std::abs(model.rho(a, a) - 1.0) > kSymTol) add(a, a, "rho diagonal must be 1");
    for (Eigen::Index b = 0; b < m; ++b) {
      const double h = model.h(a, b);
      if (!(h > 0.0 && h < 1.0)) add(a, b, "h must lie in (0,1)");
      if (b <= a) continue;
      if (std::abs(model.h(a, b) - model.h(b, a)) > kSymTol) add(a, b, "h must be symmetric");
      if (std::abs(model.rho(a, b) - model.rho(b, a)) > kSymTol) {
        add(a, b, "rho must be symmetric");
      }
      if (std::abs(model.rho(a, b)) > 1.0) add(a, b, "|rho| must be <= 1");
      const double bound = 0.5 * (model.h(a, a) + model.h(b, b));
      if (model.h(a, b) > bound + kSymTol) {
        std::ostringstream os;
        os << "h" << a + 1 << b + 1 << "=" << model.h(a, b) << " exceeds (h" << a + 1 << a + 1
           << "+h" << b + 1 << b + 1 << ")/2=" << bound;
        add(a, b, os.str());
      }
    }
  }
  return res;
}

void require_valid(const HfBmModel& model) {
  const auto res = validate_model(model);
  if (!res.ok()) throw AdmissibilityError("inadmissible model:\n" + res.describe());
}

DeltaMatrix delta_of(const HfBmModel& model) {
  const Eigen::MatrixXd a = model.alpha();
  DeltaMatrix d{Eigen::MatrixXd::Zero(model.m, model.m)};
  for (int i = 0; i < model.m; ++i) {
    for (int k = 0; k < model.m; ++k) {
      if (i != k) d.delta(i, k) = 0.5 * (a(i, i) + a(k, k)) - a(i, k);
    }
  }
  return d;
}

HfBmModel bivariate(double alpha11, double alpha22, double delta, double rho,
                    Regularization reg) {
  HfBmModel m;
  m.m = 2;
  const double a12 = 0.5 * (alpha11 + alpha22) - delta;
  m.h.resize(2, 2);
  m.h << alpha11 / 2, a12 / 2, a12 / 2, alpha22 / 2;
  m.rho.resize(2, 2);
  m.rho << 1.0, rho, rho, 1.0;
  m.sigma = Eigen::VectorXd::Ones(2);
  m.regularization = reg;
  return m;
}

double spectral_constant(double alpha) {
  return std::tgamma(alpha + 1.0) * std::sin(std::numbers::pi * alpha / 2.0) / std::numbers::pi;
}

Eigen::MatrixXd time_domain_rho(const HfBmModel& model) {
  const Eigen::MatrixXd a = model.alpha();
  Eigen::MatrixXd out = model.rho;
  for (int i = 0; i < model.m; ++i) {
    for (int k = 0; k < model.m; ++k) {
      if (i == k) continue;
      out(i, k) = model.rho(i, k) *
                  std::sqrt(spectral_constant(a(i, i)) * spectral_constant(a(k, k))) /
                  spectral_constant(a(i, k));
    }
  }
  return out;
}

std::string to_string(Regularization r) {
  return r == Regularization::Ideal ? "ideal" : "gaussian";
}

nlohmann::json to_json(const HfBmModel& model) {
  nlohmann::json j;
  j["m"] = model.m;
  j["h"] = matrix_to_json(model.h);
  j["rho"] = matrix_to_json(model.rho);
  j["sigma"] = std::vector<double>(model.sigma.data(), model.sigma.data() + model.sigma.size());
  j["regularization"] = to_string(model.regularization);
  return j;
}

HfBmModel model_from_json(const nlohmann::json& j) {
  HfBmModel m;
  try {
    m.m = j.at("m").get<int>();
    m.h = matrix_from_json(j.at("h"), "h");
    m.rho = j.contains("rho") ? matrix_from_json(j.at("rho"), "rho")
                              : Eigen::MatrixXd::Identity(m.m, m.m);
    if (j.contains("sigma")) {
      const auto s = j.at("sigma").get<std::vector<double>>();
      m.sigma = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
    } else {
      m.sigma = Eigen::VectorXd::Ones(m.m);
    }
    const std::string reg = j.value("regularization", std::string("ideal"));
    if (reg == "ideal") {
      m.regularization = Regularization::Ideal;
    } else if (reg == "gaussian") {
      m.regularization = Regularization::GaussianSpectral;
    } else {
      throw InvalidArgument("unknown regularization '" + reg + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model JSON: ") + e.what());
  }
  return m;
}

HfBmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace hfbm
