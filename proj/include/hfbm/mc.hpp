#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hfbm/estimate.hpp"
#include "hfbm/model.hpp"
#include "json.hpp"

namespace hfbm {

enum class StudyKind { Estimation, CiQuality, Significance, Power };

StudyKind study_kind_from_string(const std::string& s);
std::string to_string(StudyKind k);

// j2(n) = floor(log2 n) - j2_offset.
struct OctavePolicy {
  int j1 = 3;
  int j2_offset = 2;

  int j2(std::size_t n) const;
};

// Bivariate parameter point (alpha11, alpha22, delta12, rho12).
struct ModelPoint {
  double alpha11 = 0.4;
  double alpha22 = 0.8;
  double delta = 0.0;
  double rho = 0.6;

  HfBmModel model() const { return bivariate(alpha11, alpha22, delta, rho); }
  std::string label() const;
};

struct McStudyConfig {
  StudyKind kind = StudyKind::Estimation;
  // Estimation and CI studies run every model at every n. Significance runs
  // (alpha11, alpha22) of the first model with delta = 0 at every rho in
  // `rhos`; power adds every delta in `deltas`.
  std::vector<ModelPoint> models;
  std::vector<double> rhos;
  std::vector<double> deltas;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 500;
  OctavePolicy octaves;
  Weighting weighting = Weighting::ByCount;
  std::uint64_t seed = 1;
  double s = 0.1;
  bool clip = true;
  double max_skip_fraction = 0.01;

  void validate() const;  // InvalidArgument on reps == 0, unsorted n grid, ...
  nlohmann::json to_json() const;
  static McStudyConfig from_json(const nlohmann::json& j);
};

// One replication of one cell. `values` follow the column names returned by
// record_columns() for the study kind.
struct McRecord {
  std::string cell;
  std::size_t n = 0;
  double rho = 0.0;
  double delta = 0.0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::vector<double> values;
};

std::vector<std::string> record_columns(StudyKind kind);

struct EstimationRow {
  std::string model;
  std::size_t n;
  std::string param;
  double truth, mean, bias, std, skewness, excess_kurtosis;
  std::size_t reps;
};

struct CiRow {
  double rho;
  std::size_t n;
  std::string quantity;  // var_a11, var_a12, cov_a11_a22, var_d12
  double mc, theo, est_mean, ratio_theo, ratio_est;  // ratios are sqrt(approx / mc)
};

struct SignificanceRow {
  std::size_t n;
  double rho;
  std::string method;
  double size, mean_p;
  std::size_t reps;
};

struct PowerRow {
  std::size_t n;
  double rho;
  double delta;
  std::string method;
  double s_tilde, h0_size, power;
  std::size_t reps;
};

struct McSummary {
  StudyKind kind = StudyKind::Estimation;
  std::size_t replications = 0;
  std::size_t skipped = 0;
  double wall_seconds = 0.0;  // not part of the reproducible payload
  std::vector<EstimationRow> estimation;
  std::vector<CiRow> ci;
  std::vector<SignificanceRow> significance;
  std::vector<PowerRow> power;

  nlohmann::json to_json(bool include_timing = true) const;
  void write_table_csv(std::ostream& os) const;
};

struct McRun {
  McSummary summary;
  std::vector<McRecord> records;
};

McRun run_estimation_study(const McStudyConfig& cfg);
McRun run_ci_quality_study(const McStudyConfig& cfg);
McRun run_significance_study(const McStudyConfig& cfg);
McRun run_power_study(const McStudyConfig& cfg);
McRun run_study(const McStudyConfig& cfg);

// Rebuilds the summary from stored records alone (pure fold).
McSummary summarize(const McStudyConfig& cfg, const std::vector<McRecord>& records);

void write_records_csv(StudyKind kind, const std::vector<McRecord>& records, std::ostream& os);
std::vector<McRecord> read_records_csv(std::istream& is);

// Gnuplot script plotting bias and std against log2 n from the table CSV.
void write_plot_script(const McSummary& summary, const std::string& table_csv, std::ostream& os);

}  // namespace hfbm
