#include "hfbm/mc.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "hfbm/dwt.hpp"
#include "hfbm/errors.hpp"
#include "hfbm/fctest.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/rng.hpp"
#include "hfbm/stats.hpp"
#include "hfbm/synth.hpp"
#include "hfbm/varmodel.hpp"

namespace hfbm {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Cell {
  std::string label;
  ModelPoint point;
  std::size_t n;
  bool h0 = false;  // power study: the paired null cell
};

std::string cell_label(const std::string& prefix, const ModelPoint& p, std::size_t n) {
  return prefix + "/" + p.label() + "/n=" + std::to_string(n);
}

std::vector<Cell> cells_for(const McStudyConfig& cfg) {
  std::vector<Cell> out;
  switch (cfg.kind) {
    case StudyKind::Estimation:
    case StudyKind::CiQuality: {
      const std::string prefix = cfg.kind == StudyKind::Estimation ? "est" : "ci";
      for (const auto& mp : cfg.models) {
        for (std::size_t n : cfg.n_grid) out.push_back({cell_label(prefix, mp, n), mp, n});
      }
      break;
    }
    case StudyKind::Significance:
    case StudyKind::Power: {
      const ModelPoint base = cfg.models.front();
      for (std::size_t n : cfg.n_grid) {
        for (double rho : cfg.rhos) {
          ModelPoint h0{base.alpha11, base.alpha22, 0.0, rho};
          out.push_back({cell_label("h0", h0, n), h0, n, true});
          if (cfg.kind != StudyKind::Power) continue;
          for (double d : cfg.deltas) {
            ModelPoint h1{base.alpha11, base.alpha22, d, rho};
            out.push_back({cell_label("h1", h1, n), h1, n});
          }
        }
      }
      break;
    }
  }
  return out;
}

bool is_skippable(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const EmbeddingNotPsd&) {
    return true;
  } catch (const DegenerateVariance&) {
    return true;
  } catch (const DegenerateInput&) {
    return true;
  } catch (const InfiniteVariance&) {
    return true;
  } catch (const InvalidVariance&) {
    return true;
  } catch (const DegenerateCoherence&) {
    return true;
  } catch (...) {
    return false;
  }
}

std::vector<double> replicate(const McStudyConfig& cfg, const CirculantSynthesizer& synth,
                              const Cell& cell, std::uint64_t seed) {
  const int j1 = cfg.octaves.j1;
  const int j2 = cfg.octaves.j2(cell.n);
  const MultiPath path = synth.draw(seed);
  const WaveletPyramid pyr = transform(path, j1, j2);
  const RegressionWeights w = regression_weights(j1, j2, cfg.weighting, cell.n);
  const ScalingEstimate est = estimate_delta(estimate_alpha(pyr, w));
  const double a11 = est.alpha(0, 0), a22 = est.alpha(1, 1), a12 = est.alpha(0, 1);
  const double d12 = est.delta(0, 1);
  if (cfg.kind == StudyKind::Estimation) return {a11, a22, a12, d12};

  ScalingEstimate full = est;
  full.rho = estimate_rho(path);
  if (std::abs(full.rho(0, 1)) < 1e-6) throw InfiniteVariance("rho_hat vanishes");
  const WaveletCorrelation wc(plugin_params(full), j1, j2, cell.n);
  const EstimatorCovariance cov = estimator_covariance(wc, w);
  if (cfg.kind == StudyKind::CiQuality) {
    return {a11, a22, a12, d12, full.rho(0, 1), cov.var_alpha(0, 0), cov.var_alpha(0, 1),
            *cov.lookup({0, 0}, {1, 1}), cov.var_delta(0, 1)};
  }
  const TestReport h = hfbm_test(d12, cov.var_delta(0, 1), cfg.s);
  const TestReport c = wcf_test(pyr, 0, 1, j1, j2, cfg.s);
  return {d12, cov.var_delta(0, 1), h.p_value, c.p_value, c.statistic};
}

McRun run_cells(const McStudyConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = cells_for(cfg);
  std::vector<McRecord> records;
  records.reserve(cells.size() * cfg.reps);
  for (const auto& cell : cells) {
    const std::uint64_t cell_id = hash_label(cell.label);
    std::vector<McRecord> recs(cfg.reps);
    std::optional<CirculantSynthesizer> synth;
    try {
      synth.emplace(cell.point.model(), cell.n, SynthOptions{cfg.clip});
    } catch (const EmbeddingNotPsd&) {
    }
    parallel_for(cfg.reps, [&](std::size_t rep) {
      McRecord& r = recs[rep];
      r.cell = cell.label;
      r.n = cell.n;
      r.rho = cell.point.rho;
      r.delta = cell.point.delta;
      r.rep = rep;
      r.seed = derive_seed(cfg.seed, cell_id, rep);
      if (!synth) {
        r.skipped = true;
        return;
      }
      try {
        r.values = replicate(cfg, *synth, cell, r.seed);
      } catch (...) {
        if (!is_skippable(std::current_exception())) throw;
        r.skipped = true;
        r.values.clear();
      }
    });
    for (auto& r : recs) records.push_back(std::move(r));
  }
  McRun run;
  run.records = std::move(records);
  run.summary = summarize(cfg, run.records);
  run.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (static_cast<double>(run.summary.skipped) >
      cfg.max_skip_fraction * static_cast<double>(run.summary.replications)) {
    throw StudyAborted(std::to_string(run.summary.skipped) + " of " +
                       std::to_string(run.summary.replications) +
                       " replications skipped (limit " +
                       num(100.0 * cfg.max_skip_fraction) + "%)");
  }
  return run;
}

std::vector<double> column(const std::vector<const McRecord*>& recs, std::size_t i) {
  std::vector<double> out;
  out.reserve(recs.size());
  for (const auto* r : recs) out.push_back(r->values[i]);
  return out;
}

}  // namespace

StudyKind study_kind_from_string(const std::string& s) {
  if (s == "estimation") return StudyKind::Estimation;
  if (s == "ci_quality") return StudyKind::CiQuality;
  if (s == "significance") return StudyKind::Significance;
  if (s == "power") return StudyKind::Power;
  throw InvalidArgument("unknown study '" + s + "' (estimation|ci_quality|significance|power)");
}

std::string to_string(StudyKind k) {
  switch (k) {
    case StudyKind::Estimation:
      return "estimation";
    case StudyKind::CiQuality:
      return "ci_quality";
    case StudyKind::Significance:
      return "significance";
    case StudyKind::Power:
      return "power";
  }
  return "?";
}

int OctavePolicy::j2(std::size_t n) const {
  return static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - j2_offset;
}

std::string ModelPoint::label() const {
  return "a11=" + num(alpha11) + ",a22=" + num(alpha22) + ",d=" + num(delta) + ",rho=" + num(rho);
}

void McStudyConfig::validate() const {
  if (reps == 0) throw InvalidArgument("replication count must be >= 1");
  if (n_grid.empty()) throw InvalidArgument("n grid is empty");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw InvalidArgument("n grid must be sorted ascending");
  }
  if (models.empty()) throw InvalidArgument("study needs at least one model");
  if ((kind == StudyKind::Significance || kind == StudyKind::Power) && rhos.empty()) {
    throw InvalidArgument("test studies need a rho grid");
  }
  if (kind == StudyKind::Power && deltas.empty()) throw InvalidArgument("power study needs deltas");
  if (kind == StudyKind::Power && reps < 50) {
    throw InvalidArgument("power study needs >= 50 replications to adjust the significance");
  }
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("significance must lie in (0,1)");
  for (std::size_t n : n_grid) {
    const int j2 = octaves.j2(n);
    if (octaves.j1 < 1 || j2 <= octaves.j1) {
      throw InvalidArgument("octave policy leaves fewer than two octaves at n=" +
                            std::to_string(n));
    }
  }
}

nlohmann::json McStudyConfig::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : models) {
    ms.push_back({{"alpha11", m.alpha11}, {"alpha22", m.alpha22}, {"delta", m.delta}, {"rho", m.rho}});
  }
  return {{"study", to_string(kind)},   {"models", ms},
          {"rhos", rhos},               {"deltas", deltas},
          {"n", n_grid},                {"reps", reps},
          {"j1", octaves.j1},           {"j2_offset", octaves.j2_offset},
          {"weighting", hfbm::to_string(weighting)},
          {"seed", seed},               {"s", s},
          {"clip", clip},               {"max_skip_fraction", max_skip_fraction}};
}

McStudyConfig McStudyConfig::from_json(const nlohmann::json& j) {
  McStudyConfig c;
  if (!j.is_object()) throw InvalidArgument("study config must be a JSON object");
  static const std::set<std::string> known = {"study", "models", "rhos", "deltas", "n",
                                              "reps", "j1", "j2_offset", "weighting", "seed",
                                              "s", "clip", "max_skip_fraction"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown study config key '" + key + "'");
  }
  try {
    c.kind = study_kind_from_string(j.at("study").get<std::string>());
    const bool table = c.kind != StudyKind::Estimation;
    // Per-study defaults: the published study settings.
    c.octaves = table ? OctavePolicy{2, 5} : OctavePolicy{3, 2};
    c.models = table ? std::vector<ModelPoint>{{0.2, 0.6, 0.0, 0.9}}
                     : std::vector<ModelPoint>{{0.4, 0.8, 0.0, 0.6}, {0.4, 0.8, 0.2, 0.6}};
    if (c.kind == StudyKind::Significance || c.kind == StudyKind::Power) c.rhos = {0.5, 0.7, 0.9};
    if (c.kind == StudyKind::Power) c.deltas = {0.05, 0.1, 0.15, 0.2};
    c.n_grid = {1024, 4096, 16384};
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j.at("models")) {
        c.models.push_back({m.at("alpha11").get<double>(), m.at("alpha22").get<double>(),
                            m.value("delta", 0.0), m.value("rho", 0.0)});
      }
    }
    if (j.contains("rhos")) c.rhos = j.at("rhos").get<std::vector<double>>();
    if (j.contains("deltas")) c.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("n")) c.n_grid = j.at("n").get<std::vector<std::size_t>>();
    c.reps = j.value("reps", c.reps);
    c.octaves.j1 = j.value("j1", c.octaves.j1);
    c.octaves.j2_offset = j.value("j2_offset", c.octaves.j2_offset);
    if (j.contains("weighting")) c.weighting = weighting_from_string(j.at("weighting"));
    c.seed = j.value("seed", c.seed);
    c.s = j.value("s", c.s);
    c.clip = j.value("clip", c.clip);
    c.max_skip_fraction = j.value("max_skip_fraction", c.max_skip_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed study config: ") + e.what());
  }
  return c;
}

std::vector<std::string> record_columns(StudyKind kind) {
  switch (kind) {
    case StudyKind::Estimation:
      return {"a11", "a22", "a12", "d12"};
    case StudyKind::CiQuality:
      return {"a11", "a22", "a12", "d12", "rho12", "pv_a11", "pv_a12", "pc_a11_a22", "pv_d12"};
    case StudyKind::Significance:
    case StudyKind::Power:
      return {"d12", "var_d12", "p_hfbm", "p_wcf", "t_wcf"};
  }
  return {};
}

McSummary summarize(const McStudyConfig& cfg, const std::vector<McRecord>& records) {
  McSummary sum;
  sum.kind = cfg.kind;
  std::map<std::string, std::vector<const McRecord*>> by_cell;
  for (const auto& r : records) {
    ++sum.replications;
    if (r.skipped) {
      ++sum.skipped;
      continue;
    }
    by_cell[r.cell].push_back(&r);
  }
  for (auto& [label, v] : by_cell) {
    std::sort(v.begin(), v.end(), [](const McRecord* a, const McRecord* b) { return a->rep < b->rep; });
  }
  auto get = [&](const std::string& label) -> const std::vector<const McRecord*>& {
    static const std::vector<const McRecord*> empty;
    auto it = by_cell.find(label);
    return it == by_cell.end() ? empty : it->second;
  };

  const auto cells = cells_for(cfg);
  for (const auto& cell : cells) {
    const auto& recs = get(cell.label);
    const ModelPoint& p = cell.point;
    switch (cfg.kind) {
      case StudyKind::Estimation: {
        const double a12 = 0.5 * (p.alpha11 + p.alpha22) - p.delta;
        const double truth[] = {p.alpha11, p.alpha22, a12, p.delta};
        const auto names = record_columns(cfg.kind);
        for (std::size_t i = 0; i < 4; ++i) {
          const auto m = stats::moments(column(recs, i));
          sum.estimation.push_back({p.label(), cell.n, names[i], truth[i], m.mean,
                                    m.mean - truth[i], std::sqrt(m.variance), m.skewness,
                                    m.excess_kurtosis, recs.size()});
        }
        break;
      }
      case StudyKind::CiQuality: {
        const int j1 = cfg.octaves.j1;
        const int j2 = cfg.octaves.j2(cell.n);
        const auto w = regression_weights(j1, j2, cfg.weighting, cell.n);
        const WaveletCorrelation wc(theoretical_params(p.model()), j1, j2, cell.n);
        const auto theo = estimator_covariance(wc, w);
        const auto a11 = column(recs, 0), a12 = column(recs, 2), a22 = column(recs, 1),
                   d12 = column(recs, 3);
        const double mc[] = {stats::moments(a11).variance, stats::moments(a12).variance,
                             stats::covariance(a11, a22), stats::moments(d12).variance};
        const double th[] = {theo.var_alpha(0, 0), theo.var_alpha(0, 1),
                             *theo.lookup({0, 0}, {1, 1}), theo.var_delta(0, 1)};
        const char* names[] = {"var_a11", "var_a12", "cov_a11_a22", "var_d12"};
        for (std::size_t i = 0; i < 4; ++i) {
          const double est = stats::moments(column(recs, 5 + i)).mean;
          sum.ci.push_back({p.rho, cell.n, names[i], mc[i], th[i], est, std::sqrt(th[i] / mc[i]),
                            std::sqrt(est / mc[i])});
        }
        break;
      }
      case StudyKind::Significance: {
        for (int method = 0; method < 2; ++method) {
          const auto pv = column(recs, method == 0 ? 2 : 3);
          double rej = 0.0;
          for (double x : pv) rej += x < cfg.s ? 1.0 : 0.0;
          sum.significance.push_back({cell.n, p.rho, method == 0 ? "hfbm" : "wcf",
                                      pv.empty() ? 0.0 : rej / static_cast<double>(pv.size()),
                                      stats::moments(pv).mean, pv.size()});
        }
        break;
      }
      case StudyKind::Power: {
        if (cell.h0) break;
        ModelPoint h0p{p.alpha11, p.alpha22, 0.0, p.rho};
        const auto& h0 = get(cell_label("h0", h0p, cell.n));
        for (int method = 0; method < 2; ++method) {
          const std::size_t col = method == 0 ? 2 : 3;
          const auto adj = adjust_significance(column(h0, col), cfg.s);
          const auto pv = column(recs, col);
          double rej = 0.0;
          for (double x : pv) rej += x < adj.s_tilde ? 1.0 : 0.0;
          sum.power.push_back({cell.n, p.rho, p.delta, method == 0 ? "hfbm" : "wcf", adj.s_tilde,
                               adj.achieved_size,
                               pv.empty() ? 0.0 : rej / static_cast<double>(pv.size()),
                               pv.size()});
        }
        break;
      }
    }
  }
  return sum;
}

nlohmann::json McSummary::to_json(bool include_timing) const {
  nlohmann::json j{{"study", to_string(kind)},
                   {"replications", replications},
                   {"skipped", skipped},
                   {"kurtosis", "excess"}};
  if (include_timing) j["wall_seconds"] = wall_seconds;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : estimation) {
    rows.push_back({{"model", r.model}, {"n", r.n}, {"param", r.param}, {"true", r.truth},
                    {"mean", r.mean}, {"bias", r.bias}, {"std", r.std},
                    {"skewness", r.skewness}, {"excess_kurtosis", r.excess_kurtosis},
                    {"reps", r.reps}});
  }
  for (const auto& r : ci) {
    rows.push_back({{"rho", r.rho}, {"n", r.n}, {"quantity", r.quantity}, {"mc", r.mc},
                    {"theo", r.theo}, {"est", r.est_mean}, {"ratio_theo", r.ratio_theo},
                    {"ratio_est", r.ratio_est}});
  }
  for (const auto& r : significance) {
    rows.push_back({{"n", r.n}, {"rho", r.rho}, {"method", r.method}, {"size", r.size},
                    {"mean_p", r.mean_p}, {"reps", r.reps}});
  }
  for (const auto& r : power) {
    rows.push_back({{"n", r.n}, {"rho", r.rho}, {"delta", r.delta}, {"method", r.method},
                    {"s_tilde", r.s_tilde}, {"h0_size", r.h0_size}, {"power", r.power},
                    {"reps", r.reps}});
  }
  j["rows"] = rows;
  return j;
}

void McSummary::write_table_csv(std::ostream& os) const {
  std::string out;
  switch (kind) {
    case StudyKind::Estimation:
      out = "model,n,param,true,mean,bias,std,skewness,excess_kurtosis,reps\n";
      for (const auto& r : estimation) {
        out += "\"" + r.model + "\"," + std::to_string(r.n) + "," + r.param + "," + num(r.truth) +
               "," + num(r.mean) + "," + num(r.bias) + "," + num(r.std) + "," +
               num(r.skewness) + "," + num(r.excess_kurtosis) + "," + std::to_string(r.reps) +
               "\n";
      }
      break;
    case StudyKind::CiQuality:
      out = "rho,n,quantity,mc,theo,est,ratio_theo,ratio_est\n";
      for (const auto& r : ci) {
        out += num(r.rho) + "," + std::to_string(r.n) + "," + r.quantity + "," + num(r.mc) + "," +
               num(r.theo) + "," + num(r.est_mean) + "," + num(r.ratio_theo) + "," +
               num(r.ratio_est) + "\n";
      }
      break;
    case StudyKind::Significance:
      out = "n,rho,method,size,mean_p\n";
      for (const auto& r : significance) {
        out += std::to_string(r.n) + "," + num(r.rho) + "," + r.method + "," + num(r.size) +
               "," + num(r.mean_p) + "\n";
      }
      break;
    case StudyKind::Power:
      out = "n,rho,delta,method,s_tilde,h0_size,power,reps\n";
      for (const auto& r : power) {
        out += std::to_string(r.n) + "," + num(r.rho) + "," + num(r.delta) + "," + r.method +
               "," + num(r.s_tilde) + "," + num(r.h0_size) + "," + num(r.power) + "," +
               std::to_string(r.reps) + "\n";
      }
      break;
  }
  os << out;
}

McRun run_estimation_study(const McStudyConfig& cfg) {
  if (cfg.kind != StudyKind::Estimation) throw InvalidArgument("not an estimation study");
  return run_cells(cfg);
}
McRun run_ci_quality_study(const McStudyConfig& cfg) {
  if (cfg.kind != StudyKind::CiQuality) throw InvalidArgument("not a ci_quality study");
  return run_cells(cfg);
}
McRun run_significance_study(const McStudyConfig& cfg) {
  if (cfg.kind != StudyKind::Significance) throw InvalidArgument("not a significance study");
  return run_cells(cfg);
}
McRun run_power_study(const McStudyConfig& cfg) {
  if (cfg.kind != StudyKind::Power) throw InvalidArgument("not a power study");
  return run_cells(cfg);
}
McRun run_study(const McStudyConfig& cfg) { return run_cells(cfg); }

void write_records_csv(StudyKind kind, const std::vector<McRecord>& records, std::ostream& os) {
  std::string out = "cell,n,rho,delta,rep,seed,status";
  for (const auto& c : record_columns(kind)) out += "," + c;
  out += "\n";
  const std::size_t ncol = record_columns(kind).size();
  for (const auto& r : records) {
    out += "\"" + r.cell + "\"," + std::to_string(r.n) + "," + num(r.rho) + "," + num(r.delta) +
           "," + std::to_string(r.rep) + "," + std::to_string(r.seed) + "," +
           (r.skipped ? "skipped" : "ok");
    for (std::size_t i = 0; i < ncol; ++i) out += "," + (r.skipped ? std::string() : num(r.values[i]));
    out += "\n";
  }
  os << out;
}

std::vector<McRecord> read_records_csv(std::istream& is) {
  std::vector<McRecord> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    McRecord r;
    if (line.front() != '"') throw InvalidArgument("malformed record row");
    const auto close = line.find('"', 1);
    r.cell = line.substr(1, close - 1);
    std::vector<std::string> f;
    std::stringstream ss(line.substr(close + 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (line.back() == ',') f.emplace_back();
    if (f.size() < 6) throw InvalidArgument("malformed record row");
    r.n = std::stoull(f[0]);
    std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.rho);
    std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.delta);
    r.rep = std::stoull(f[3]);
    r.seed = std::stoull(f[4]);
    r.skipped = f[5] == "skipped";
    if (!r.skipped) {
      for (std::size_t i = 6; i < f.size(); ++i) {
        double v = 0.0;
        std::from_chars(f[i].data(), f[i].data() + f[i].size(), v);
        r.values.push_back(v);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_plot_script(const McSummary& summary, const std::string& table_csv, std::ostream& os) {
  os << "# gnuplot script; data: " << table_csv << "\n"
     << "set datafile separator ','\n"
     << "set key outside\n"
     << "set logscale x 2\n"
     << "set xlabel 'n'\n";
  switch (summary.kind) {
    case StudyKind::Estimation:
      os << "set terminal pngcairo size 1200,400\n"
         << "set output 'estimation.png'\n"
         << "set multiplot layout 1,3\n"
         << "set ylabel 'bias'\n"
         << "plot for [p in 'a11 a22 a12 d12'] '" << table_csv
         << "' using (stringcolumn(3) eq p ? $2 : 1/0):6 with linespoints title p\n"
         << "set ylabel 'std'\nset logscale y\n"
         << "plot for [p in 'a11 a22 a12 d12'] '" << table_csv
         << "' using (stringcolumn(3) eq p ? $2 : 1/0):7 with linespoints title p\n"
         << "unset logscale y\nset ylabel 'skewness / excess kurtosis'\n"
         << "plot for [p in 'a11 a22 a12 d12'] '" << table_csv
         << "' using (stringcolumn(3) eq p ? $2 : 1/0):8 with linespoints title p.' skew', \\\n"
         << "     for [p in 'a11 a22 a12 d12'] '" << table_csv
         << "' using (stringcolumn(3) eq p ? $2 : 1/0):9 with points title p.' kurt'\n"
         << "unset multiplot\n";
      break;
    case StudyKind::CiQuality:
      os << "set terminal pngcairo size 800,400\nset output 'ci_quality.png'\n"
         << "set ylabel 'sqrt(approx/MC)'\n"
         << "plot for [q in 'var_a11 var_a12 cov_a11_a22 var_d12'] '" << table_csv
         << "' using (stringcolumn(3) eq q ? $2 : 1/0):7 with linespoints title q\n";
      break;
    case StudyKind::Significance:
      os << "set terminal pngcairo size 800,400\nset output 'significance.png'\n"
         << "set ylabel 'empirical size'\n"
         << "plot for [m in 'hfbm wcf'] '" << table_csv
         << "' using (stringcolumn(3) eq m ? $1 : 1/0):4 with points title m\n";
      break;
    case StudyKind::Power:
      os << "set terminal pngcairo size 800,400\nset output 'power.png'\n"
         << "set ylabel 'power at adjusted significance'\n"
         << "plot for [m in 'hfbm wcf'] '" << table_csv
         << "' using (stringcolumn(4) eq m ? $3 : 1/0):7 with points title m\n";
      break;
  }
}

}  // namespace hfbm
