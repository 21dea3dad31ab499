// hfbm: synthesis, analysis, variance evaluation, testing and MC studies.
//
// Exit codes
//   0 ok
//   1 I/O failure (or an unexpected internal error)
//   2 invalid model / usage
//   3 circulant embedding not PSD with clipping disabled
//   4 series too short for the requested octaves
//   5 degenerate input or variance
//   6 MC study aborted (too many skipped replications)
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "hfbm/dwt.hpp"
#include "hfbm/errors.hpp"
#include "hfbm/estimate.hpp"
#include "hfbm/fctest.hpp"
#include "hfbm/mc.hpp"
#include "hfbm/model.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/simd.hpp"
#include "hfbm/synth.hpp"
#include "hfbm/varmodel.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kIo = 1, kUsage = 2, kPsd = 3, kShort = 4, kDegenerate = 5, kAborted = 6 };

// A config file is either a flat object of option values or a manifest with a "config" member.
json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw hfbm::IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw hfbm::InvalidArgument("config " + path + ": " + e.what());
  }
  if (j.contains("config") && j.at("config").is_object()) return j.at("config");
  if (!j.is_object()) throw hfbm::InvalidArgument("config " + path + " is not a JSON object");
  return j;
}

template <class T>
void overlay(json& cfg, const CLI::Option* opt, const char* key, const T& value) {
  if (opt->count() > 0) cfg[key] = value;
}

template <class T>
T get(const json& cfg, const char* key, T fallback) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw hfbm::InvalidArgument(std::string("config key '") + key + "' has the wrong type");
  }
}

bool to_stdout(const std::string& out) { return out == "-"; }

void check_output_dir(const std::string& out) {
  if (to_stdout(out)) return;
  const fs::path parent = fs::path(out).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw hfbm::IoError("output directory does not exist: " + parent.string());
  }
}

void write_text(const std::string& out, const std::string& text) {
  if (to_stdout(out)) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw hfbm::IoError("cannot open " + out + " for writing");
  os << text;
  if (!os) throw hfbm::IoError("write failed: " + out);
}

void write_manifest(const std::string& file, const std::string& command, const json& config,
                    json extra = json::object()) {
  json m{{"tool", "hfbm"}, {"version", kVersion}, {"command", command}, {"config", config}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_text(file, m.dump(2) + "\n");
}

std::string manifest_path(const std::string& out, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (to_stdout(out)) return {};
  return out + ".manifest.json";
}

// Model from {"model": {...}} or a path under "model_file", else inline bivariate parameters.
hfbm::HfBmModel model_from_config(const json& cfg) {
  hfbm::HfBmModel model;
  if (cfg.contains("model") && cfg.at("model").is_object()) {
    model = hfbm::model_from_json(cfg.at("model"));
  } else if (cfg.contains("model_file")) {
    model = hfbm::load_model(cfg.at("model_file").get<std::string>());
  } else if (cfg.contains("alpha11")) {
    const auto reg = get<std::string>(cfg, "regularization", "ideal") == "gaussian"
                         ? hfbm::Regularization::GaussianSpectral
                         : hfbm::Regularization::Ideal;
    model = hfbm::bivariate(get(cfg, "alpha11", 0.0), get(cfg, "alpha22", 0.0),
                            get(cfg, "delta", 0.0), get(cfg, "rho", 0.0), reg);
  } else {
    throw hfbm::InvalidArgument("no model given (use --model or --alpha11/--alpha22/--delta/--rho)");
  }
  const auto v = hfbm::validate_model(model);
  if (!v.ok()) throw hfbm::AdmissibilityError("inadmissible model:\n" + v.describe());
  return model;
}

struct ModelFlags {
  std::string model_file;
  double alpha11 = 0, alpha22 = 0, delta = 0, rho = 0;
  std::string regularization = "ideal";
  CLI::Option *file_opt{}, *a11{}, *a22{}, *d{}, *r{}, *reg{};

  void add(CLI::App* sub) {
    file_opt = sub->add_option("--model", model_file, "model JSON file");
    auto* g = sub->add_option_group("inline model", "bivariate model parameters");
    a11 = g->add_option("--alpha11", alpha11, "alpha of component 1 (2h)");
    a22 = g->add_option("--alpha22", alpha22, "alpha of component 2");
    d = g->add_option("--delta", delta, "fractal-connectivity parameter");
    r = g->add_option("--rho", rho, "correlation (spectral convention)");
    reg = g->add_option("--regularization", regularization, "ideal|gaussian")
              ->check(CLI::IsMember({"ideal", "gaussian"}));
    g->excludes(file_opt);
  }
  void overlay_into(json& cfg) const {
    if (file_opt->count()) {
      cfg.erase("model");
      cfg.erase("alpha11");
      cfg["model_file"] = model_file;
    }
    if (a11->count()) {
      cfg.erase("model");
      cfg.erase("model_file");
    }
    overlay(cfg, a11, "alpha11", alpha11);
    overlay(cfg, a22, "alpha22", alpha22);
    overlay(cfg, d, "delta", delta);
    overlay(cfg, r, "rho", rho);
    overlay(cfg, reg, "regularization", regularization);
  }
};

struct OctaveFlags {
  int j1 = 0, j2 = 0;
  std::string weighting = "by_count";
  CLI::Option *oj1{}, *oj2{}, *ow{};
  void add(CLI::App* sub) {
    oj1 = sub->add_option("--j1", j1, "first regression octave");
    oj2 = sub->add_option("--j2", j2, "last regression octave");
    ow = sub->add_option("--weighting", weighting, "uniform|by_count")
             ->check(CLI::IsMember({"uniform", "by_count"}));
  }
  void overlay_into(json& cfg) const {
    overlay(cfg, oj1, "j1", j1);
    overlay(cfg, oj2, "j2", j2);
    overlay(cfg, ow, "weighting", weighting);
  }
  // Fills unset octaves from the default policy and records them in cfg.
  std::pair<int, int> resolve(json& cfg, std::size_t n) const {
    const auto def = hfbm::default_octaves(n);
    const int a = get(cfg, "j1", def.first);
    const int b = get(cfg, "j2", def.second);
    if (a < 1 || b <= a) throw hfbm::InvalidArgument("need 1 <= j1 < j2");
    cfg["j1"] = a;
    cfg["j2"] = b;
    cfg["weighting"] = get<std::string>(cfg, "weighting", "by_count");
    return {a, b};
  }
};

// ---- synth

struct SynthArgs {
  std::string config, out, manifest, format;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool no_clip = false;
  ModelFlags model;
  CLI::Option *on{}, *oseed{}, *ofmt{}, *onoclip{};
};

int cmd_synth(const SynthArgs& a) {
  json cfg = load_config(a.config);
  a.model.overlay_into(cfg);
  overlay(cfg, a.on, "n", a.n);
  overlay(cfg, a.oseed, "seed", a.seed);
  overlay(cfg, a.ofmt, "format", a.format);
  if (a.onoclip->count()) cfg["clip"] = false;

  const hfbm::HfBmModel model = model_from_config(cfg);
  const auto n = get<std::size_t>(cfg, "n", 0);
  if (n < 2) throw hfbm::InvalidArgument("--n must be >= 2");
  const auto seed = get<std::uint64_t>(cfg, "seed", 0);
  const std::string format = get<std::string>(cfg, "format", "csv");
  if (format != "csv" && format != "binary") throw hfbm::InvalidArgument("format must be csv|binary");
  const bool clip = get(cfg, "clip", true);
  cfg["model"] = hfbm::to_json(model);
  cfg.erase("model_file");
  for (const char* k : {"alpha11", "alpha22", "delta", "rho", "regularization"}) cfg.erase(k);
  cfg["n"] = n;
  cfg["seed"] = seed;
  cfg["format"] = format;
  cfg["clip"] = clip;

  check_output_dir(a.out);
  if (to_stdout(a.out) && format == "binary") {
    throw hfbm::InvalidArgument("binary output cannot go to stdout");
  }
  const hfbm::CirculantSynthesizer synth(model, n, hfbm::SynthOptions{clip});
  const auto& rep = synth.report();
  if (!rep.psd) {
    std::cerr << "warning: clipped " << rep.negative_frequencies.size()
              << " negative spectral eigenvalue(s); min " << rep.global_min << " at frequency "
              << rep.argmin_frequency << ", clipped mass " << rep.clipped_mass << "\n";
  }
  const hfbm::MultiPath path = synth.draw(seed);
  if (format == "binary") {
    hfbm::write_binary(path, a.out);
  } else if (to_stdout(a.out)) {
    hfbm::write_csv(path, std::cout);
  } else {
    hfbm::write_csv(path, a.out);
  }
  const std::string mf = manifest_path(a.out, a.manifest);
  if (!mf.empty()) write_manifest(mf, "synth", cfg, {{"spectral", rep.to_json()}});
  return kOk;
}

// ---- analyze

struct AnalyzeArgs {
  std::string config, input, out, manifest;
  double level = 0.95, s = 0.1;
  bool wcf = false;
  OctaveFlags oct;
  CLI::Option *oin{}, *olevel{}, *os{}, *owcf{};
};

hfbm::MultiPath read_input(json& cfg) {
  const auto input = get<std::string>(cfg, "input", "");
  if (input.empty()) throw hfbm::InvalidArgument("no input path given");
  return hfbm::read_path(input);
}

json pair_tests(const hfbm::ScalingEstimate& est, const hfbm::EstimatorCovariance* cov,
                const hfbm::WaveletPyramid& pyr, int q1, int q2, double s, bool hfbm_on,
                bool wcf_on) {
  json out = json::array();
  if (hfbm_on && cov) {
    out.push_back(hfbm::hfbm_test(est.delta(q1, q2), cov->var_delta(q1, q2), s, q1, q2).to_json());
  }
  if (wcf_on) out.push_back(hfbm::wcf_test(pyr, q1, q2, est.j1, est.j2, s).to_json());
  return out;
}

// analyze treats WCF as optional extra output: a WCF precondition failure is reported inline.
json optional_wcf(const hfbm::WaveletPyramid& pyr, int q1, int q2, int j1, int j2, double s) {
  try {
    return hfbm::wcf_test(pyr, q1, q2, j1, j2, s).to_json();
  } catch (const hfbm::SeriesTooShort& e) {
    return {{"pair", {q1 + 1, q2 + 1}}, {"method", "wcf"}, {"error", e.what()}};
  } catch (const hfbm::DegenerateCoherence& e) {
    return {{"pair", {q1 + 1, q2 + 1}}, {"method", "wcf"}, {"error", e.what()}};
  }
}

int cmd_analyze(const AnalyzeArgs& a) {
  json cfg = load_config(a.config);
  overlay(cfg, a.oin, "input", a.input);
  overlay(cfg, a.olevel, "level", a.level);
  overlay(cfg, a.os, "s", a.s);
  if (a.owcf->count()) cfg["wcf"] = true;
  a.oct.overlay_into(cfg);

  const hfbm::MultiPath path = read_input(cfg);
  const auto [j1, j2] = a.oct.resolve(cfg, path.n());
  const double level = get(cfg, "level", 0.95);
  const double s = get(cfg, "s", 0.1);
  const bool wcf = get(cfg, "wcf", false);
  cfg["level"] = level;
  cfg["s"] = s;
  cfg["wcf"] = wcf;
  check_output_dir(a.out);

  const hfbm::WaveletPyramid pyr = hfbm::transform(path, j1, j2);
  const auto w = hfbm::regression_weights(
      j1, j2, hfbm::weighting_from_string(cfg.at("weighting").get<std::string>()), path.n());
  const hfbm::ScalingEstimate est = hfbm::estimate_all(path, pyr, w);
  const hfbm::PluginReport plug = hfbm::plugin_covariance(est, w, level);

  json report{{"m", path.m()}, {"n", path.n()}, {"estimate", est.to_json()},
              {"covariance", plug.to_json()}};
  json tests = json::array();
  for (int q1 = 0; q1 < path.m(); ++q1) {
    for (int q2 = q1 + 1; q2 < path.m(); ++q2) {
      for (auto& t : pair_tests(est, &plug.cov, pyr, q1, q2, s, true, false)) tests.push_back(t);
      if (wcf) tests.push_back(optional_wcf(pyr, q1, q2, j1, j2, s));
    }
  }
  report["tests"] = tests;
  write_text(a.out, report.dump(2) + "\n");
  const std::string mf = manifest_path(a.out, a.manifest);
  if (!mf.empty()) write_manifest(mf, "analyze", cfg);
  return kOk;
}

// ---- fctest

struct FcTestArgs {
  std::string config, input, out, manifest, method = "both";
  double s = 0.1;
  int q1 = 0, q2 = 0;
  OctaveFlags oct;
  CLI::Option *oin{}, *os{}, *omethod{}, *oq1{}, *oq2{};
};

int cmd_fctest(const FcTestArgs& a) {
  json cfg = load_config(a.config);
  overlay(cfg, a.oin, "input", a.input);
  overlay(cfg, a.os, "s", a.s);
  overlay(cfg, a.omethod, "method", a.method);
  overlay(cfg, a.oq1, "q1", a.q1);
  overlay(cfg, a.oq2, "q2", a.q2);
  a.oct.overlay_into(cfg);

  const hfbm::MultiPath path = read_input(cfg);
  if (path.m() < 2) throw hfbm::InvalidArgument("fctest needs at least two components");
  const auto [j1, j2] = a.oct.resolve(cfg, path.n());
  const double s = get(cfg, "s", 0.1);
  const std::string method = get<std::string>(cfg, "method", "both");
  if (method != "hfbm" && method != "wcf" && method != "both") {
    throw hfbm::InvalidArgument("method must be hfbm|wcf|both");
  }
  cfg["s"] = s;
  cfg["method"] = method;
  // 1-based pair selection; 0 means every pair.
  const int p1 = get(cfg, "q1", 0), p2 = get(cfg, "q2", 0);
  if ((p1 == 0) != (p2 == 0) || p1 < 0 || p2 < 0 || p1 > path.m() || p2 > path.m() ||
      (p1 != 0 && p1 == p2)) {
    throw hfbm::InvalidArgument("--q1/--q2 must name two distinct components (1-based)");
  }
  check_output_dir(a.out);

  const bool need_hfbm = method != "wcf";
  const hfbm::WaveletPyramid pyr = hfbm::transform(path, j1, j2);
  const auto w = hfbm::regression_weights(
      j1, j2, hfbm::weighting_from_string(cfg.at("weighting").get<std::string>()), path.n());
  const hfbm::ScalingEstimate est = hfbm::estimate_all(path, pyr, w);
  std::optional<hfbm::EstimatorCovariance> cov;
  if (need_hfbm) cov = hfbm::plugin_covariance(est, w).cov;

  json tests = json::array();
  auto run = [&](int q1, int q2) {
    for (auto& t : pair_tests(est, cov ? &*cov : nullptr, pyr, q1, q2, s, need_hfbm,
                              method != "hfbm")) {
      tests.push_back(t);
    }
  };
  if (p1 != 0) {
    run(std::min(p1, p2) - 1, std::max(p1, p2) - 1);
  } else {
    for (int q1 = 0; q1 < path.m(); ++q1) {
      for (int q2 = q1 + 1; q2 < path.m(); ++q2) run(q1, q2);
    }
  }
  write_text(a.out, json{{"tests", tests}}.dump(2) + "\n");
  const std::string mf = manifest_path(a.out, a.manifest);
  if (!mf.empty()) write_manifest(mf, "fctest", cfg);
  return kOk;
}

// ---- varcalc

struct VarcalcArgs {
  std::string config, out, manifest;
  std::size_t n = 0;
  bool terms = false, first = false;
  ModelFlags model;
  OctaveFlags oct;
  CLI::Option *on{}, *oterms{}, *ofirst{};
};

int cmd_varcalc(const VarcalcArgs& a) {
  json cfg = load_config(a.config);
  a.model.overlay_into(cfg);
  a.oct.overlay_into(cfg);
  overlay(cfg, a.on, "n", a.n);
  if (a.oterms->count()) cfg["terms"] = true;
  if (a.ofirst->count()) cfg["first_order"] = true;

  const hfbm::HfBmModel model = model_from_config(cfg);
  const auto n = get<std::size_t>(cfg, "n", 0);
  if (n < 16) throw hfbm::InvalidArgument("--n must be >= 16");
  const auto [j1, j2] = a.oct.resolve(cfg, n);
  if (hfbm::detail_count(n, j2) < 1) throw hfbm::SeriesTooShort("n too small for octave j2");
  const bool terms = get(cfg, "terms", false);
  const bool first = get(cfg, "first_order", false);
  cfg["n"] = n;
  cfg["terms"] = terms;
  cfg["first_order"] = first;
  check_output_dir(a.out);

  const auto w = hfbm::regression_weights(
      j1, j2, hfbm::weighting_from_string(cfg.at("weighting").get<std::string>()), n);
  const auto params = hfbm::theoretical_params(model);
  const hfbm::WaveletCorrelation wc(params, j1, j2, n);
  const auto cov = hfbm::estimator_covariance(wc, w, terms);
  json report = hfbm::covariance_to_json(cov);
  report["model"] = hfbm::to_json(model);
  report["n"] = n;
  report["j1"] = j1;
  report["j2"] = j2;
  if (terms) {
    json t = json::array();
    for (const auto& e : cov.cov) {
      if (!e.terms) continue;
      const double tot = e.terms->total();
      t.push_back({{"pair1", {e.a.q1 + 1, e.a.q2 + 1}},
                   {"pair2", {e.b.q1 + 1, e.b.q2 + 1}},
                   {"term1", e.terms->term1},
                   {"term2", e.terms->term2},
                   {"term3", e.terms->term3},
                   {"fractions", tot != 0.0 ? json{e.terms->term1 / tot, e.terms->term2 / tot,
                                                   e.terms->term3 / tot}
                                            : json(nullptr)}});
    }
    report["terms"] = t;
  }
  if (first && model.m >= 2) {
    using FO = hfbm::FirstOrder;
    json f;
    const std::pair<const char*, FO> which[] = {{"var_alpha_auto", FO::VarAlphaAuto},
                                                {"var_alpha_cross", FO::VarAlphaCross},
                                                {"cov_auto_auto", FO::CovAutoAuto},
                                                {"cov_auto_cross", FO::CovAutoCross},
                                                {"var_delta", FO::VarDelta}};
    for (const auto& [name, k] : which) {
      try {
        f[name] = hfbm::first_order(params, j1, j2, w, n, k);
      } catch (const hfbm::InfiniteVariance&) {
        f[name] = nullptr;
      }
    }
    report["first_order"] = f;
  }
  write_text(a.out, report.dump(2) + "\n");
  const std::string mf = manifest_path(a.out, a.manifest);
  if (!mf.empty()) write_manifest(mf, "varcalc", cfg);
  return kOk;
}

// ---- mc

struct McArgs {
  std::string config, study, out, out_dir, manifest, weighting;
  std::size_t reps = 0;
  std::vector<std::size_t> n;
  std::vector<double> rhos, deltas;
  std::uint64_t seed = 0;
  int j1 = 0, j2_offset = 0;
  double s = 0.1;
  bool no_clip = false;
  CLI::Option *ostudy{}, *oreps{}, *on{}, *orhos{}, *odeltas{}, *oseed{}, *oj1{}, *oj2{}, *ow{},
      *os{}, *onoclip{};
};

int cmd_mc(const McArgs& a) {
  json cfg = load_config(a.config);
  overlay(cfg, a.ostudy, "study", a.study);
  overlay(cfg, a.oreps, "reps", a.reps);
  overlay(cfg, a.on, "n", a.n);
  overlay(cfg, a.orhos, "rhos", a.rhos);
  overlay(cfg, a.odeltas, "deltas", a.deltas);
  overlay(cfg, a.oseed, "seed", a.seed);
  overlay(cfg, a.oj1, "j1", a.j1);
  overlay(cfg, a.oj2, "j2_offset", a.j2_offset);
  overlay(cfg, a.ow, "weighting", a.weighting);
  overlay(cfg, a.os, "s", a.s);
  if (a.onoclip->count()) cfg["clip"] = false;
  if (!cfg.contains("study")) throw hfbm::InvalidArgument("--study is required");
  if (cfg.contains("reps") && cfg.at("reps").is_number_integer() && cfg.at("reps").get<long>() <= 0) {
    throw hfbm::InvalidArgument("replication count must be >= 1");
  }

  const hfbm::McStudyConfig study = hfbm::McStudyConfig::from_json(cfg);
  study.validate();
  if (a.out.empty() && a.out_dir.empty()) throw hfbm::InvalidArgument("give --out-dir or -o");
  if (!a.out_dir.empty() && !fs::is_directory(a.out_dir)) {
    throw hfbm::IoError("output directory does not exist: " + a.out_dir);
  }
  if (!a.out.empty()) check_output_dir(a.out);

  const hfbm::McRun run = hfbm::run_study(study);
  std::cerr << "mc " << hfbm::to_string(study.kind) << ": " << run.summary.replications
            << " replications, " << run.summary.skipped << " skipped, "
            << run.summary.wall_seconds << " s\n";

  std::ostringstream table;
  run.summary.write_table_csv(table);
  if (!a.out.empty()) write_text(a.out, table.str());
  if (!a.out_dir.empty()) {
    const fs::path dir(a.out_dir);
    write_text((dir / "table.csv").string(), table.str());
    write_text((dir / "summary.json").string(), run.summary.to_json(false).dump(2) + "\n");
    std::ostringstream recs;
    hfbm::write_records_csv(study.kind, run.records, recs);
    write_text((dir / "records.csv").string(), recs.str());
    std::ostringstream plot;
    hfbm::write_plot_script(run.summary, "table.csv", plot);
    write_text((dir / "plot.gp").string(), plot.str());
    write_manifest((dir / "manifest.json").string(), "mc", study.to_json(),
                   {{"wall_seconds", run.summary.wall_seconds}});
  } else {
    const std::string mf = manifest_path(a.out, a.manifest);
    if (!mf.empty()) write_manifest(mf, "mc", study.to_json());
  }
  return kOk;
}

int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const hfbm::IoError& x) {
    std::cerr << "error: " << x.what() << "\n";
    return kIo;
  } catch (const hfbm::EmbeddingNotPsd& x) {
    std::cerr << "error: " << x.what() << "\n";
    return kPsd;
  } catch (const hfbm::SeriesTooShort& x) {
    std::cerr << "error: " << x.what() << "\n";
    return kShort;
  } catch (const hfbm::StudyAborted& x) {
    std::cerr << "error: study aborted: " << x.what() << "\n";
    return kAborted;
  } catch (const hfbm::DegenerateVariance& x) {
    std::cerr << "error: degenerate: " << x.what() << "\n";
    return kDegenerate;
  } catch (const hfbm::DegenerateInput& x) {
    std::cerr << "error: degenerate: " << x.what() << "\n";
    return kDegenerate;
  } catch (const hfbm::InfiniteVariance& x) {
    std::cerr << "error: degenerate: " << x.what() << "\n";
    return kDegenerate;
  } catch (const hfbm::InvalidVariance& x) {
    std::cerr << "error: degenerate: " << x.what() << "\n";
    return kDegenerate;
  } catch (const hfbm::DegenerateCoherence& x) {
    std::cerr << "error: degenerate: " << x.what() << "\n";
    return kDegenerate;
  } catch (const hfbm::InvalidArgument& x) {
    std::cerr << "error: " << x.what() << "\n";
    return kUsage;
  } catch (const hfbm::AdmissibilityError& x) {
    std::cerr << "error: " << x.what() << "\n";
    return kUsage;
  } catch (const std::exception& x) {
    std::cerr << "error: " << x.what() << "\n";
    return kIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hadamard fBm toolkit: synthesis, wavelet analysis and fractal-connectivity tests"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: HFBM_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "synthesize a multivariate HfBm path");
  synth->add_option("--config", sa.config, "JSON config or manifest");
  sa.model.add(synth);
  sa.on = synth->add_option("--n", sa.n, "path length");
  sa.oseed = synth->add_option("--seed", sa.seed, "RNG seed");
  sa.ofmt = synth->add_option("--format", sa.format, "csv|binary")
                ->check(CLI::IsMember({"csv", "binary"}));
  sa.onoclip = synth->add_flag("--no-clip", sa.no_clip, "fail instead of clipping negative eigenvalues");
  synth->add_option("-o,--output", sa.out, "output file ('-' for stdout)")->required();
  synth->add_option("--manifest", sa.manifest, "manifest path (default <output>.manifest.json)");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "estimate scaling exponents, CIs and tests");
  analyze->add_option("--config", aa.config, "JSON config or manifest");
  aa.oin = analyze->add_option("-i,--input", aa.input, "path file (CSV or binary)");
  aa.oct.add(analyze);
  aa.olevel = analyze->add_option("--level", aa.level, "confidence level");
  aa.os = analyze->add_option("--s", aa.s, "test significance");
  aa.owcf = analyze->add_flag("--wcf", aa.wcf, "also run the wavelet-coherence test");
  analyze->add_option("-o,--output", aa.out, "report JSON ('-' for stdout)")->required();
  analyze->add_option("--manifest", aa.manifest, "manifest path");

  VarcalcArgs va;
  auto* varcalc = app.add_subcommand("varcalc", "finite-sample estimator covariance for a model");
  varcalc->add_option("--config", va.config, "JSON config or manifest");
  va.model.add(varcalc);
  va.oct.add(varcalc);
  va.on = varcalc->add_option("--n", va.n, "series length");
  va.oterms = varcalc->add_flag("--terms", va.terms, "include the three-term decomposition");
  va.ofirst = varcalc->add_flag("--first-order", va.first, "include first-order approximations");
  varcalc->add_option("-o,--output", va.out, "report JSON ('-' for stdout)")->required();
  varcalc->add_option("--manifest", va.manifest, "manifest path");

  FcTestArgs fa;
  auto* fctest = app.add_subcommand("fctest", "test fractal connectivity on an existing path");
  fctest->add_option("--config", fa.config, "JSON config or manifest");
  fa.oin = fctest->add_option("-i,--input", fa.input, "path file (CSV or binary)");
  fa.oct.add(fctest);
  fa.os = fctest->add_option("--s", fa.s, "significance");
  fa.omethod = fctest->add_option("--method", fa.method, "hfbm|wcf|both")
                   ->check(CLI::IsMember({"hfbm", "wcf", "both"}));
  fa.oq1 = fctest->add_option("--q1", fa.q1, "first component (1-based)");
  fa.oq2 = fctest->add_option("--q2", fa.q2, "second component (1-based)");
  fctest->add_option("-o,--output", fa.out, "report JSON ('-' for stdout)")->required();
  fctest->add_option("--manifest", fa.manifest, "manifest path");

  McArgs ma;
  auto* mc = app.add_subcommand("mc", "Monte Carlo studies");
  mc->add_option("--config", ma.config, "study config JSON or manifest");
  ma.ostudy = mc->add_option("--study", ma.study, "estimation|ci_quality|significance|power");
  ma.oreps = mc->add_option("--reps", ma.reps, "replications per cell");
  ma.on = mc->add_option("--n", ma.n, "series lengths")->delimiter(',');
  ma.orhos = mc->add_option("--rhos", ma.rhos, "rho grid (test studies)")->delimiter(',');
  ma.odeltas = mc->add_option("--deltas", ma.deltas, "delta grid (power study)")->delimiter(',');
  ma.oseed = mc->add_option("--seed", ma.seed, "master seed");
  ma.oj1 = mc->add_option("--j1", ma.j1, "first octave");
  ma.oj2 = mc->add_option("--j2-offset", ma.j2_offset, "j2 = floor(log2 n) - offset");
  ma.ow = mc->add_option("--weighting", ma.weighting, "uniform|by_count")
              ->check(CLI::IsMember({"uniform", "by_count"}));
  ma.os = mc->add_option("--s", ma.s, "nominal significance");
  ma.onoclip = mc->add_flag("--no-clip", ma.no_clip, "skip non-PSD cells instead of clipping");
  mc->add_option("-o,--output", ma.out, "table CSV ('-' for stdout)");
  mc->add_option("--out-dir", ma.out_dir, "directory for table, summary, records, plot script");
  mc->add_option("--manifest", ma.manifest, "manifest path when writing with -o");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (threads > 0) hfbm::set_thread_count(threads);

  try {
    if (*synth) return cmd_synth(sa);
    if (*analyze) return cmd_analyze(aa);
    if (*varcalc) return cmd_varcalc(va);
    if (*fctest) return cmd_fctest(fa);
    if (*mc) return cmd_mc(ma);
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  return kUsage;
}
