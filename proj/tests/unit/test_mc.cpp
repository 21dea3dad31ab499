#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hfbm/errors.hpp"
#include "hfbm/fctest.hpp"
#include "hfbm/mc.hpp"
#include "hfbm/parallel.hpp"
#include "hfbm/rng.hpp"
#include "hfbm/stats.hpp"

using namespace hfbm;

namespace {

McStudyConfig small(StudyKind kind, std::size_t reps) {
  auto c = McStudyConfig::from_json({{"study", to_string(kind)}});
  c.n_grid = {1024, 2048};
  c.reps = reps;
  c.seed = 77;
  if (kind == StudyKind::Significance || kind == StudyKind::Power) c.rhos = {0.6};
  if (kind == StudyKind::Power) c.deltas = {0.1, 0.25};
  return c;
}

bool same_records(const std::vector<McRecord>& a, const std::vector<McRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].cell != b[i].cell || a[i].seed != b[i].seed || a[i].skipped != b[i].skipped ||
        a[i].values != b[i].values)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config defaults, validation and JSON round trip") {
  const auto est = McStudyConfig::from_json({{"study", "estimation"}});
  CHECK(est.octaves.j1 == 3);
  CHECK(est.octaves.j2(4096) == 10);
  CHECK(est.models.size() == 2);
  CHECK(est.weighting == Weighting::ByCount);
  const auto sig = McStudyConfig::from_json({{"study", "significance"}, {"reps", 40}, {"n", {512}}});
  CHECK(sig.octaves.j1 == 2);
  CHECK(sig.octaves.j2(1024) == 5);
  CHECK(sig.rhos == std::vector<double>{0.5, 0.7, 0.9});
  CHECK(sig.reps == 40);
  CHECK(sig.n_grid == std::vector<std::size_t>{512});

  const auto back = McStudyConfig::from_json(sig.to_json());
  CHECK(back.to_json() == sig.to_json());

  auto bad = est;
  bad.reps = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = est;
  bad.n_grid = {4096, 1024};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = small(StudyKind::Power, 20);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = est;
  bad.octaves.j2_offset = 9;
  bad.n_grid = {1024};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(McStudyConfig::from_json({{"study", "nope"}}), InvalidArgument);
  CHECK_THROWS_AS(McStudyConfig::from_json({{"study", "estimation"}, {"n_grid", {512}}}), InvalidArgument);
  CHECK_THROWS_AS(McStudyConfig::from_json({{"reps", 3}}), InvalidArgument);
  CHECK_THROWS_AS(run_study(bad), InvalidArgument);
}

TEST_CASE("estimation records reproduce the single-replication pipeline") {
  auto cfg = small(StudyKind::Estimation, 6);
  const auto run = run_study(cfg);
  REQUIRE(run.records.size() == 2 * 2 * 6);
  const auto& r = run.records[7];
  const ModelPoint& mp = cfg.models[0];
  CHECK(r.cell == "est/" + mp.label() + "/n=2048");
  CHECK(r.seed == derive_seed(cfg.seed, hash_label(r.cell), r.rep));
  const auto path = synthesize(mp.model(), r.n, r.seed);
  const int j2 = cfg.octaves.j2(r.n);
  const auto w = regression_weights(cfg.octaves.j1, j2, cfg.weighting, r.n);
  const auto e = estimate_delta(estimate_alpha(transform(path, cfg.octaves.j1, j2), w));
  REQUIRE(r.values.size() == 4);
  CHECK(r.values[0] == e.alpha(0, 0));
  CHECK(r.values[1] == e.alpha(1, 1));
  CHECK(r.values[2] == e.alpha(0, 1));
  CHECK(r.values[3] == e.delta(0, 1));
}

TEST_CASE("studies are bit-reproducible across thread counts") {
  for (auto kind : {StudyKind::Estimation, StudyKind::CiQuality, StudyKind::Significance}) {
    const auto cfg = small(kind, 5);
    set_thread_count(1);
    const auto a = run_study(cfg);
    set_thread_count(3);
    const auto b = run_study(cfg);
    set_thread_count(0);
    CHECK(same_records(a.records, b.records));
    CHECK(a.summary.to_json(false) == b.summary.to_json(false));
  }
}

TEST_CASE("summaries are a pure fold of the records") {
  const auto cfg = small(StudyKind::CiQuality, 8);
  const auto run = run_study(cfg);
  std::stringstream ss;
  write_records_csv(cfg.kind, run.records, ss);
  const auto back = read_records_csv(ss);
  CHECK(same_records(back, run.records));
  CHECK(summarize(cfg, back).to_json(false) == run.summary.to_json(false));

  const auto est = run_study(small(StudyKind::Estimation, 10));
  const auto& row = est.summary.estimation.front();
  std::vector<double> v;
  for (const auto& r : est.records)
    if (r.cell == "est/" + small(StudyKind::Estimation, 1).models[0].label() + "/n=1024")
      v.push_back(r.values[0]);
  const auto m = stats::moments(v);
  CHECK(row.param == "a11");
  CHECK(row.mean == doctest::Approx(m.mean).epsilon(1e-14));
  CHECK(row.std == doctest::Approx(std::sqrt(m.variance)).epsilon(1e-14));
  CHECK(row.bias == doctest::Approx(m.mean - row.truth).epsilon(1e-14));
  CHECK(row.excess_kurtosis == doctest::Approx(m.excess_kurtosis).epsilon(1e-12));
  CHECK(row.reps == 10);
}

TEST_CASE("table layouts") {
  const auto sig = run_study(small(StudyKind::Significance, 6));
  std::ostringstream os;
  sig.summary.write_table_csv(os);
  CHECK(os.str().rfind("n,rho,method,size,mean_p\n", 0) == 0);
  CHECK(sig.summary.significance.size() == 2 * 2);  // n x method
  for (const auto& r : sig.summary.significance) {
    CHECK(r.size >= 0.0);
    CHECK(r.size <= 1.0);
  }
  const auto j = sig.summary.to_json(false);
  CHECK(j.at("kurtosis") == "excess");
  CHECK_FALSE(j.contains("wall_seconds"));
  CHECK(sig.summary.to_json(true).contains("wall_seconds"));

  std::ostringstream plot;
  write_plot_script(sig.summary, "table.csv", plot);
  CHECK(plot.str().find("table.csv") != std::string::npos);
}

TEST_CASE("power study calibrates on H0 p-values of the same cell grid") {
  auto cfg = small(StudyKind::Power, 60);
  cfg.n_grid = {1024};
  const auto run = run_study(cfg);
  REQUIRE(run.summary.power.size() == 2 * 2);
  std::vector<double> h0;
  for (const auto& r : run.records)
    if (r.cell.rfind("h0/", 0) == 0 && !r.skipped) h0.push_back(r.values[2]);
  const auto adj = adjust_significance(h0, cfg.s);
  for (const auto& row : run.summary.power) {
    CHECK(row.reps == 60);
    if (row.method != "hfbm") continue;
    CHECK(row.s_tilde == adj.s_tilde);
    CHECK(row.h0_size == adj.achieved_size);
  }
  // larger delta, more power
  double p1 = 0, p2 = 0;
  for (const auto& row : run.summary.power) {
    if (row.method != "hfbm") continue;
    (row.delta < 0.2 ? p1 : p2) = row.power;
  }
  CHECK(p2 >= p1);
}

TEST_CASE("non-PSD cells are skipped and abort the study past the limit") {
  auto cfg = small(StudyKind::Estimation, 4);
  cfg.models = {{0.2, 0.6, 0.2, 0.95}};
  cfg.n_grid = {1024};
  cfg.clip = false;
  CHECK_THROWS_AS(run_study(cfg), StudyAborted);
  cfg.max_skip_fraction = 1.0;
  const auto run = run_study(cfg);
  CHECK(run.summary.skipped == 4);
  for (const auto& r : run.records) CHECK(r.skipped);
  cfg.clip = true;
  CHECK(run_study(cfg).summary.skipped == 0);
}
