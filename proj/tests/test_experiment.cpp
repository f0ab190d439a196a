#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "mocperc/experiment.hpp"
#include "mocperc/tally_io.hpp"

using namespace mocperc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mocperc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_1d() {
  return json::parse(R"({
    "ensemble": {"family": "moc1d", "num_sites": 32, "depth": 32, "p": 0.5},
    "iterations": 400, "translations": 4, "seed": 11,
    "measures": {"indirect": true},
    "geometry": {"k": [2, 3], "widths": [2], "spacings": [4, 6, 8, 10]}
  })");
}

json small_config(Family f) {
  switch (f) {
    case Family::kMoc1d: return small_1d();
    case Family::kMoc2d:
      return json::parse(R"({
        "ensemble": {"family": "moc2d", "side": 8, "depth": 8, "p": 0.25},
        "iterations": 200, "translations": 4, "seed": 3,
        "geometry": {"k": [2], "radii_sq": [1, 2]}
      })");
    case Family::kHyperbolic:
      return json::parse(R"({
        "ensemble": {"family": "hyperbolic", "num_sites": 32, "p": 0.5, "q": 0.2},
        "iterations": 300, "seed": 5,
        "geometry": {"k": [2], "widths": [1, 2], "even_spacing": true}
      })");
    case Family::kDyck:
      return json::parse(R"({
        "ensemble": {"family": "dyck", "num_sites": 32, "depth": 32, "p": 0.5},
        "iterations": 300, "seed": 9,
        "geometry": {"k": [2], "widths": [1], "spacings": [3, 5, 9]}
      })");
  }
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MOCPERC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfig, ParsesAndRoundTrips) {
  const auto cfg = RunConfig::from_json(small_1d());
  EXPECT_EQ(cfg.ensemble.num_sites, 32u);
  EXPECT_EQ(cfg.realizations(), 100u);
  EXPECT_TRUE(cfg.measures.indirect);
  EXPECT_NO_THROW(cfg.validate());
  const auto again = RunConfig::from_json(cfg.to_json());
  EXPECT_EQ(again.to_json(), cfg.to_json());
  RunConfig odd = cfg;
  odd.iterations = 401;
  EXPECT_EQ(odd.realizations(), 101u);
  EXPECT_EQ(cfg.shard_count(), 100u);
}

TEST(RunConfig, RejectsBadInput) {
  auto j = small_1d();
  j["bogus"] = 1;
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);
  const auto bad = [](auto mutate) {
    auto cfg = RunConfig::from_json(small_1d());
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(bad([](RunConfig& c) { c.iterations = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.workers = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.translations = 33; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.geometry_1d.widths = {20}; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.ensemble.p = 1.5; }).validate(), ConfigError);
  auto two = RunConfig::from_json(small_config(Family::kMoc2d));
  two.translations = 3;
  EXPECT_THROW(two.validate(), ConfigError);
  two.translations = 81;
  EXPECT_THROW(two.validate(), ConfigError);
  auto wg = RunConfig::from_json(small_config(Family::kDyck));
  wg.measures.weighted_graph = true;
  EXPECT_THROW(wg.validate(), ConfigError);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const auto dir = scratch("cli");
  auto j = small_1d();
  j["ensemble"]["p"] = -0.1;
  std::ofstream(dir / "bad.json") << j.dump();
  EXPECT_EQ(run_cli("run-1d --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("run-1d --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("run-2d --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("run-1d --no-such-flag"), 2);
  std::ofstream(dir / "good.json") << small_1d().dump();
  EXPECT_EQ(run_cli("run-1d --config " + (dir / "good.json").string() + " --out " +
                    (dir / "out").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "out" / "tallies.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "fits.json"));
  // The run-2d subcommand refuses a 1D family.
  EXPECT_EQ(run_cli("run-2d --config " + (dir / "good.json").string()), 2);
  EXPECT_EQ(run_cli("oracle-check --family moc1d --num-sites 6 --depth 6 --iterations 50"), 0);
}

TEST(Experiment, SingleSampleRun) {
  auto cfg = RunConfig::from_json(small_1d());
  cfg.iterations = 1;
  cfg.translations = 1;
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.realizations, 1u);
  for (const auto& t : res.hits.tallies()) {
    EXPECT_EQ(t.iterations, 1u);
    EXPECT_LE(t.gme_hits, 1u);
    EXPECT_LE(t.gme_hits + t.indirect_hits, 1u);
  }
}

TEST(Experiment, IterationsCountTranslations) {
  const auto cfg = RunConfig::from_json(small_1d());
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.realizations, 100u);
  for (const auto& t : res.hits.tallies()) EXPECT_EQ(t.iterations, 400u);
  const auto maps = translation_maps(cfg);
  ASSERT_EQ(maps.size(), 4u);
  EXPECT_EQ(maps[1][0], 8u);
  EXPECT_EQ(maps[3][31], 23u);
  const auto two = RunConfig::from_json(small_config(Family::kMoc2d));
  const auto m2 = translation_maps(two);
  ASSERT_EQ(m2.size(), 4u);
  EXPECT_EQ(m2[1][0], 4u);       // x shift by 4
  EXPECT_EQ(m2[2][0], 4u * 8u);  // y shift by 4
}

TEST(HitAccumulator, MergeLaws) {
  const auto cfg = RunConfig::from_json(small_1d());
  const auto plan = build_geometry_plan(cfg);
  const auto shifts = translation_maps(cfg);
  const auto a = run_shard(cfg, plan, shifts, 0, 30).hits;
  const auto b = run_shard(cfg, plan, shifts, 30, 70).hits;
  const auto c = run_shard(cfg, plan, shifts, 70, 100).hits;
  HitAccumulator ab = a;
  ab.merge(b);
  HitAccumulator ba = b;
  ba.merge(a);
  EXPECT_EQ(ab.tallies(), ba.tallies());
  HitAccumulator ab_c = ab;
  ab_c.merge(c);
  HitAccumulator bc = b;
  bc.merge(c);
  HitAccumulator a_bc = a;
  a_bc.merge(bc);
  EXPECT_EQ(ab_c.tallies(), a_bc.tallies());
  HitAccumulator empty(plan.keys);
  HitAccumulator id = a;
  id.merge(empty);
  EXPECT_EQ(id.tallies(), a.tallies());
  // Every shard split of the same realizations gives the same counts.
  EXPECT_EQ(ab_c.tallies(), run_shard(cfg, plan, shifts, 0, 100).hits.tallies());
  EXPECT_EQ(ab_c.tallies(), run_experiment(cfg).hits.tallies());

  auto other = cfg;
  other.geometry_1d.widths = {1};
  HitAccumulator mismatched(build_geometry_plan(other).keys);
  EXPECT_THROW(ab.merge(mismatched), std::invalid_argument);
}

class WorkerDeterminism : public ::testing::TestWithParam<Family> {};

TEST_P(WorkerDeterminism, TalliesAreByteIdentical) {
  auto base = RunConfig::from_json(small_config(GetParam()));
  base.shards = 8;
  std::string reference;
  for (std::uint32_t workers : {1u, 4u, 8u}) {
    auto cfg = base;
    cfg.workers = workers;
    cfg.out_dir = scratch("det_" + std::to_string(workers)).string();
    write_outputs(cfg, run_experiment(cfg));
    const std::string csv = slurp(fs::path(cfg.out_dir) / "tallies.csv");
    ASSERT_FALSE(csv.empty());
    if (reference.empty()) {
      reference = csv;
    } else {
      EXPECT_EQ(csv, reference) << "workers " << workers;
    }
  }
  // A different shard plan only regroups integer counts.
  auto serial = base;
  serial.shards = 1;
  serial.out_dir = scratch("det_serial").string();
  write_outputs(serial, run_experiment(serial));
  EXPECT_EQ(slurp(fs::path(serial.out_dir) / "tallies.csv"), reference);
}

INSTANTIATE_TEST_SUITE_P(Families, WorkerDeterminism,
                         ::testing::Values(Family::kMoc1d, Family::kMoc2d, Family::kHyperbolic,
                                           Family::kDyck),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Experiment, CheckpointResume) {
  auto cfg = RunConfig::from_json(small_1d());
  cfg.shards = 10;
  cfg.checkpoint_every = 20;
  cfg.workers = 2;
  cfg.out_dir = scratch("ckpt").string();
  const auto first = run_experiment(cfg);
  ASSERT_TRUE(fs::exists(fs::path(cfg.out_dir) / "checkpoint.json"));

  // Drop half of the completed shards, as if the run had been killed.
  const auto path = fs::path(cfg.out_dir) / "checkpoint.json";
  auto j = json::parse(slurp(path));
  for (int i = 0; i < 10; i += 2) j["completed"].erase(std::to_string(i));
  std::ofstream(path) << j.dump();
  const auto resumed = run_experiment(cfg);
  EXPECT_EQ(resumed.hits.tallies(), first.hits.tallies());
  EXPECT_EQ(resumed.realizations, first.realizations);

  auto changed = cfg;
  changed.seed = 12;
  EXPECT_THROW(run_experiment(changed), ConfigError);
}

TEST(TallyIo, CsvRoundTrip) {
  auto cfg = RunConfig::from_json(small_1d());
  const auto rows = tally_rows(run_experiment(cfg).hits);
  std::stringstream ss;
  write_tally_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kTallyHeader);
  const auto back = read_tally_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].family, rows[i].family);
    EXPECT_EQ(back[i].k, rows[i].k);
    EXPECT_EQ(back[i].width_or_radius, rows[i].width_or_radius);
    EXPECT_EQ(back[i].dx, rows[i].dx);
    EXPECT_NEAR(back[i].eta, rows[i].eta, 1e-9 * rows[i].eta);
    EXPECT_EQ(back[i].hits, rows[i].hits);
    EXPECT_EQ(back[i].mi_sum, rows[i].mi_sum);
    EXPECT_EQ(back[i].indirect_hits, rows[i].indirect_hits);
    EXPECT_EQ(back[i].iterations, rows[i].iterations);
  }
  std::stringstream broken("family,k\nmoc1d,2\n");
  EXPECT_THROW(read_tally_csv(broken), std::runtime_error);

  const auto acc = run_experiment(cfg).hits;
  HitAccumulator filled(acc.keys());
  accumulator_from_json(accumulator_to_json(acc), filled);
  EXPECT_EQ(filled.tallies(), acc.tallies());
}

TEST(Experiment, FitReportHasEveryK) {
  auto cfg = RunConfig::from_json(small_1d());
  cfg.iterations = 4000;
  cfg.translations = 32;
  const auto report = fit_report(tally_rows(run_experiment(cfg).hits), cfg);
  // Every (measure, k) ends up either fitted or listed with a reason.
  for (const char* measure : {"gme", "mi"}) {
    for (int k : {2, 3}) {
      int seen = 0;
      for (const auto& f : report.at("fits")) seen += f["measure"] == measure && f["k"] == k;
      for (const auto& f : report.at("failures")) seen += f["measure"] == measure && f["k"] == k;
      EXPECT_EQ(seen, 1) << measure << " k=" << k;
    }
  }
  EXPECT_EQ(report.at("family"), "moc1d");
}

TEST(WeightedGraph, BackgroundFarFromRegions) {
  // At p = 1/2 every bond is open with probability 1/2, so far from the
  // regions the hit-weighted average settles there.
  auto cfg = RunConfig::from_json(json::parse(R"({
    "ensemble": {"family": "moc1d", "num_sites": 64, "depth": 64, "p": 0.5},
    "iterations": 4000, "translations": 1, "seed": 21,
    "measures": {"weighted_graph": true},
    "geometry": {"k": [2], "widths": [4], "spacings": [8]},
    "weighted_graph": {"k": 2, "width": 4, "spacing": 8, "layers": 16, "margin": 8}
  })"));
  const auto res = run_experiment(cfg);
  ASSERT_TRUE(res.graph.has_value());
  const auto g = res.graph->finalize();
  ASSERT_EQ(g.horizontal.cols(), 64);
  // Columns 36..59 are at least 24 sites from both arcs.
  const double h = g.horizontal.middleCols(36, 24).mean();
  const double v = g.vertical.middleCols(36, 24).mean();
  EXPECT_NEAR(h, 0.5, 0.05);
  EXPECT_NEAR(v, 0.5, 0.05);
  // Near the arcs hits need open bonds.
  EXPECT_GT(g.horizontal.middleCols(2, 8).bottomRows(2).mean(), h);

  cfg.out_dir = scratch("wg").string();
  write_outputs(cfg, res);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "weighted_graph_horizontal.csv"));
}
