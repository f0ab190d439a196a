// Command-line driver: Monte Carlo runs, fits, angle averages and the
// stabilizer cross-check.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "mocperc/analysis.hpp"
#include "mocperc/experiment.hpp"
#include "mocperc/stabilizer.hpp"
#include "mocperc/tally_io.hpp"

using namespace mocperc;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint32_t> workers;
  std::optional<std::uint32_t> translations;
  std::optional<std::string> out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")->required();
  cmd->add_option("--seed", f.seed, "master seed (overrides config)");
  cmd->add_option("--iterations", f.iterations, "samples per geometry (overrides config)");
  cmd->add_option("--workers", f.workers, "worker threads (overrides config)");
  cmd->add_option("--translations", f.translations,
                  "lattice translations per realization (overrides config)");
  cmd->add_option("--out", f.out, "output directory (overrides config)");
}

RunConfig resolve(const RunFlags& f) {
  RunConfig cfg = load_run_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.iterations) cfg.iterations = *f.iterations;
  if (f.workers) cfg.workers = *f.workers;
  if (f.translations) cfg.translations = *f.translations;
  if (f.out) cfg.out_dir = *f.out;
  return cfg;
}

int run(const RunFlags& f, std::optional<Family> expected, bool weighted) {
  RunConfig cfg = resolve(f);
  if (expected && cfg.ensemble.family != *expected) {
    throw ConfigError("config family '" + std::string(to_string(cfg.ensemble.family)) +
                      "' does not match this subcommand");
  }
  if (weighted) cfg.measures.weighted_graph = true;
  cfg.validate();
  const ExperimentResult result = run_experiment(cfg);
  write_outputs(cfg, result);
  const double per_second = result.seconds > 0 ? result.realizations / result.seconds : 0.0;
  std::fprintf(stderr, "%llu realizations x %u translations in %.1f s (%.1f realizations/s)\n",
               static_cast<unsigned long long>(result.realizations), cfg.translations,
               result.seconds, per_second);
  std::fprintf(stderr, "wrote %s\n", cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-only circuit percolation simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_1d = app.add_subcommand("run-1d", "1+1D measurement-only circuit");
  auto* run_2d = app.add_subcommand("run-2d", "2+1D measurement-only circuit");
  auto* run_hyp = app.add_subcommand("run-hyperbolic", "hyperbolic tree circuit");
  auto* run_dyck = app.add_subcommand("run-dyck", "Dyck word circuit");
  auto* run_wg = app.add_subcommand("weighted-graph", "1+1D run with entanglement-weighted graph");
  for (auto* cmd : {run_1d, run_2d, run_hyp, run_dyck, run_wg}) add_run_flags(cmd, run_flags);

  std::string tallies;
  std::string fit_config;
  std::uint32_t fit_side = 0;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "fit exponents from a tally CSV");
  fit->add_option("--tallies", tallies, "tally CSV")->required();
  fit->add_option("--config", fit_config, "run config supplying windows and lattice size");
  fit->add_option("--side", fit_side, "torus side, when no config is given");
  fit->add_option("--out", fit_out, "write the report here instead of stdout");

  std::uint32_t aa_side = 0;
  std::uint32_t aa_k = 2;
  double aa_radius = 0.0;
  std::vector<double> aa_etas;
  int aa_angles = 64;
  bool aa_mi = false;
  auto* aa = app.add_subcommand("angle-average", "angle-averaged rates from a 2D tally CSV");
  aa->add_option("--tallies", tallies, "tally CSV")->required();
  aa->add_option("--side", aa_side, "torus side L")->required();
  aa->add_option("--radius", aa_radius, "disc radius")->required();
  aa->add_option("--k", aa_k, "number of parties");
  aa->add_option("--eta", aa_etas, "eta values")->required();
  aa->add_option("--num-angles", aa_angles, "angles on each contour");
  aa->add_flag("--mi", aa_mi, "average mutual information instead of hits");

  std::string oc_family = "moc1d";
  std::uint32_t oc_sites = 8;
  std::uint32_t oc_depth = 8;
  double oc_p = 0.5;
  double oc_q = 0.0;
  std::uint64_t oc_count = 1000;
  std::uint64_t oc_seed = 1;
  auto* oc = app.add_subcommand("oracle-check", "compare percolation and tableau partitions");
  oc->add_option("--family", oc_family, "moc1d, moc2d, hyperbolic or dyck");
  oc->add_option("--num-sites", oc_sites, "sites (torus side for moc2d)");
  oc->add_option("--depth", oc_depth, "circuit depth");
  oc->add_option("--p", oc_p, "measurement probability");
  oc->add_option("--q", oc_q, "hyperbolic branching probability");
  oc->add_option("--iterations", oc_count, "realizations to check");
  oc->add_option("--seed", oc_seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_1d) return run(run_flags, Family::kMoc1d, false);
    if (*run_2d) return run(run_flags, Family::kMoc2d, false);
    if (*run_hyp) return run(run_flags, Family::kHyperbolic, false);
    if (*run_dyck) return run(run_flags, Family::kDyck, false);
    if (*run_wg) return run(run_flags, Family::kMoc1d, true);

    if (*fit) {
      const auto rows = read_tally_csv(tallies);
      RunConfig cfg;
      if (!fit_config.empty()) {
        cfg = load_run_config(fit_config);
      } else {
        if (rows.empty()) throw ConfigError("tally file has no rows");
        cfg.ensemble.family = family_from_string(rows.front().family);
        cfg.ensemble.side = fit_side;
        if (cfg.ensemble.family == Family::kMoc2d && fit_side == 0) {
          throw ConfigError("2D tallies need --side or --config");
        }
      }
      const std::string report = fit_report(rows, cfg).dump(2);
      if (fit_out.empty()) {
        std::cout << report << '\n';
      } else {
        std::ofstream(fit_out) << report << '\n';
      }
      return 0;
    }

    if (*aa) {
      const auto rows = read_tally_csv(tallies);
      std::printf("eta,rate,rate_err,angular_std,shot_noise,angles_used\n");
      for (double eta : aa_etas) {
        double iterations = 0;
        RateGrid grid(aa_side, aa_radius, 0.0);
        for (const auto& r : rows) {
          if (r.k != aa_k || std::abs(r.width_or_radius - aa_radius) > 1e-6) continue;
          iterations = static_cast<double>(r.iterations);
          grid.set(r.dx, r.dy,
                   static_cast<double>(aa_mi ? r.mi_sum : r.hits) / r.iterations);
        }
        grid.iterations = iterations;
        grid.symmetrize();
        const AngleAverage avg = angle_average(grid, eta, aa_angles);
        std::printf("%.10g,%.10g,%.10g,%.10g,%.10g,%d\n", eta, avg.rate, avg.rate_err,
                    avg.angular_std, avg.shot_noise, avg.angles_used);
      }
      return 0;
    }

    if (*oc) {
      EnsembleConfig cfg;
      switch (family_from_string(oc_family)) {
        case Family::kMoc1d: cfg = EnsembleConfig::moc1d(oc_sites, oc_depth, oc_p); break;
        case Family::kMoc2d: cfg = EnsembleConfig::moc2d(oc_sites, oc_depth, oc_p); break;
        case Family::kHyperbolic: cfg = EnsembleConfig::hyperbolic(oc_sites, oc_p, oc_q); break;
        case Family::kDyck: cfg = EnsembleConfig::dyck(oc_sites, oc_depth, oc_p); break;
      }
      if (cfg.num_sites > 64) throw ConfigError("oracle-check supports at most 64 sites");
      const OracleReport r = oracle_check(cfg, oc_seed, 0, oc_count);
      std::printf("checked %llu matched %llu mismatched %llu structure_errors %llu\n",
                  static_cast<unsigned long long>(r.checked),
                  static_cast<unsigned long long>(r.matched),
                  static_cast<unsigned long long>(r.checked - r.matched),
                  static_cast<unsigned long long>(r.structure_errors));
      std::printf("%s\n", r.all_matched() ? "PASS" : "FAIL");
      return r.all_matched() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "mocperc: invalid configuration: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "mocperc: invalid configuration: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mocperc: %s\n", e.what());
    return 1;
  }
  return 0;
}
