#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mocperc/analysis.hpp"
#include "mocperc/ensembles.hpp"
#include "mocperc/measures.hpp"
#include "mocperc/weighted_graph.hpp"

namespace mocperc {

/// Rejected run configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeasureFlags {
  bool gme = true;
  bool mi = true;
  bool indirect = false;
  bool weighted_graph = false;
};

/// k equal arcs of each width, left endpoints `spacing` apart (or evenly
/// spread when `even_spacing`). Combinations that do not fit are skipped.
struct Geometry1d {
  std::vector<std::uint32_t> k;
  std::vector<std::uint32_t> widths;
  std::vector<std::uint32_t> spacings;
  bool even_spacing = false;
};

/// Discs of each squared radius at each displacement. With `octant` set and
/// no explicit list, displacements are 0 <= y <= x <= max_displacement
/// (default L/2).
struct Geometry2d {
  std::vector<std::uint32_t> k;
  std::vector<std::uint32_t> radii_sq;
  std::vector<std::pair<int, int>> displacements;
  bool octant = true;
  int max_displacement = 0;
};

struct WeightedGraphConfig {
  std::uint32_t k = 2;
  std::uint32_t width = 4;
  std::uint32_t spacing = 16;
  std::uint32_t layers = 64;
  std::uint32_t margin = 16;
  /// "gme" (hit indicator) or "mi" (mutual information in ln 2 units).
  std::string measure = "gme";
};

struct FitConfig {
  std::map<int, FitWindow> gme_windows;
  std::map<int, FitWindow> mi_windows;
  int num_angles = 64;
  int eta_points = 12;
  double min_events = 10.0;

  FitWindow gme_window(int k, Family family) const;
  FitWindow mi_window(int k, Family family) const;
};

struct RunConfig {
  EnsembleConfig ensemble;
  /// Monte Carlo samples per geometry: realizations * translations.
  std::uint64_t iterations = 1;
  /// Lattice translations of every geometry measured on each realization.
  /// On the torus this must be a perfect square t^2 (a t x t grid of shifts).
  std::uint32_t translations = 1;
  std::uint64_t seed = 0;
  std::uint32_t workers = 1;
  /// Realizations are cut into this many shards (0: automatic). Results do
  /// not depend on the worker count, only on the shard plan.
  std::uint32_t shards = 0;
  std::uint64_t checkpoint_every = 0;
  MeasureFlags measures;
  Geometry1d geometry_1d;
  Geometry2d geometry_2d;
  WeightedGraphConfig weighted_graph;
  FitConfig fit;
  std::string out_dir = ".";

  std::uint64_t realizations() const;
  std::uint32_t shard_count() const;
  /// Throws ConfigError.
  void validate() const;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::string& path);

/// One row of the tally table.
struct GeometryKey {
  Family family = Family::kMoc1d;
  std::uint32_t k = 0;
  std::uint32_t width = 0;
  std::uint32_t radius_sq = 0;
  std::int32_t dx = 0;
  std::int32_t dy = 0;
  double eta = 0.0;

  /// Arc width in 1D, disc radius in 2D.
  double width_or_radius() const;
  friend bool operator==(const GeometryKey&, const GeometryKey&) = default;
};

struct Tally {
  std::uint64_t gme_hits = 0;
  std::uint64_t indirect_hits = 0;
  std::uint64_t mi_sum = 0;
  std::uint64_t mi_sumsq = 0;
  std::uint64_t iterations = 0;

  void record(const MeasureOutcome& o) noexcept {
    gme_hits += o.gme_hit;
    indirect_hits += o.indirect_hit;
    const auto mi = static_cast<std::uint64_t>(o.mi_units);
    mi_sum += mi;
    mi_sumsq += mi * mi;
    ++iterations;
  }
  void add(const Tally& o) noexcept {
    gme_hits += o.gme_hits;
    indirect_hits += o.indirect_hits;
    mi_sum += o.mi_sum;
    mi_sumsq += o.mi_sumsq;
    iterations += o.iterations;
  }
  friend bool operator==(const Tally&, const Tally&) = default;
};

/// Per-geometry counters, merged component-wise.
class HitAccumulator {
 public:
  HitAccumulator() = default;
  explicit HitAccumulator(std::vector<GeometryKey> keys);

  const std::vector<GeometryKey>& keys() const noexcept { return keys_; }
  const std::vector<Tally>& tallies() const noexcept { return tallies_; }
  std::vector<Tally>& tallies() noexcept { return tallies_; }

  void record(std::size_t geometry, const MeasureOutcome& o) {
    tallies_[geometry].record(o);
  }
  /// Throws std::invalid_argument when the key lists differ.
  void merge(const HitAccumulator& other);

 private:
  std::vector<GeometryKey> keys_;
  std::vector<Tally> tallies_;
};

/// The subregion sets a run measures, in tally order.
struct GeometryPlan {
  std::vector<GeometryKey> keys;
  std::vector<SubregionSet> sets;
};
GeometryPlan build_geometry_plan(const RunConfig& cfg);

/// Site s of translation t reads the label of site shift[t][s].
std::vector<std::vector<Site>> translation_maps(const RunConfig& cfg);

struct ShardResult {
  HitAccumulator hits;
  std::optional<WeightedGraphAccumulator> graph;
  std::uint64_t realizations = 0;
};

struct ExperimentResult {
  HitAccumulator hits;
  std::optional<WeightedGraphAccumulator> graph;
  std::uint64_t realizations = 0;
  double seconds = 0.0;
};

/// Simulates realizations [first, last) of `cfg` into one shard result.
ShardResult run_shard(const RunConfig& cfg, const GeometryPlan& plan,
                      const std::vector<std::vector<Site>>& shifts,
                      std::uint64_t first, std::uint64_t last);

/// Runs every shard on `cfg.workers` threads and reduces the shard results
/// over a fixed pairwise tree. Resumes from `<out_dir>/checkpoint.json` when
/// checkpointing is enabled and a matching checkpoint exists.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Writes tallies.csv, fits.json and, if present, the weighted graph CSVs.
void write_outputs(const RunConfig& cfg, const ExperimentResult& result);

}  // namespace mocperc
