#include "mocperc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "mocperc/cluster_engine.hpp"
#include "mocperc/tally_io.hpp"

namespace mocperc {

using nlohmann::json;

namespace {

bool is_1d(Family f) { return f != Family::kMoc2d; }

std::uint32_t isqrt(std::uint32_t v) {
  auto r = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

FitWindow window_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("fit windows are [eta_min, eta_max] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::map<int, FitWindow> windows_from_json(const json& j) {
  std::map<int, FitWindow> out;
  for (const auto& [key, value] : j.items()) out[std::stoi(key)] = window_from_json(value);
  return out;
}

json windows_to_json(const std::map<int, FitWindow>& w) {
  json j = json::object();
  for (const auto& [k, win] : w) j[std::to_string(k)] = {win.eta_min, win.eta_max};
  return j;
}

}  // namespace

FitWindow FitConfig::gme_window(int k, Family family) const {
  if (auto it = gme_windows.find(k); it != gme_windows.end()) return it->second;
  if (family == Family::kMoc2d) return {k <= 2 ? 0.2 : k == 3 ? 0.4 : 0.6, 1.0};
  return {1e-3, 0.3};
}

FitWindow FitConfig::mi_window(int k, Family family) const {
  if (auto it = mi_windows.find(k); it != mi_windows.end()) return it->second;
  return gme_window(k, family);
}

std::uint64_t RunConfig::realizations() const {
  return (iterations + translations - 1) / translations;
}

std::uint32_t RunConfig::shard_count() const {
  const std::uint64_t r = realizations();
  const std::uint64_t s = shards ? shards : 256;
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(1, std::min(r, s)));
}

void RunConfig::validate() const {
  try {
    ensemble.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (translations < 1) throw ConfigError("translations must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (is_1d(ensemble.family)) {
    if (translations > ensemble.num_sites) {
      throw ConfigError("more translations than ring sites");
    }
  } else {
    const std::uint32_t t = isqrt(translations);
    if (t * t != translations || t > ensemble.side) {
      throw ConfigError("torus translations must be t^2 with t <= L");
    }
  }
  if (measures.weighted_graph) {
    if (ensemble.family != Family::kMoc1d) {
      throw ConfigError("weighted graphs are implemented for moc1d only");
    }
    if (checkpoint_every) {
      throw ConfigError("checkpointing is not supported with weighted graphs");
    }
    if (weighted_graph.measure != "gme" && weighted_graph.measure != "mi") {
      throw ConfigError("weighted_graph.measure must be 'gme' or 'mi'");
    }
    try {
      (void)place_subregions_1d(weighted_graph.k, weighted_graph.width,
                                weighted_graph.spacing, ensemble.num_sites);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("weighted_graph geometry: ") + e.what());
    }
  }
  if (build_geometry_plan(*this).keys.empty()) {
    throw ConfigError("geometry grid is empty or no entry fits the lattice");
  }
}

RunConfig RunConfig::from_json(const json& j) {
  try {
    reject_unknown(j, {"ensemble", "iterations", "translations", "seed", "workers",
                       "shards", "checkpoint_every", "measures", "geometry",
                       "weighted_graph", "fit", "out"},
                   "run config");
    RunConfig c;
    const json& e = j.at("ensemble");
    reject_unknown(e, {"family", "num_sites", "side", "depth", "p", "q"}, "ensemble");
    const Family family = family_from_string(e.at("family").get<std::string>());
    const double p = e.at("p").get<double>();
    switch (family) {
      case Family::kMoc1d:
        c.ensemble = EnsembleConfig::moc1d(e.at("num_sites").get<std::uint32_t>(),
                                           e.at("depth").get<std::uint32_t>(), p);
        break;
      case Family::kMoc2d:
        c.ensemble = EnsembleConfig::moc2d(e.at("side").get<std::uint32_t>(),
                                           e.at("depth").get<std::uint32_t>(), p);
        break;
      case Family::kHyperbolic:
        c.ensemble = EnsembleConfig::hyperbolic(e.at("num_sites").get<std::uint32_t>(),
                                                p, e.value("q", 0.0));
        break;
      case Family::kDyck:
        c.ensemble = EnsembleConfig::dyck(e.at("num_sites").get<std::uint32_t>(),
                                          e.at("depth").get<std::uint32_t>(), p);
        break;
    }
    read_if(j, "iterations", c.iterations);
    read_if(j, "translations", c.translations);
    read_if(j, "seed", c.seed);
    read_if(j, "workers", c.workers);
    read_if(j, "shards", c.shards);
    read_if(j, "checkpoint_every", c.checkpoint_every);
    read_if(j, "out", c.out_dir);
    if (j.contains("measures")) {
      const json& m = j.at("measures");
      reject_unknown(m, {"gme", "mi", "indirect", "weighted_graph"}, "measures");
      read_if(m, "gme", c.measures.gme);
      read_if(m, "mi", c.measures.mi);
      read_if(m, "indirect", c.measures.indirect);
      read_if(m, "weighted_graph", c.measures.weighted_graph);
    }
    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      if (family == Family::kMoc2d) {
        reject_unknown(g, {"k", "radii_sq", "displacements", "max_displacement"},
                       "geometry");
        read_if(g, "k", c.geometry_2d.k);
        read_if(g, "radii_sq", c.geometry_2d.radii_sq);
        read_if(g, "max_displacement", c.geometry_2d.max_displacement);
        if (g.contains("displacements")) {
          const json& d = g.at("displacements");
          if (d.is_string()) {
            if (d.get<std::string>() != "octant") {
              throw ConfigError("displacements must be \"octant\" or a list");
            }
          } else {
            c.geometry_2d.octant = false;
            for (const auto& xy : d) {
              c.geometry_2d.displacements.emplace_back(xy.at(0).get<int>(),
                                                       xy.at(1).get<int>());
            }
          }
        }
      } else {
        reject_unknown(g, {"k", "widths", "spacings", "even_spacing"}, "geometry");
        read_if(g, "k", c.geometry_1d.k);
        read_if(g, "widths", c.geometry_1d.widths);
        read_if(g, "spacings", c.geometry_1d.spacings);
        read_if(g, "even_spacing", c.geometry_1d.even_spacing);
      }
    }
    if (j.contains("weighted_graph")) {
      const json& w = j.at("weighted_graph");
      reject_unknown(w, {"k", "width", "spacing", "layers", "margin", "measure"},
                     "weighted_graph");
      read_if(w, "k", c.weighted_graph.k);
      read_if(w, "width", c.weighted_graph.width);
      read_if(w, "spacing", c.weighted_graph.spacing);
      read_if(w, "layers", c.weighted_graph.layers);
      read_if(w, "margin", c.weighted_graph.margin);
      read_if(w, "measure", c.weighted_graph.measure);
    }
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      reject_unknown(f, {"gme_windows", "mi_windows", "num_angles", "eta_points",
                         "min_events"},
                     "fit");
      if (f.contains("gme_windows")) c.fit.gme_windows = windows_from_json(f.at("gme_windows"));
      if (f.contains("mi_windows")) c.fit.mi_windows = windows_from_json(f.at("mi_windows"));
      read_if(f, "num_angles", c.fit.num_angles);
      read_if(f, "eta_points", c.fit.eta_points);
      read_if(f, "min_events", c.fit.min_events);
    }
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
}

json RunConfig::to_json() const {
  json e = {{"family", std::string(to_string(ensemble.family))}, {"p", ensemble.p}};
  if (ensemble.family == Family::kMoc2d) {
    e["side"] = ensemble.side;
  } else {
    e["num_sites"] = ensemble.num_sites;
  }
  if (ensemble.family == Family::kHyperbolic) {
    e["q"] = ensemble.q;
  } else {
    e["depth"] = ensemble.depth;
  }
  json g;
  if (ensemble.family == Family::kMoc2d) {
    g = {{"k", geometry_2d.k}, {"radii_sq", geometry_2d.radii_sq}};
    if (geometry_2d.octant) {
      g["displacements"] = "octant";
    } else {
      json d = json::array();
      for (const auto& [x, y] : geometry_2d.displacements) d.push_back({x, y});
      g["displacements"] = d;
    }
    if (geometry_2d.max_displacement) g["max_displacement"] = geometry_2d.max_displacement;
  } else {
    g = {{"k", geometry_1d.k},
         {"widths", geometry_1d.widths},
         {"spacings", geometry_1d.spacings},
         {"even_spacing", geometry_1d.even_spacing}};
  }
  return {{"ensemble", e},
          {"iterations", iterations},
          {"translations", translations},
          {"seed", seed},
          {"workers", workers},
          {"shards", shards},
          {"checkpoint_every", checkpoint_every},
          {"measures",
           {{"gme", measures.gme},
            {"mi", measures.mi},
            {"indirect", measures.indirect},
            {"weighted_graph", measures.weighted_graph}}},
          {"geometry", g},
          {"weighted_graph",
           {{"k", weighted_graph.k},
            {"width", weighted_graph.width},
            {"spacing", weighted_graph.spacing},
            {"layers", weighted_graph.layers},
            {"margin", weighted_graph.margin},
            {"measure", weighted_graph.measure}}},
          {"fit",
           {{"gme_windows", windows_to_json(fit.gme_windows)},
            {"mi_windows", windows_to_json(fit.mi_windows)},
            {"num_angles", fit.num_angles},
            {"eta_points", fit.eta_points},
            {"min_events", fit.min_events}}},
          {"out", out_dir}};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

double GeometryKey::width_or_radius() const {
  return family == Family::kMoc2d ? std::sqrt(static_cast<double>(radius_sq))
                                  : static_cast<double>(width);
}

HitAccumulator::HitAccumulator(std::vector<GeometryKey> keys)
    : keys_(std::move(keys)), tallies_(keys_.size()) {}

void HitAccumulator::merge(const HitAccumulator& other) {
  if (keys_ != other.keys_) {
    throw std::invalid_argument("cannot merge accumulators over different geometries");
  }
  for (std::size_t i = 0; i < tallies_.size(); ++i) tallies_[i].add(other.tallies_[i]);
}

GeometryPlan build_geometry_plan(const RunConfig& cfg) {
  GeometryPlan plan;
  const EnsembleConfig& e = cfg.ensemble;
  const auto add = [&](GeometryKey key, SubregionSet set) {
    for (const auto& existing : plan.keys) {
      if (existing == key) return;
    }
    plan.keys.push_back(key);
    plan.sets.push_back(std::move(set));
  };
  if (is_1d(e.family)) {
    const Geometry1d& g = cfg.geometry_1d;
    for (std::uint32_t k : g.k) {
      for (std::uint32_t w : g.widths) {
        std::vector<std::optional<std::uint32_t>> spacings;
        if (g.even_spacing) spacings.emplace_back();
        for (std::uint32_t s : g.spacings) spacings.emplace_back(s);
        for (const auto& s : spacings) {
          try {
            SubregionSet set = place_subregions_1d(k, w, s, e.num_sites);
            GeometryKey key;
            key.family = e.family;
            key.k = k;
            key.width = w;
            key.dx = static_cast<std::int32_t>(set.tag().spacing);
            key.eta = eta_1d(set);
            add(key, std::move(set));
          } catch (const std::invalid_argument&) {
            // Combination does not fit this ring.
          }
        }
      }
    }
    return plan;
  }
  const Geometry2d& g = cfg.geometry_2d;
  std::vector<std::pair<int, int>> displacements = g.displacements;
  if (g.octant && displacements.empty()) {
    const int reach = g.max_displacement ? g.max_displacement : static_cast<int>(e.side / 2);
    for (int x = 0; x <= reach; ++x) {
      for (int y = 0; y <= x; ++y) displacements.emplace_back(x, y);
    }
  }
  for (std::uint32_t k : g.k) {
    for (std::uint32_t r2 : g.radii_sq) {
      for (const auto& [x, y] : displacements) {
        try {
          SubregionSet set = place_subregions_2d(k, r2, x, y, e.side);
          GeometryKey key;
          key.family = e.family;
          key.k = k;
          key.radius_sq = r2;
          key.dx = x;
          key.dy = y;
          key.eta = eta_2d<double>(std::sqrt(static_cast<double>(r2)), x, y, e.side);
          add(key, std::move(set));
        } catch (const std::invalid_argument&) {
          // Discs overlap or wrap at this displacement.
        }
      }
    }
  }
  return plan;
}

std::vector<std::vector<Site>> translation_maps(const RunConfig& cfg) {
  const EnsembleConfig& e = cfg.ensemble;
  std::vector<std::vector<Site>> maps;
  if (is_1d(e.family)) {
    const std::uint32_t n = e.num_sites;
    for (std::uint32_t t = 0; t < cfg.translations; ++t) {
      const auto shift = static_cast<std::uint32_t>(std::uint64_t{t} * n / cfg.translations);
      std::vector<Site> m(n);
      for (Site s = 0; s < n; ++s) m[s] = (s + shift) % n;
      maps.push_back(std::move(m));
    }
    return maps;
  }
  const std::uint32_t l = e.side;
  const std::uint32_t t = isqrt(cfg.translations);
  for (std::uint32_t a = 0; a < t; ++a) {
    for (std::uint32_t b = 0; b < t; ++b) {
      const std::uint32_t sy = a * l / t;
      const std::uint32_t sx = b * l / t;
      std::vector<Site> m(std::size_t{l} * l);
      for (std::uint32_t y = 0; y < l; ++y) {
        for (std::uint32_t x = 0; x < l; ++x) {
          m[y * l + x] = ((y + sy) % l) * l + (x + sx) % l;
        }
      }
      maps.push_back(std::move(m));
    }
  }
  return maps;
}

namespace {

double graph_measure(const MeasureOutcome& o, const WeightedGraphConfig& w) {
  return w.measure == "mi" ? static_cast<double>(o.mi_units) : (o.gme_hit ? 1.0 : 0.0);
}

RealizationWeights rotate_columns(const RealizationWeights& w, std::span<const Site> shift) {
  RealizationWeights out(w.horizontal.rows(), w.horizontal.cols(), w.periodic_columns);
  for (Eigen::Index c = 0; c < w.horizontal.cols(); ++c) {
    out.horizontal.col(c) = w.horizontal.col(shift[static_cast<std::size_t>(c)]);
    out.vertical.col(c) = w.vertical.col(shift[static_cast<std::size_t>(c)]);
  }
  return out;
}

}  // namespace

ShardResult run_shard(const RunConfig& cfg, const GeometryPlan& plan,
                      const std::vector<std::vector<Site>>& shifts,
                      std::uint64_t first, std::uint64_t last) {
  const EnsembleConfig& e = cfg.ensemble;
  const std::uint32_t n = e.num_sites;
  const std::uint32_t slices = slice_count(e);
  ShardResult result;
  result.hits = HitAccumulator(plan.keys);

  const bool graph = cfg.measures.weighted_graph;
  std::optional<SubregionSet> target;
  WeightWindow window;
  if (graph) {
    const WeightedGraphConfig& w = cfg.weighted_graph;
    target = place_subregions_1d(w.k, w.width, w.spacing, n);
    window.first_site = 0;
    window.num_columns = n;
    window.num_layers = std::min(w.layers, slices);
    window.first_layer = slices - window.num_layers;
    result.graph.emplace(window.num_layers, n);
  }

  LayerBonds bonds;
  PartitionIndex index;
  std::vector<std::uint32_t> base(n);
  std::vector<std::uint32_t> moved(n);
  const bool identity_only = shifts.size() == 1;
  for (std::uint64_t r = first; r < last; ++r) {
    const RealizationRng rng(cfg.seed, r);
    ClusterState state(n);
    std::optional<WeightRecorder> recorder;
    if (graph) recorder.emplace(window, n);
    for (std::uint32_t s = 0; s < slices; ++s) {
      sample_slice(e, rng, s, bonds);
      if (recorder) recorder->record(s, bonds);
      state.advance_layer(bonds);
    }
    index.rebuild(state);
    const auto labels = state.site_clusters();
    base.assign(labels.begin(), labels.end());
    std::optional<RealizationWeights> convolved;
    for (const auto& shift : shifts) {
      if (!identity_only) {
        for (Site s = 0; s < n; ++s) moved[s] = base[shift[s]];
        index.relabel(moved);
      }
      for (std::size_t g = 0; g < plan.sets.size(); ++g) {
        result.hits.record(g, index.evaluate(plan.sets[g], cfg.measures.indirect));
      }
      if (graph) {
        const double m = graph_measure(index.evaluate(*target, false), cfg.weighted_graph);
        if (m > 0.0) {
          if (!convolved) convolved = convolve(recorder->weights());
          result.graph->accumulate(rotate_columns(*convolved, shift), m);
        } else {
          result.graph->accumulate(recorder->weights(), 0.0);
        }
      }
    }
    ++result.realizations;
  }
  return result;
}

namespace {

json fingerprint(const RunConfig& cfg) {
  json j = cfg.to_json();
  j.erase("workers");
  j.erase("checkpoint_every");
  j.erase("out");
  return j;
}

std::filesystem::path checkpoint_path(const RunConfig& cfg) {
  return std::filesystem::path(cfg.out_dir) / "checkpoint.json";
}

void write_checkpoint(const RunConfig& cfg, const std::vector<ShardResult>& results,
                      const std::vector<char>& done) {
  json completed = json::object();
  for (std::size_t i = 0; i < done.size(); ++i) {
    if (!done[i]) continue;
    completed[std::to_string(i)] = {{"realizations", results[i].realizations},
                                    {"tallies", accumulator_to_json(results[i].hits)}};
  }
  const json j = {{"format", "mocperc-checkpoint"},
                  {"version", 1},
                  {"config", fingerprint(cfg)},
                  {"shards", done.size()},
                  {"completed", completed}};
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = checkpoint_path(cfg);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

void load_checkpoint(const RunConfig& cfg, const GeometryPlan& plan,
                     std::vector<ShardResult>& results, std::vector<char>& done) {
  const auto path = checkpoint_path(cfg);
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  const json j = json::parse(in);
  if (j.value("format", "") != "mocperc-checkpoint" || j.value("version", 0) != 1) {
    throw ConfigError("unrecognised checkpoint format in " + path.string());
  }
  if (j.at("config") != fingerprint(cfg) || j.at("shards").get<std::size_t>() != done.size()) {
    throw ConfigError("checkpoint " + path.string() + " belongs to a different run");
  }
  for (const auto& [key, value] : j.at("completed").items()) {
    const std::size_t i = std::stoul(key);
    results[i].hits = HitAccumulator(plan.keys);
    accumulator_from_json(value.at("tallies"), results[i].hits);
    results[i].realizations = value.at("realizations").get<std::uint64_t>();
    done[i] = 1;
  }
}

ShardResult merge_pair(ShardResult a, const ShardResult& b) {
  a.hits.merge(b.hits);
  if (a.graph && b.graph) a.graph->merge(*b.graph);
  a.realizations += b.realizations;
  return a;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const GeometryPlan plan = build_geometry_plan(cfg);
  const auto shifts = translation_maps(cfg);
  const std::uint64_t total = cfg.realizations();
  const std::uint32_t shards = cfg.shard_count();

  std::vector<ShardResult> results(shards);
  std::vector<char> done(shards, 0);
  if (cfg.checkpoint_every) load_checkpoint(cfg, plan, results, done);

  std::atomic<std::uint32_t> next{0};
  std::mutex mutex;
  std::uint64_t since_checkpoint = 0;
  std::exception_ptr failure;
  const auto work = [&] {
    for (;;) {
      const std::uint32_t i = next.fetch_add(1);
      if (i >= shards) return;
      {
        std::lock_guard lock(mutex);
        if (done[i] || failure) continue;
      }
      try {
        ShardResult r = run_shard(cfg, plan, shifts, total * i / shards,
                                  total * (i + 1) / shards);
        const std::uint64_t count = r.realizations;
        results[i] = std::move(r);
        std::lock_guard lock(mutex);
        done[i] = 1;
        since_checkpoint += count;
        if (cfg.checkpoint_every && since_checkpoint >= cfg.checkpoint_every) {
          write_checkpoint(cfg, results, done);
          since_checkpoint = 0;
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::uint32_t threads = std::min(cfg.workers, shards);
  std::vector<std::thread> pool;
  for (std::uint32_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  if (cfg.checkpoint_every) write_checkpoint(cfg, results, done);

  while (results.size() > 1) {
    std::vector<ShardResult> level;
    for (std::size_t i = 0; i + 1 < results.size(); i += 2) {
      level.push_back(merge_pair(std::move(results[i]), results[i + 1]));
    }
    if (results.size() % 2) level.push_back(std::move(results.back()));
    results = std::move(level);
  }
  ExperimentResult out;
  out.hits = std::move(results[0].hits);
  out.graph = std::move(results[0].graph);
  out.realizations = results[0].realizations;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_outputs(const RunConfig& cfg, const ExperimentResult& result) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  const auto rows = tally_rows(result.hits);
  write_tally_csv((dir / "tallies.csv").string(), rows);
  {
    std::ofstream out(dir / "fits.json");
    out << fit_report(rows, cfg).dump(2) << '\n';
  }
  if (result.graph) {
    RealizationWeights g;
    try {
      g = result.graph->finalize();
    } catch (const std::runtime_error& e) {
      std::ofstream(dir / "weighted_graph_error.txt") << e.what() << '\n';
      return;
    }
    const WeightedGraphConfig& w = cfg.weighted_graph;
    const std::uint32_t n = cfg.ensemble.num_sites;
    const std::uint64_t lo = 0;
    const std::uint64_t hi = std::uint64_t{w.k - 1} * w.spacing + w.width - 1;
    const WeightWindow crop = WeightWindow::around(static_cast<std::uint32_t>(lo),
                                                   static_cast<std::uint32_t>(hi), w.margin,
                                                   n, 1, 1);
    Eigen::ArrayXXd h(g.horizontal.rows(), crop.num_columns);
    Eigen::ArrayXXd v(g.vertical.rows(), crop.num_columns);
    for (std::uint32_t c = 0; c < crop.num_columns; ++c) {
      const Eigen::Index src = (crop.first_site + c) % n;
      h.col(c) = g.horizontal.col(src);
      v.col(c) = g.vertical.col(src);
    }
    write_matrix_csv((dir / "weighted_graph_horizontal.csv").string(), h);
    write_matrix_csv((dir / "weighted_graph_vertical.csv").string(), v);
  }
}

}  // namespace mocperc
