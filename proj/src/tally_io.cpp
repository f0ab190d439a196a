#include "mocperc/tally_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace mocperc {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

std::vector<TallyRow> tally_rows(const HitAccumulator& acc) {
  std::vector<TallyRow> rows;
  for (std::size_t i = 0; i < acc.keys().size(); ++i) {
    const GeometryKey& key = acc.keys()[i];
    const Tally& t = acc.tallies()[i];
    TallyRow r;
    r.family = std::string(to_string(key.family));
    r.k = key.k;
    r.width_or_radius = key.width_or_radius();
    r.dx = key.dx;
    r.dy = key.dy;
    r.eta = key.eta;
    r.hits = t.gme_hits;
    r.mi_sum = t.mi_sum;
    r.indirect_hits = t.indirect_hits;
    r.iterations = t.iterations;
    r.mi_sumsq = t.mi_sumsq;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_tally_csv(std::ostream& out, const std::vector<TallyRow>& rows) {
  out << kTallyHeader << '\n';
  for (const auto& r : rows) {
    out << r.family << ',' << r.k << ',' << fmt_double(r.width_or_radius) << ',' << r.dx
        << ',' << r.dy << ',' << fmt_double(r.eta) << ',' << r.hits << ',' << r.mi_sum
        << ',' << r.indirect_hits << ',' << r.iterations << '\n';
  }
}

void write_tally_csv(const std::string& path, const std::vector<TallyRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_tally_csv(out, rows);
}

std::vector<TallyRow> read_tally_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTallyHeader) {
    throw std::runtime_error("tally file does not start with the expected header");
  }
  std::vector<TallyRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 10) {
      throw std::runtime_error("tally line " + std::to_string(lineno) + ": expected 10 fields");
    }
    try {
      TallyRow r;
      r.family = f[0];
      r.k = static_cast<std::uint32_t>(std::stoul(f[1]));
      r.width_or_radius = std::stod(f[2]);
      r.dx = std::stoi(f[3]);
      r.dy = std::stoi(f[4]);
      r.eta = std::stod(f[5]);
      r.hits = std::stoull(f[6]);
      r.mi_sum = std::stoull(f[7]);
      r.indirect_hits = std::stoull(f[8]);
      r.iterations = std::stoull(f[9]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("tally line " + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

std::vector<TallyRow> read_tally_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_tally_csv(in);
}

namespace {

double mi_error(const TallyRow& r) {
  const double n = static_cast<double>(r.iterations);
  const double mean = r.mi_sum / n;
  // Without second moments, MI units per sample are taken to be at most 2.
  const double second = r.mi_sumsq ? *r.mi_sumsq / n : 2.0 * mean;
  return std::sqrt(std::max(second - mean * mean, 0.0) / n);
}

double row_rate(const TallyRow& r, bool mi) {
  const double n = static_cast<double>(r.iterations);
  return (mi ? static_cast<double>(r.mi_sum) : static_cast<double>(r.hits)) / n;
}

}  // namespace

std::vector<EtaPoint> eta_points_1d(const std::vector<TallyRow>& rows, std::uint32_t k,
                                    bool mutual_information) {
  std::vector<EtaPoint> pts;
  for (const auto& r : rows) {
    if (r.k != k || r.iterations == 0) continue;
    EtaPoint p;
    p.eta = r.eta;
    p.k = k;
    p.rate = row_rate(r, mutual_information);
    if (mutual_information) {
      p.rate_err = mi_error(r);
      p.events = static_cast<double>(r.mi_sum);
    } else {
      p.rate_err = std::sqrt(p.rate / static_cast<double>(r.iterations));
      p.events = static_cast<double>(r.hits);
    }
    p.tag.width = static_cast<std::uint32_t>(r.width_or_radius);
    p.tag.spacing = static_cast<std::uint32_t>(r.dx);
    p.group = static_cast<std::int64_t>(r.width_or_radius);
    pts.push_back(p);
  }
  return pts;
}

std::vector<EtaPoint> eta_points_2d(const std::vector<TallyRow>& rows, std::uint32_t k,
                                    double radius, std::uint32_t side,
                                    bool mutual_information, FitWindow window,
                                    const FitConfig& fit) {
  double iterations = 0.0;
  double emin = std::numeric_limits<double>::infinity();
  double emax = 0.0;
  std::vector<const TallyRow*> mine;
  for (const auto& r : rows) {
    if (r.k != k || std::abs(r.width_or_radius - radius) > 1e-6 || r.iterations == 0) continue;
    mine.push_back(&r);
    iterations = static_cast<double>(r.iterations);
    emin = std::min(emin, r.eta);
    emax = std::max(emax, r.eta);
  }
  std::vector<EtaPoint> pts;
  if (mine.empty()) return pts;
  RateGrid grid(side, radius, iterations);
  for (const TallyRow* r : mine) grid.set(r->dx, r->dy, row_rate(*r, mutual_information));
  grid.symmetrize();
  const double lo = std::max(window.eta_min, emin);
  const double hi = std::min(window.eta_max, emax);
  if (!(lo < hi) || fit.eta_points < 2) return pts;
  for (int i = 0; i < fit.eta_points; ++i) {
    const double eta = lo * std::pow(hi / lo, static_cast<double>(i) / (fit.eta_points - 1));
    try {
      const AngleAverage avg = angle_average(grid, eta, fit.num_angles);
      EtaPoint p;
      p.eta = eta;
      p.rate = avg.rate;
      p.rate_err = avg.rate_err;
      p.events = avg.rate * iterations;
      p.k = k;
      pts.push_back(p);
    } catch (const std::domain_error&) {
      // Contour not covered by measured displacements.
    }
  }
  return pts;
}

namespace {

json fit_json(const char* measure, std::uint32_t k, std::optional<double> radius,
              const FitResult& f) {
  return {{"measure", measure},
          {"k", k},
          {"radius", radius ? json(*radius) : json(nullptr)},
          {"alpha", f.alpha},
          {"alpha_err", f.alpha_err},
          {"prefactor", f.prefactor},
          {"window", {f.window.eta_min, f.window.eta_max}},
          {"chi2_per_dof", f.chi2_per_dof},
          {"points_used", f.points_used},
          {"zero_rate_excluded", f.zero_rate_excluded},
          {"low_count_excluded", f.low_count_excluded},
          {"prefactor_groups", f.groups}};
}

}  // namespace

json fit_report(const std::vector<TallyRow>& rows, const RunConfig& cfg) {
  const Family family = cfg.ensemble.family;
  std::set<std::uint32_t> ks;
  std::size_t no_hits = 0;
  for (const auto& r : rows) {
    ks.insert(r.k);
    no_hits += r.hits == 0;
  }
  json fits = json::array();
  json fss = json::array();
  json failures = json::array();
  std::map<int, FitResult> gme;
  std::map<int, FitResult> mi;
  FitOptions opts;
  opts.min_events = cfg.fit.min_events;

  for (const bool use_mi : {false, true}) {
    if (use_mi ? !cfg.measures.mi : !cfg.measures.gme) continue;
    const char* name = use_mi ? "mi" : "gme";
    auto& table = use_mi ? mi : gme;
    for (std::uint32_t k : ks) {
      const int ki = static_cast<int>(k);
      const FitWindow window =
          use_mi ? cfg.fit.mi_window(ki, family) : cfg.fit.gme_window(ki, family);
      if (family != Family::kMoc2d) {
        try {
          const auto pts = eta_points_1d(rows, k, use_mi);
          FitOptions per_width = opts;
          per_width.separate_prefactors = true;
          const FitResult f = fit_power_law(pts, window, per_width);
          fits.push_back(fit_json(name, k, std::nullopt, f));
          table[ki] = f;
        } catch (const FitError& e) {
          failures.push_back({{"measure", name}, {"k", k}, {"reason", e.what()}});
        }
        continue;
      }
      std::set<double> radii;
      for (const auto& r : rows) {
        if (r.k == k) radii.insert(r.width_or_radius);
      }
      std::vector<RadiusFit> series;
      for (double radius : radii) {
        try {
          const auto pts = eta_points_2d(rows, k, radius, cfg.ensemble.side, use_mi,
                                         window, cfg.fit);
          const FitResult f = fit_power_law(pts, window, opts);
          fits.push_back(fit_json(name, k, radius, f));
          series.push_back({radius, f});
        } catch (const FitError& e) {
          failures.push_back(
              {{"measure", name}, {"k", k}, {"radius", radius}, {"reason", e.what()}});
        }
      }
      if (series.empty()) continue;
      const FssEstimate est = fss_extrapolate(series);
      fss.push_back({{"measure", name},
                     {"k", k},
                     {"alpha", est.alpha},
                     {"spread", est.spread},
                     {"mean_fit_err", est.mean_fit_err},
                     {"radii_used", est.radii_used},
                     {"degraded", est.degraded}});
      FitResult summary;
      summary.alpha = est.alpha;
      summary.alpha_err = std::hypot(est.spread, est.mean_fit_err);
      table[ki] = summary;
    }
  }

  const RelationReport rel = check_exponent_relations(gme, mi);
  json checks = json::array();
  for (const auto& c : rel.checks) {
    checks.push_back({{"relation", c.relation},
                      {"k", c.k},
                      {"l", c.l},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"sigma", c.sigma},
                      {"pass", c.pass}});
  }
  return {{"family", std::string(to_string(family))},
          {"fits", fits},
          {"fss", fss},
          {"failures", failures},
          {"no_hit_geometries", no_hits},
          {"relation_checks", checks},
          {"relations_pass", rel.all_pass()}};
}

void write_matrix_csv(const std::string& path, const Eigen::ArrayXXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << fmt_double(m(r, c));
    }
    out << '\n';
  }
}

json accumulator_to_json(const HitAccumulator& acc) {
  json j = json::array();
  for (const Tally& t : acc.tallies()) {
    j.push_back({t.gme_hits, t.indirect_hits, t.mi_sum, t.mi_sumsq, t.iterations});
  }
  return j;
}

void accumulator_from_json(const json& j, HitAccumulator& acc) {
  if (!j.is_array() || j.size() != acc.tallies().size()) {
    throw std::runtime_error("checkpoint tallies do not match the geometry plan");
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    Tally& t = acc.tallies()[i];
    t.gme_hits = j[i].at(0).get<std::uint64_t>();
    t.indirect_hits = j[i].at(1).get<std::uint64_t>();
    t.mi_sum = j[i].at(2).get<std::uint64_t>();
    t.mi_sumsq = j[i].at(3).get<std::uint64_t>();
    t.iterations = j[i].at(4).get<std::uint64_t>();
  }
}

}  // namespace mocperc
