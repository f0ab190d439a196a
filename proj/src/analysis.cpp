#include "mocperc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mocperc {

std::vector<RingInterval> ring_intervals(const SubregionSet& subs) {
  const std::uint32_t n = subs.num_sites();
  std::vector<RingInterval> out;
  std::vector<std::uint8_t> member(n, 0);
  for (const auto& region : subs.regions()) {
    for (Site s : region) member[s] = 1;
    std::uint32_t starts = 0;
    RingInterval arc;
    arc.width = static_cast<std::uint32_t>(region.size());
    for (Site s : region) {
      if (!member[(s + n - 1) % n]) {
        arc.left = s;
        ++starts;
      }
    }
    for (Site s : region) member[s] = 0;
    if (starts != 1) {
      throw std::invalid_argument("subregion is not a single arc of the ring");
    }
    out.push_back(arc);
  }
  return out;
}

double eta_1d(const SubregionSet& subs) {
  const auto arcs = ring_intervals(subs);
  return eta_intervals<double>(arcs, subs.num_sites());
}

RateGrid::RateGrid(std::uint32_t side_, double radius_, double iterations_)
    : rate(Eigen::ArrayXXd::Constant(side_, side_,
                                     std::numeric_limits<double>::quiet_NaN())),
      side(side_),
      radius(radius_),
      iterations(iterations_) {}

namespace {

int wrap(int v, int l) { return ((v % l) + l) % l; }

}  // namespace

void RateGrid::set(int x, int y, double value) {
  const int l = static_cast<int>(side);
  rate(wrap(x, l), wrap(y, l)) = value;
}

double RateGrid::at(int x, int y) const {
  const int l = static_cast<int>(side);
  return rate(wrap(x, l), wrap(y, l));
}

void RateGrid::symmetrize() {
  const Eigen::ArrayXXd measured = rate;
  const int l = static_cast<int>(side);
  for (int x = 0; x < l; ++x) {
    for (int y = 0; y < l; ++y) {
      const double v = measured(x, y);
      if (std::isnan(v)) continue;
      const int images[8][2] = {{x, y},   {-x, y},  {x, -y},  {-x, -y},
                                {y, x},   {-y, x},  {y, -x},  {-y, -x}};
      for (const auto& im : images) {
        double& slot = rate(wrap(im[0], l), wrap(im[1], l));
        if (std::isnan(slot)) slot = v;
      }
    }
  }
}

AngleAverage angle_average(const RateGrid& grid, double eta, int num_angles) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (num_angles < 1) throw std::invalid_argument("need at least one angle");
  const double l = grid.side;
  const double pi = std::numbers::pi;
  const double chord_max = l / pi;
  const double c = chord_length(2.0 * grid.radius, l) / std::sqrt(eta);

  std::vector<double> values;
  std::vector<double> shots;
  for (int j = 0; j < num_angles; ++j) {
    const double theta = 2.0 * pi * j / num_angles;
    const double cx = c * std::cos(theta);
    const double cy = c * std::sin(theta);
    if (std::abs(cx) > chord_max || std::abs(cy) > chord_max) continue;
    const double x = chord_max * std::asin(cx / chord_max);
    const double y = chord_max * std::asin(cy / chord_max);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const int corner[4][2] = {{x0, y0}, {x0 + 1, y0}, {x0, y0 + 1}, {x0 + 1, y0 + 1}};
    double value = 0.0;
    double shot = 0.0;
    bool covered = true;
    for (int i = 0; i < 4; ++i) {
      if (w[i] == 0.0) continue;
      const double v = grid.at(corner[i][0], corner[i][1]);
      if (std::isnan(v)) {
        covered = false;
        break;
      }
      value += w[i] * v;
      if (grid.iterations > 0.0) shot += w[i] * std::sqrt(std::max(v, 0.0) / grid.iterations);
    }
    if (!covered) continue;
    values.push_back(value);
    shots.push_back(shot);
  }
  if (values.empty()) {
    throw std::domain_error("eta contour lies outside the measured displacements");
  }
  const Eigen::Map<const Eigen::ArrayXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  const Eigen::Map<const Eigen::ArrayXd> s(shots.data(), static_cast<Eigen::Index>(shots.size()));
  AngleAverage out;
  out.angles_used = static_cast<int>(values.size());
  out.rate = v.mean();
  out.angular_std = std::sqrt((v - out.rate).square().mean());
  out.shot_noise = s.mean();
  out.rate_err = std::hypot(out.angular_std, out.shot_noise);
  return out;
}

FitResult fit_power_law(std::span<const EtaPoint> points, FitWindow window,
                        const FitOptions& options) {
  FitResult out;
  std::vector<const EtaPoint*> used;
  for (const auto& pt : points) {
    if (!(pt.eta >= window.eta_min && pt.eta <= window.eta_max)) continue;
    if (!(pt.rate > 0.0)) {
      ++out.zero_rate_excluded;
      continue;
    }
    if (pt.events < options.min_events) {
      ++out.low_count_excluded;
      continue;
    }
    used.push_back(&pt);
  }
  std::vector<std::int64_t> groups;
  if (options.separate_prefactors) {
    std::map<std::int64_t, int> members;
    for (const EtaPoint* p : used) ++members[p->group];
    std::erase_if(used, [&](const EtaPoint* p) { return members[p->group] < 2; });
    for (const auto& [g, count] : members) {
      if (count >= 2) groups.push_back(g);
    }
  } else {
    groups.push_back(0);
  }
  const auto n = static_cast<Eigen::Index>(used.size());
  const auto m = static_cast<Eigen::Index>(groups.size());
  if (n < 3 || n < m + 2) {
    throw FitError("power-law fit needs at least 3 usable points and one spare "
                   "degree of freedom, got " + std::to_string(n) + " points");
  }
  const bool weighted =
      std::all_of(used.begin(), used.end(), [](const EtaPoint* p) { return p->rate_err > 0.0; });

  // Columns: one intercept per group, then the slope.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, m + 1);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const EtaPoint& pt = *used[static_cast<std::size_t>(i)];
    const auto g = options.separate_prefactors
                       ? std::lower_bound(groups.begin(), groups.end(), pt.group) - groups.begin()
                       : 0;
    a(i, g) = 1.0;
    a(i, m) = std::log(pt.eta);
    y(i) = std::log(pt.rate);
    const double sigma_log = pt.rate_err / pt.rate;
    w(i) = weighted ? 1.0 / (sigma_log * sigma_log) : 1.0;
  }
  const Eigen::MatrixXd normal = a.transpose() * w.asDiagonal() * a;
  const Eigen::VectorXd beta = normal.ldlt().solve(a.transpose() * w.asDiagonal() * y);
  const Eigen::VectorXd resid = y - a * beta;
  const double chi2 = resid.dot(w.asDiagonal() * resid);
  const double dof = static_cast<double>(n - m - 1);
  Eigen::MatrixXd cov = normal.inverse();
  const double scale = weighted ? std::max(1.0, chi2 / dof) : chi2 / dof;
  cov *= scale;

  out.alpha = options.exponent_scale * beta(m);
  out.alpha_err = std::abs(options.exponent_scale) * std::sqrt(cov(m, m));
  out.prefactor = std::exp(beta.head(m).mean());
  out.chi2_per_dof = chi2 / dof;
  out.points_used = used.size();
  out.groups = groups.size();
  out.window.eta_min = a.col(m).array().exp().minCoeff();
  out.window.eta_max = a.col(m).array().exp().maxCoeff();
  return out;
}

FssEstimate fss_extrapolate(std::vector<RadiusFit> per_radius) {
  if (per_radius.empty()) throw std::invalid_argument("no per-radius fits");
  std::sort(per_radius.begin(), per_radius.end(),
            [](const RadiusFit& a, const RadiusFit& b) { return a.radius < b.radius; });
  FssEstimate out;
  out.degraded = per_radius.size() < 5;
  out.radii_used = std::min<std::size_t>(5, per_radius.size());
  const auto first = per_radius.end() - static_cast<std::ptrdiff_t>(out.radii_used);
  Eigen::ArrayXd alphas(static_cast<Eigen::Index>(out.radii_used));
  Eigen::ArrayXd errs(alphas.size());
  Eigen::Index i = 0;
  for (auto it = first; it != per_radius.end(); ++it, ++i) {
    alphas(i) = it->fit.alpha;
    errs(i) = it->fit.alpha_err;
  }
  out.alpha = alphas.mean();
  out.spread = alphas.size() > 1
                   ? std::sqrt((alphas - out.alpha).square().sum() / (alphas.size() - 1))
                   : 0.0;
  out.mean_fit_err = errs.mean();
  out.series = std::move(per_radius);
  return out;
}

bool RelationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const RelationCheck& c) { return c.pass; });
}

namespace {

RelationCheck at_least(std::string name, int k, int l, double lhs, double rhs,
                       double sigma, double n_sigma) {
  RelationCheck c;
  c.relation = std::move(name);
  c.k = k;
  c.l = l;
  c.lhs = lhs;
  c.rhs = rhs;
  c.sigma = sigma;
  c.pass = rhs - lhs <= n_sigma * sigma;
  return c;
}

}  // namespace

RelationReport check_exponent_relations(const std::map<int, FitResult>& gme,
                                        const std::map<int, FitResult>& mi,
                                        double n_sigma) {
  RelationReport report;
  for (const auto& [k, fit] : gme) {
    const auto m = mi.find(k);
    if (m == mi.end()) continue;
    report.checks.push_back(at_least("dominance", k, k, fit.alpha, m->second.alpha,
                                     std::hypot(fit.alpha_err, m->second.alpha_err),
                                     n_sigma));
  }
  for (const auto& [k, fit] : gme) {
    const auto next = gme.find(k + 1);
    if (next == gme.end()) continue;
    report.checks.push_back(at_least("monotonicity", k + 1, k, next->second.alpha,
                                     fit.alpha,
                                     std::hypot(fit.alpha_err, next->second.alpha_err),
                                     n_sigma));
  }
  for (const auto& [k, fk] : gme) {
    for (const auto& [l, fl] : gme) {
      if (l < k) continue;
      const auto sum = gme.find(k + l);
      if (sum == gme.end()) continue;
      // alpha_k + alpha_k carries twice the error of alpha_k.
      const double pair_var = k == l ? 4.0 * fk.alpha_err * fk.alpha_err
                                     : fk.alpha_err * fk.alpha_err + fl.alpha_err * fl.alpha_err;
      const double sigma =
          std::sqrt(pair_var + sum->second.alpha_err * sum->second.alpha_err);
      report.checks.push_back(at_least("subadditivity", k, l, fk.alpha + fl.alpha,
                                       sum->second.alpha, sigma, n_sigma));
    }
  }
  return report;
}

std::uint64_t catalan(unsigned n) {
  if (n > 35) throw std::out_of_range("catalan number exceeds 64 bits");
  unsigned __int128 c = 1;
  for (unsigned i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return static_cast<std::uint64_t>(c);
}

double dyck_connection_law(unsigned x) {
  if (x % 2 == 0) throw std::invalid_argument("dyck law needs odd distance");
  const double m = (x + 1) / 2;
  const double log_c = std::lgamma(2 * m + 1) - std::lgamma(m + 2) - std::lgamma(m + 1);
  return std::exp(log_c - x * std::numbers::ln2);
}

}  // namespace mocperc
