#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mocperc/measures.hpp"

namespace mocperc {

/// (period/pi) sin(pi x / period): distance on a ring of circumference
/// `period` measured along the chord.
template <typename Scalar>
Scalar chord_length(const Scalar& x, const Scalar& period) {
  using std::sin;
  const Scalar pi = Scalar(std::numbers::pi_v<double>);
  return period / pi * sin(pi * x / period);
}

/// Contiguous arc of a ring.
struct RingInterval {
  std::uint32_t left = 0;
  std::uint32_t width = 0;
};

/// The arcs of a 1D subregion set. Throws std::invalid_argument when a region
/// is not a single arc.
std::vector<RingInterval> ring_intervals(const SubregionSet& subs);

/// Generalized cross-ratio of k arcs on a ring of n sites:
///   (prod ch(w_i))^(2/k) / (prod_{i<j} ch(x_ij) ch(y_ij))^(2/(k(k-1)))
/// with x_ij, y_ij the left-left and right-right endpoint distances.
template <typename Scalar>
Scalar eta_intervals(std::span<const RingInterval> arcs, std::uint32_t n) {
  using std::exp;
  using std::log;
  const std::size_t k = arcs.size();
  if (k < 2) throw std::invalid_argument("eta needs k >= 2 intervals");
  const Scalar period = Scalar(static_cast<double>(n));
  Scalar log_num = Scalar(0);
  for (const auto& a : arcs) {
    log_num += log(chord_length(Scalar(static_cast<double>(a.width)), period));
  }
  Scalar log_den = Scalar(0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto ring_gap = [n](std::int64_t from, std::int64_t to) {
        const std::int64_t m = n;
        return static_cast<std::uint32_t>(((to - from) % m + m) % m);
      };
      const std::uint32_t dl = ring_gap(arcs[i].left, arcs[j].left);
      const std::uint32_t dr = ring_gap(std::int64_t{arcs[i].left} + arcs[i].width,
                                        std::int64_t{arcs[j].left} + arcs[j].width);
      if (dl == 0 || dr == 0) {
        throw std::invalid_argument("coincident interval endpoints: eta undefined");
      }
      log_den += log(chord_length(Scalar(static_cast<double>(dl)), period)) +
                 log(chord_length(Scalar(static_cast<double>(dr)), period));
    }
  }
  const Scalar kk = Scalar(static_cast<double>(k));
  return exp(Scalar(2) / kk * log_num - Scalar(2) / (kk * (kk - Scalar(1))) * log_den);
}

double eta_1d(const SubregionSet& subs);

/// ch(2r)^2 / (ch(x)^2 + ch(y)^2) on an L x L torus.
template <typename Scalar>
Scalar eta_2d(const Scalar& r, const Scalar& x, const Scalar& y,
              const Scalar& side) {
  const Scalar c = chord_length(Scalar(2) * r, side);
  const Scalar cx = chord_length(x, side);
  const Scalar cy = chord_length(y, side);
  return c * c / (cx * cx + cy * cy);
}

/// Per-displacement hit rates of a pair (or set) of discs of one radius.
/// rate(x mod L, y mod L) is NaN where nothing was measured.
struct RateGrid {
  Eigen::ArrayXXd rate;
  std::uint32_t side = 0;
  double radius = 0.0;
  double iterations = 0.0;

  RateGrid(std::uint32_t side, double radius, double iterations);

  void set(int x, int y, double value);
  double at(int x, int y) const;

  /// Copies every measured value to its images under the square lattice
  /// symmetries (x,y) -> (+-x,+-y), (+-y,+-x) where nothing was measured.
  void symmetrize();
};

struct AngleAverage {
  double rate = 0.0;
  double rate_err = 0.0;
  double angular_std = 0.0;
  double shot_noise = 0.0;
  int angles_used = 0;
};

/// Mean of the bilinearly interpolated rate over the contour of constant eta,
/// sampled at `num_angles` uniform angles. The error adds the spread over
/// angles and the interpolated shot noise sum w * sqrt(rate / iterations) in
/// quadrature. Angles whose stencil leaves the measured region are skipped;
/// throws std::domain_error when none remain.
AngleAverage angle_average(const RateGrid& grid, double eta, int num_angles = 64);

struct EtaPoint {
  double eta = 0.0;
  double rate = 0.0;
  double rate_err = 0.0;
  /// Observed event count; points below FitOptions::min_events are dropped.
  double events = std::numeric_limits<double>::infinity();
  std::uint32_t k = 0;
  GeometryTag tag;
  /// Points sharing a group share a prefactor when fitting with
  /// FitOptions::separate_prefactors.
  std::int64_t group = 0;
};

struct FitWindow {
  double eta_min = 0.0;
  double eta_max = std::numeric_limits<double>::infinity();
};

struct FitOptions {
  /// alpha = exponent_scale * slope of ln(rate) against ln(eta).
  double exponent_scale = 2.0;
  double min_events = 10.0;
  /// Fit one common exponent with a separate prefactor per group. Groups
  /// with a single usable point carry no slope information and are dropped.
  bool separate_prefactors = false;
};

struct FitResult {
  double alpha = 0.0;
  double alpha_err = 0.0;
  /// exp of the mean log-prefactor over groups.
  double prefactor = 0.0;
  FitWindow window;
  double chi2_per_dof = 0.0;
  std::size_t points_used = 0;
  std::size_t zero_rate_excluded = 0;
  std::size_t low_count_excluded = 0;
  std::size_t groups = 1;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted least squares of ln(rate) on ln(eta) over points inside the
/// window. Weights are (rate/rate_err)^2; if any used point has rate_err 0 the
/// fit is unweighted. The slope error is scaled by sqrt(chi2/dof) when that
/// exceeds one (always, for unweighted fits). Throws FitError with fewer than
/// three usable points.
FitResult fit_power_law(std::span<const EtaPoint> points, FitWindow window,
                        const FitOptions& options = {});

struct RadiusFit {
  double radius = 0.0;
  FitResult fit;
};

struct FssEstimate {
  double alpha = 0.0;
  /// Sample standard deviation of alpha over the radii used.
  double spread = 0.0;
  /// Mean fit error over the radii used.
  double mean_fit_err = 0.0;
  std::size_t radii_used = 0;
  bool degraded = false;
  /// All fits, sorted by radius.
  std::vector<RadiusFit> series;
};

/// Average of alpha over the five largest radii (all of them, flagged
/// degraded, when fewer than five are given).
FssEstimate fss_extrapolate(std::vector<RadiusFit> per_radius);

struct RelationCheck {
  std::string relation;
  int k = 0;
  int l = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double sigma = 0.0;
  bool pass = true;
};

struct RelationReport {
  std::vector<RelationCheck> checks;
  bool all_pass() const;
};

/// alpha_k >= alpha_k^MI, alpha_{k+1} >= alpha_k and
/// alpha_k + alpha_l >= alpha_{k+l}, each failing only when violated by more
/// than n_sigma combined standard errors. Equality passes.
RelationReport check_exponent_relations(const std::map<int, FitResult>& gme,
                                        const std::map<int, FitResult>& mi,
                                        double n_sigma = 2.0);

/// Predicted exponents at the 1+1D critical point.
inline double reference_alpha_gme(int k) { return 2.0 * k; }
inline double reference_alpha_mi(int k) { return k / 3.0; }

/// Upper bound on the k-party decay exponent of the hyperbolic circuit.
inline double hyperbolic_alpha_bound(int k, double p) {
  return k * std::log2(2.0 / p);
}

/// n-th Catalan number; exact for n <= 35.
std::uint64_t catalan(unsigned n);

/// C_{(x+1)/2} 2^-x for odd x: the Dyck-circuit string weight at p = 1/2.
double dyck_connection_law(unsigned x);

}  // namespace mocperc
