#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mocperc/experiment.hpp"

namespace mocperc {

inline constexpr const char* kTallyHeader =
    "family,k,width_or_radius,dx,dy,eta,hits,mi_sum_ln2,indirect_hits,iterations";

struct TallyRow {
  std::string family;
  std::uint32_t k = 0;
  double width_or_radius = 0.0;
  std::int32_t dx = 0;
  std::int32_t dy = 0;
  double eta = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t mi_sum = 0;
  std::uint64_t indirect_hits = 0;
  std::uint64_t iterations = 0;
  /// Only known when the row comes straight from an accumulator.
  std::optional<std::uint64_t> mi_sumsq;
};

std::vector<TallyRow> tally_rows(const HitAccumulator& acc);

void write_tally_csv(std::ostream& out, const std::vector<TallyRow>& rows);
void write_tally_csv(const std::string& path, const std::vector<TallyRow>& rows);
/// Throws std::runtime_error on a malformed file.
std::vector<TallyRow> read_tally_csv(std::istream& in);
std::vector<TallyRow> read_tally_csv(const std::string& path);

/// Per-k power-law fits of hit and mutual-information rates, angle averaged
/// and extrapolated over radii on the torus, plus the exponent relations.
/// The family and torus side are taken from `cfg`.
nlohmann::json fit_report(const std::vector<TallyRow>& rows, const RunConfig& cfg);

/// Hit (or MI) rate points of one k, with binomial errors. 1D families only.
std::vector<EtaPoint> eta_points_1d(const std::vector<TallyRow>& rows,
                                    std::uint32_t k, bool mutual_information);

/// Angle-averaged points of one (k, radius) on the torus.
std::vector<EtaPoint> eta_points_2d(const std::vector<TallyRow>& rows,
                                    std::uint32_t k, double radius,
                                    std::uint32_t side, bool mutual_information,
                                    FitWindow window, const FitConfig& fit);

/// Rows are layers, columns are sites.
void write_matrix_csv(const std::string& path, const Eigen::ArrayXXd& m);

nlohmann::json accumulator_to_json(const HitAccumulator& acc);
/// Fills the tallies of an accumulator built from the same geometry plan.
void accumulator_from_json(const nlohmann::json& j, HitAccumulator& acc);

}  // namespace mocperc
