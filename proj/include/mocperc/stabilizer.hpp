#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mocperc/cluster_engine.hpp"
#include "mocperc/ensembles.hpp"
#include "mocperc/rng.hpp"

namespace mocperc {

/// i^phase * prod_q X_q^{x_q} Z_q^{z_q} on at most 64 qubits.
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  std::uint8_t phase = 0;

  bool negative() const noexcept { return phase == 2; }
  bool commutes_with(const PauliString& o) const noexcept;
  /// this <- this * o
  void multiply_by(const PauliString& o) noexcept;
};

class TableauStructureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Stabilizer generators of an n-qubit state, n <= 64, starting from |+>^n.
class Tableau {
 public:
  explicit Tableau(std::uint32_t num_qubits);

  std::uint32_t num_qubits() const noexcept { return n_; }
  const std::vector<PauliString>& generators() const noexcept { return gens_; }

  /// Measures a Pauli operator. When the outcome is random, `minus` selects
  /// the -1 eigenvalue. Returns true iff the outcome was random.
  bool measure(const PauliString& op, bool minus);
  bool apply_x_measurement(Site site, bool minus);
  bool apply_zz_measurement(Site i, Site j, bool minus);

  /// Moves qubit s to position next_site[s].
  void apply_permutation(std::span<const Site> next_site);

  /// Rank of the generators over GF(2) in the symplectic representation.
  std::uint32_t rank() const;
  bool mutually_commuting() const;

 private:
  std::uint32_t n_;
  std::vector<PauliString> gens_;
};

/// Groups qubits into cat states. Canonicalizes the generators and checks
/// they are one X-string per cluster plus Z-pairs inside clusters; throws
/// TableauStructureError otherwise.
SurfacePartition extract_cat_partition(const Tableau& tab);

/// Replays one realization gate by gate: ZZ on every intralayer bond, then X
/// on every cut site, then the slice permutation. Bonds come from `bonds_rng`;
/// random outcomes come from the outcome stream of `outcome_rng`.
Tableau replay_realization(const EnsembleConfig& cfg,
                           const RealizationRng& bonds_rng,
                           const RealizationRng& outcome_rng);

/// Same as replay_realization, for an explicit list of slices.
Tableau replay_slices(std::uint32_t num_sites, std::span<const LayerBonds> slices,
                      const RealizationRng& outcome_rng);

struct OracleReport {
  std::uint64_t checked = 0;
  std::uint64_t matched = 0;
  std::uint64_t structure_errors = 0;
  bool all_matched() const noexcept { return checked == matched; }
};

/// Replays realizations [first, first + count) both through the cluster
/// engine and through the tableau, twice with independent measurement
/// outcomes, and counts realizations where all three partitions agree.
OracleReport oracle_check(const EnsembleConfig& cfg, std::uint64_t seed,
                          std::uint64_t first, std::uint64_t count);

}  // namespace mocperc
