#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mocperc/rng.hpp"

namespace mocperc {

using Site = std::uint32_t;

enum class Family { kMoc1d, kMoc2d, kHyperbolic, kDyck };

std::string_view to_string(Family family) noexcept;
Family family_from_string(std::string_view name);

/// Parameters of one random-circuit ensemble.
///
/// For kMoc2d, `side` is the torus side L and `num_sites` = L*L. For
/// kHyperbolic, `num_sites` = 2^n and `depth` is forced to n - 1 gate layers.
struct EnsembleConfig {
  Family family = Family::kMoc1d;
  std::uint32_t num_sites = 0;
  std::uint32_t side = 0;
  std::uint32_t depth = 0;
  double p = 0.5;
  double q = 0.0;

  static EnsembleConfig moc1d(std::uint32_t n, std::uint32_t depth, double p);
  static EnsembleConfig moc2d(std::uint32_t side, std::uint32_t depth,
                              double p);
  static EnsembleConfig hyperbolic(std::uint32_t n, double p, double q);
  static EnsembleConfig dyck(std::uint32_t n, std::uint32_t depth, double p);

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

struct Bond {
  Site a;
  Site b;
  friend bool operator==(const Bond&, const Bond&) = default;
};

/// One time slice of the percolation model.
///
/// Intralayer bonds (ZZ measurements) are applied first. Afterwards the state
/// of site s moves to site `next_site[s]` of the following slice (identity when
/// `next_site` is empty); the connection survives iff `interlayer_open[s]`,
/// i.e. no X measurement was made on s.
struct LayerBonds {
  std::vector<Bond> intralayer;
  std::vector<std::uint8_t> interlayer_open;
  std::vector<Site> next_site;

  std::uint32_t num_sites() const noexcept {
    return static_cast<std::uint32_t>(interlayer_open.size());
  }
  Site destination(Site s) const noexcept {
    return next_site.empty() ? s : next_site[s];
  }
  void reset(std::uint32_t n);
};

/// Nearest-neighbour bond list of a ring of n sites: bond i joins (i, i+1).
std::vector<Bond> ring_bonds(std::uint32_t n);

/// Square torus bonds, two per site: 2s joins s to its +x neighbour and
/// 2s+1 joins s to its +y neighbour (site s = y*L + x). Multi-edges at L = 2
/// are kept as distinct bonds.
std::vector<Bond> torus_bonds(std::uint32_t side);

void sample_moc1d_layer(const EnsembleConfig& cfg, const RealizationRng& rng,
                        std::uint32_t layer, LayerBonds& out);
LayerBonds sample_moc1d_layer(const EnsembleConfig& cfg,
                              const RealizationRng& rng, std::uint32_t layer);

void sample_moc2d_layer(const EnsembleConfig& cfg, const RealizationRng& rng,
                        std::uint32_t layer, LayerBonds& out);
LayerBonds sample_moc2d_layer(const EnsembleConfig& cfg,
                              const RealizationRng& rng, std::uint32_t layer);

enum class GatePattern : std::uint8_t {
  kLeftTransmission,
  kRightTransmission,
  kBranching,
  kReflection,
};

/// Uniform circular offset at which the hyperbolic tree is cut.
std::uint32_t hyperbolic_offset(const EnsembleConfig& cfg,
                                const RealizationRng& rng);
GatePattern hyperbolic_gate(const EnsembleConfig& cfg,
                            const RealizationRng& rng, std::uint32_t layer,
                            std::uint32_t gate);
/// Gate size of hyperbolic gate layer `layer`, counted from the bottom.
std::uint32_t hyperbolic_gate_size(const EnsembleConfig& cfg,
                                   std::uint32_t layer);
std::vector<LayerBonds> sample_hyperbolic_realization(
    const EnsembleConfig& cfg, const RealizationRng& rng);

/// Brickwork pair `pair` of Dyck layer `layer` joins sites (o + 2*pair) and
/// (o + 2*pair + 1) mod N with o = layer % 2. Returns true for the ZZ/X/X/ZZ
/// composite and false for a swap.
bool dyck_composite(const EnsembleConfig& cfg, const RealizationRng& rng,
                    std::uint32_t layer, std::uint32_t pair);
/// The two slices of Dyck layer `layer`.
std::vector<LayerBonds> sample_dyck_layer(const EnsembleConfig& cfg,
                                          const RealizationRng& rng,
                                          std::uint32_t layer);

/// Number of LayerBonds slices one realization of `cfg` emits.
std::uint32_t slice_count(const EnsembleConfig& cfg);

/// Slice `slice` of a realization, for any family. Pure in its arguments.
void sample_slice(const EnsembleConfig& cfg, const RealizationRng& rng,
                  std::uint32_t slice, LayerBonds& out);

}  // namespace mocperc
