#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mocperc/cluster_engine.hpp"

namespace mocperc {

/// Where a subregion set came from. 1D sets use `width` and `spacing`
/// (distance between consecutive left endpoints); 2D sets use `radius_sq`
/// and the displacement (dx, dy).
struct GeometryTag {
  std::uint32_t width = 0;
  std::uint32_t spacing = 0;
  std::uint32_t radius_sq = 0;
  std::int32_t dx = 0;
  std::int32_t dy = 0;
};

/// k >= 2 pairwise disjoint sets of sites.
class SubregionSet {
 public:
  /// Throws std::invalid_argument when k < 2, a region is empty, a site is
  /// out of range, or two regions overlap.
  SubregionSet(std::vector<std::vector<Site>> regions, std::uint32_t num_sites,
               GeometryTag tag = {});

  std::uint32_t k() const noexcept {
    return static_cast<std::uint32_t>(regions_.size());
  }
  std::uint32_t num_sites() const noexcept { return num_sites_; }
  const std::vector<Site>& region(std::uint32_t i) const { return regions_[i]; }
  const std::vector<std::vector<Site>>& regions() const noexcept {
    return regions_;
  }
  const GeometryTag& tag() const noexcept { return tag_; }

  /// The same geometry rotated by `shift` sites along a ring or, for 2D sets
  /// on an L x L torus, by (shift_x, shift_y).
  SubregionSet translated_ring(std::uint32_t shift) const;
  SubregionSet translated_torus(std::uint32_t side, std::uint32_t shift_x,
                                std::uint32_t shift_y) const;

 private:
  std::vector<std::vector<Site>> regions_;
  std::uint32_t num_sites_;
  GeometryTag tag_;
};

struct MeasureOutcome {
  bool gme_hit = false;
  /// k-party mutual information in units of ln 2.
  std::int32_t mi_units = 0;
  bool indirect_hit = false;
};

/// Site-to-cluster lookup built once per realization, so that every
/// subregion set costs O(|A_1| + ... + |A_k|) to evaluate.
class PartitionIndex {
 public:
  PartitionIndex() = default;
  explicit PartitionIndex(const SurfacePartition& partition);
  explicit PartitionIndex(const ClusterState& state) { rebuild(state); }

  /// Reuses the cluster indices of a state whose last layer has completed.
  void rebuild(const ClusterState& state);
  void rebuild(const SurfacePartition& partition);

  /// Replaces the site labels with a rearrangement of the current ones, as
  /// produced by translating the lattice. Cluster sizes are kept.
  void relabel(std::span<const std::uint32_t> labels);

  std::uint32_t num_sites() const noexcept {
    return static_cast<std::uint32_t>(label_.size());
  }
  std::uint32_t label(Site s) const noexcept { return label_[s]; }
  std::uint32_t cluster_size(std::uint32_t label) const noexcept {
    return size_[label];
  }

  /// All three observables in one pass over the subregion sites. The
  /// indirect test is skipped (reported false) unless `with_indirect`.
  MeasureOutcome evaluate(const SubregionSet& subs, bool with_indirect = true);

 private:
  std::vector<std::uint32_t> label_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> mask_;
  std::vector<std::uint32_t> touched_;
};

/// True iff some cluster meets every A_i and lies inside their union.
bool gme_hit(const SurfacePartition& partition, const SubregionSet& subs);

/// Sum over clusters meeting every A_i: 1 if the cluster also reaches the
/// exterior, otherwise 2 for even k and 0 for odd k.
std::int32_t mi_value(const SurfacePartition& partition,
                      const SubregionSet& subs);

/// No k-party cat state, but the regions are connected through clusters
/// confined to their union.
bool indirect_gme_hit(const SurfacePartition& partition,
                      const SubregionSet& subs);

/// k intervals of width w on a ring of n sites. Left endpoints are spaced by
/// `spacing`, or placed at floor(i*n/k) when no spacing is given.
SubregionSet place_subregions_1d(std::uint32_t k, std::uint32_t width,
                                 std::optional<std::uint32_t> spacing,
                                 std::uint32_t num_sites);

/// Lattice offsets (i, j) with i^2 + j^2 < radius_sq.
std::vector<std::pair<int, int>> disc_offsets(std::uint32_t radius_sq);

/// Discs centred at (0,0), (x,y), (-y,x) and (x-y, x+y) on an L x L torus,
/// the first k of them. Requires x^2 + y^2 > 4 * radius_sq.
SubregionSet place_subregions_2d(std::uint32_t k, std::uint32_t radius_sq,
                                 int x, int y, std::uint32_t side);

}  // namespace mocperc
