#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mocperc/ensembles.hpp"

namespace mocperc {

/// Partition of the final-layer sites into cluster surfaces.
///
/// Clusters are sorted by their smallest site and each cluster is sorted, so
/// two partitions of the same sites compare equal iff they are the same set
/// partition.
struct SurfacePartition {
  std::vector<std::vector<Site>> clusters;

  /// Groups sites by label. Labels are arbitrary integers.
  static SurfacePartition from_labels(std::span<const std::uint32_t> labels);

  std::size_t num_sites() const noexcept;
  friend bool operator==(const SurfacePartition&,
                         const SurfacePartition&) = default;
};

/// Work counters for the potentially superlinear parts of a layer update.
struct OperationCounts {
  std::uint64_t find_steps = 0;   ///< parent hops while tracing roots
  std::uint64_t tree_merges = 0;  ///< merges that joined two distinct trees
  std::uint64_t site_layers = 0;  ///< sites processed by advance_layer
};

/// Rolling union-find over one slice of the percolation model.
///
/// Cluster indices live in [0, 2N). Merges attach the larger root under the
/// smaller one; at the end of each layer every site is relabelled to its
/// root, indices no longer carried by a surviving site are recycled, and
/// sites cut by an X measurement draw fresh indices in ascending site order.
class ClusterState {
 public:
  using Index = std::uint32_t;

  explicit ClusterState(std::uint32_t num_sites);

  std::uint32_t num_sites() const noexcept {
    return static_cast<std::uint32_t>(site_cluster_.size());
  }
  std::uint32_t capacity() const noexcept {
    return static_cast<std::uint32_t>(parent_.size());
  }

  /// Root of the merge tree holding `index`. Halves the traced path.
  Index find_root(Index index) noexcept;

  /// Joins the clusters of sites i and j; the smaller root index wins.
  void merge(Site i, Site j) noexcept;

  /// Applies one slice: intralayer merges, index recycling, X cuts and the
  /// final collapse of every merge tree.
  void advance_layer(const LayerBonds& bonds);

  /// Current cluster index of a site. Exact roots after advance_layer.
  Index cluster_of(Site s) const noexcept { return site_cluster_[s]; }
  std::span<const Index> site_clusters() const noexcept { return site_cluster_; }
  Index parent_of(Index index) const noexcept { return parent_[index]; }
  bool in_use(Index index) const noexcept { return in_use_[index] == epoch_; }

  SurfacePartition surface_partition() const;

  /// Number of distinct indices carried by sites after the last layer.
  std::uint32_t live_indices() const noexcept { return live_; }
  std::uint32_t peak_live_indices() const noexcept { return peak_live_; }
  const OperationCounts& counts() const noexcept { return counts_; }

 private:
  static constexpr Index kFresh = ~Index{0};

  std::vector<Index> site_cluster_;
  std::vector<Index> parent_;
  // in_use_[c] == epoch_ marks c as carried by the current slice.
  std::vector<std::uint32_t> in_use_;
  std::uint32_t epoch_ = 1;
  std::vector<Index> free_list_;
  std::vector<Index> merged_away_;
  std::uint32_t merged_count_ = 0;
  std::vector<Index> next_cluster_;
  std::uint32_t live_ = 0;
  std::uint32_t peak_live_ = 0;
  OperationCounts counts_;
};

}  // namespace mocperc
