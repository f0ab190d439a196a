#include "mocperc/cluster_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace mocperc {

namespace {

[[noreturn]] void internal_error(const char* what) {
  std::fprintf(stderr, "mocperc: internal error: %s\n", what);
  std::abort();
}

}  // namespace

SurfacePartition SurfacePartition::from_labels(
    std::span<const std::uint32_t> labels) {
  SurfacePartition out;
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (Site s = 0; s < labels.size(); ++s) {
    auto [it, inserted] = slot.try_emplace(labels[s], out.clusters.size());
    if (inserted) {
      out.clusters.push_back({s});
    } else {
      out.clusters[it->second].push_back(s);
    }
  }
  return out;
}

std::size_t SurfacePartition::num_sites() const noexcept {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  return n;
}

ClusterState::ClusterState(std::uint32_t num_sites)
    : site_cluster_(num_sites),
      parent_(2 * std::size_t{num_sites}),
      in_use_(2 * std::size_t{num_sites} + 1, 0),
      next_cluster_(num_sites) {
  if (num_sites == 0) throw std::invalid_argument("ClusterState needs N >= 1");
  std::iota(site_cluster_.begin(), site_cluster_.end(), Index{0});
  std::iota(parent_.begin(), parent_.end(), Index{0});
  std::fill_n(in_use_.begin(), num_sites, epoch_);
  free_list_.reserve(parent_.size());
  for (Index c = num_sites; c < capacity(); ++c) free_list_.push_back(c);
  // At most N - 1 distinct joins can happen before a collapse, plus one
  // scratch slot for the branch-free store of a self-merge.
  merged_away_.assign(num_sites + 1, 0);
  live_ = peak_live_ = num_sites;
}

ClusterState::Index ClusterState::find_root(Index index) noexcept {
  while (parent_[index] != index) {
    const Index grand = parent_[parent_[index]];
    parent_[index] = grand;
    index = grand;
    ++counts_.find_steps;
  }
  return index;
}

void ClusterState::merge(Site i, Site j) noexcept {
  const Index a = find_root(site_cluster_[i]);
  const Index b = find_root(site_cluster_[j]);
  // Branch-free: merging a root with itself rewrites parent[a] = a.
  const Index lo = std::min(a, b);
  const Index hi = std::max(a, b);
  parent_[hi] = lo;
  merged_away_[merged_count_] = hi;
  const bool joined = a != b;
  merged_count_ += joined;
  counts_.tree_merges += joined;
}

void ClusterState::advance_layer(const LayerBonds& bonds) {
  const std::uint32_t n = num_sites();
  if (bonds.num_sites() != n) {
    throw std::invalid_argument("LayerBonds size does not match ClusterState");
  }
  for (const Bond& bond : bonds.intralayer) merge(bond.a, bond.b);

  // Collapse every site onto its merge-tree root. Roots carried upward by an
  // open interlayer bond stay in use; every other index (merged away, cut, or
  // idle) becomes recyclable.
  if (epoch_ > 0xFFFFFFF0u) {
    for (auto& stamp : in_use_) stamp = stamp == epoch_ ? 1 : 0;
    epoch_ = 1;
  }
  ++epoch_;
  std::uint32_t cuts = 0;
  const std::uint8_t* open = bonds.interlayer_open.data();
  const Index sink = capacity();  // scratch slot absorbing masked stores
  for (Site s = 0; s < n; ++s) {
    const Index root = find_root(site_cluster_[s]);
    const bool keep = open[s] != 0;
    in_use_[keep ? root : sink] = epoch_;
    next_cluster_[s] = keep ? root : kFresh;
    cuts += !keep;
  }
  for (std::uint32_t m = 0; m < merged_count_; ++m) {
    parent_[merged_away_[m]] = merged_away_[m];
  }
  merged_count_ = 0;

  if (!bonds.next_site.empty()) {
    for (Site s = 0; s < n; ++s) site_cluster_[bonds.next_site[s]] = next_cluster_[s];
    site_cluster_.swap(next_cluster_);
  }

  // Fresh indices come off the free list in ascending index order and are
  // handed out in ascending site order.
  free_list_.clear();
  for (Index c = 0; c < capacity() && free_list_.size() < cuts; ++c) {
    if (in_use_[c] != epoch_) free_list_.push_back(c);
  }
  if (free_list_.size() < cuts) internal_error("cluster index pool exhausted");
  if (cuts > 0) {
    free_list_.push_back(sink);
    std::size_t next_free = 0;
    for (Site s = 0; s < n; ++s) {
      const Index current = next_cluster_[s];
      const bool fresh = current == kFresh;
      next_cluster_[s] = fresh ? free_list_[next_free] : current;
      next_free += fresh;
    }
    free_list_.pop_back();
  }
  site_cluster_.swap(next_cluster_);

  // Every carried index is live; count each once.
  live_ = 0;
  const std::uint32_t counted = epoch_ + 1;
  for (Site s = 0; s < n; ++s) {
    const Index c = site_cluster_[s];
    live_ += in_use_[c] != counted;
    in_use_[c] = counted;
  }
  ++epoch_;
  peak_live_ = std::max(peak_live_, live_);
  if (live_ > capacity()) internal_error("live cluster indices exceed 2N");
  counts_.site_layers += n;
}

SurfacePartition ClusterState::surface_partition() const {
  // Labels are merge-tree roots only after a completed layer; resolve anyway
  // so that partitions taken between manual merges are also exact.
  std::vector<std::uint32_t> labels(site_cluster_.size());
  for (Site s = 0; s < labels.size(); ++s) {
    Index c = site_cluster_[s];
    while (parent_[c] != c) c = parent_[c];
    labels[s] = c;
  }
  return SurfacePartition::from_labels(labels);
}

}  // namespace mocperc
