#include "mocperc/measures.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mocperc {

SubregionSet::SubregionSet(std::vector<std::vector<Site>> regions,
                           std::uint32_t num_sites, GeometryTag tag)
    : regions_(std::move(regions)), num_sites_(num_sites), tag_(tag) {
  if (regions_.size() < 2) throw std::invalid_argument("need k >= 2 subregions");
  if (regions_.size() > 32) throw std::invalid_argument("at most 32 subregions");
  std::vector<std::uint8_t> owner(num_sites, 0);
  for (auto& region : regions_) {
    if (region.empty()) throw std::invalid_argument("empty subregion");
    std::sort(region.begin(), region.end());
    for (Site s : region) {
      if (s >= num_sites) {
        throw std::invalid_argument("subregion site " + std::to_string(s) +
                                    " out of range");
      }
      if (owner[s]) throw std::invalid_argument("subregions overlap");
      owner[s] = 1;
    }
  }
}

SubregionSet SubregionSet::translated_ring(std::uint32_t shift) const {
  auto regions = regions_;
  for (auto& region : regions) {
    for (Site& s : region) s = (s + shift) % num_sites_;
  }
  return SubregionSet(std::move(regions), num_sites_, tag_);
}

SubregionSet SubregionSet::translated_torus(std::uint32_t side,
                                            std::uint32_t shift_x,
                                            std::uint32_t shift_y) const {
  auto regions = regions_;
  for (auto& region : regions) {
    for (Site& s : region) {
      const Site x = (s % side + shift_x) % side;
      const Site y = (s / side + shift_y) % side;
      s = y * side + x;
    }
  }
  return SubregionSet(std::move(regions), num_sites_, tag_);
}

PartitionIndex::PartitionIndex(const SurfacePartition& partition) {
  rebuild(partition);
}

void PartitionIndex::rebuild(const ClusterState& state) {
  const auto clusters = state.site_clusters();
  label_.assign(clusters.begin(), clusters.end());
  size_.assign(state.capacity(), 0);
  for (std::uint32_t c : label_) ++size_[c];
  count_.assign(size_.size(), 0);
  mask_.assign(size_.size(), 0);
}

void PartitionIndex::rebuild(const SurfacePartition& partition) {
  label_.assign(partition.num_sites(), 0);
  size_.assign(partition.clusters.size(), 0);
  for (std::uint32_t c = 0; c < partition.clusters.size(); ++c) {
    for (Site s : partition.clusters[c]) label_.at(s) = c;
    size_[c] = static_cast<std::uint32_t>(partition.clusters[c].size());
  }
  count_.assign(size_.size(), 0);
  mask_.assign(size_.size(), 0);
}

void PartitionIndex::relabel(std::span<const std::uint32_t> labels) {
  label_.assign(labels.begin(), labels.end());
}

namespace {

// Union-find over at most 32 region vertices.
struct RegionLinks {
  std::uint32_t parent[32];

  explicit RegionLinks(std::uint32_t k) {
    std::iota(parent, parent + k, 0u);
  }
  std::uint32_t root(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void join_mask(std::uint32_t mask) {
    const std::uint32_t first = static_cast<std::uint32_t>(std::countr_zero(mask));
    for (mask &= mask - 1; mask; mask &= mask - 1) {
      const std::uint32_t a = root(first);
      const std::uint32_t b = root(static_cast<std::uint32_t>(std::countr_zero(mask)));
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

}  // namespace

MeasureOutcome PartitionIndex::evaluate(const SubregionSet& subs,
                                        bool with_indirect) {
  const std::uint32_t k = subs.k();
  const std::uint32_t full = k == 32 ? ~0u : (1u << k) - 1;
  touched_.clear();
  for (std::uint32_t r = 0; r < k; ++r) {
    for (Site s : subs.region(r)) {
      const std::uint32_t c = label_[s];
      if (count_[c]++ == 0) touched_.push_back(c);
      mask_[c] |= 1u << r;
    }
  }

  MeasureOutcome out;
  for (std::uint32_t c : touched_) {
    if (mask_[c] != full) continue;
    const bool confined = count_[c] == size_[c];
    out.gme_hit |= confined;
    out.mi_units += confined ? (k % 2 == 0 ? 2 : 0) : 1;
  }
  if (with_indirect && !out.gme_hit) {
    RegionLinks links(k);
    for (std::uint32_t c : touched_) {
      if (count_[c] == size_[c] && std::popcount(mask_[c]) >= 2) {
        links.join_mask(mask_[c]);
      }
    }
    out.indirect_hit = true;
    for (std::uint32_t r = 1; r < k; ++r) {
      if (links.root(r) != links.root(0)) {
        out.indirect_hit = false;
        break;
      }
    }
  }
  for (std::uint32_t c : touched_) {
    count_[c] = 0;
    mask_[c] = 0;
  }
  return out;
}

bool gme_hit(const SurfacePartition& partition, const SubregionSet& subs) {
  return PartitionIndex(partition).evaluate(subs).gme_hit;
}

std::int32_t mi_value(const SurfacePartition& partition,
                      const SubregionSet& subs) {
  return PartitionIndex(partition).evaluate(subs).mi_units;
}

bool indirect_gme_hit(const SurfacePartition& partition,
                      const SubregionSet& subs) {
  return PartitionIndex(partition).evaluate(subs).indirect_hit;
}

SubregionSet place_subregions_1d(std::uint32_t k, std::uint32_t width,
                                 std::optional<std::uint32_t> spacing,
                                 std::uint32_t num_sites) {
  if (k < 2) throw std::invalid_argument("need k >= 2 subregions");
  if (width == 0) throw std::invalid_argument("subregion width must be positive");
  if (std::uint64_t{k} * width > num_sites) {
    throw std::invalid_argument("k * width exceeds the number of sites");
  }
  std::vector<std::vector<Site>> regions(k);
  std::vector<std::uint64_t> left(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    left[i] = spacing ? std::uint64_t{i} * *spacing
                      : std::uint64_t{i} * num_sites / k;
  }
  if (spacing && (*spacing < width ||
                  (k - 1) * std::uint64_t{*spacing} + width > num_sites)) {
    throw std::invalid_argument("subregion spacing makes intervals overlap");
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < width; ++j) {
      regions[i].push_back(static_cast<Site>((left[i] + j) % num_sites));
    }
  }
  GeometryTag tag;
  tag.width = width;
  tag.spacing = spacing ? *spacing : num_sites / k;
  return SubregionSet(std::move(regions), num_sites, tag);
}

std::vector<std::pair<int, int>> disc_offsets(std::uint32_t radius_sq) {
  std::vector<std::pair<int, int>> out;
  int reach = 0;
  while (static_cast<std::uint32_t>(reach * reach) < radius_sq) ++reach;
  for (int j = -reach; j <= reach; ++j) {
    for (int i = -reach; i <= reach; ++i) {
      if (static_cast<std::uint32_t>(i * i + j * j) < radius_sq) {
        out.emplace_back(i, j);
      }
    }
  }
  return out;
}

SubregionSet place_subregions_2d(std::uint32_t k, std::uint32_t radius_sq,
                                 int x, int y, std::uint32_t side) {
  if (k < 2 || k > 4) throw std::invalid_argument("2D placement supports k in 2..4");
  if (radius_sq == 0) throw std::invalid_argument("radius must be positive");
  if (static_cast<std::int64_t>(x) * x + static_cast<std::int64_t>(y) * y <=
      4 * static_cast<std::int64_t>(radius_sq)) {
    throw std::invalid_argument("displacement must satisfy x^2 + y^2 > (2r)^2");
  }
  const std::pair<int, int> centres[4] = {{0, 0}, {x, y}, {-y, x}, {x - y, x + y}};
  const auto disc = disc_offsets(radius_sq);
  const int l = static_cast<int>(side);
  const auto wrap = [l](int v) { return ((v % l) + l) % l; };
  std::vector<std::vector<Site>> regions(k);
  for (std::uint32_t r = 0; r < k; ++r) {
    for (const auto& [i, j] : disc) {
      const int px = wrap(centres[r].first + i);
      const int py = wrap(centres[r].second + j);
      regions[r].push_back(static_cast<Site>(py * l + px));
    }
    std::sort(regions[r].begin(), regions[r].end());
    if (std::adjacent_find(regions[r].begin(), regions[r].end()) !=
        regions[r].end()) {
      throw std::invalid_argument("disc wraps onto itself on this torus");
    }
  }
  GeometryTag tag;
  tag.radius_sq = radius_sq;
  tag.dx = x;
  tag.dy = y;
  return SubregionSet(std::move(regions), side * side, tag);
}

}  // namespace mocperc
