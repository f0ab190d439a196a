// Brute-force reference implementations shared by the unit and acceptance
// tests. Deliberately slow and independent of the library's algorithms.
#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "mocperc/cluster_engine.hpp"
#include "mocperc/ensembles.hpp"
#include "mocperc/measures.hpp"

namespace oracle {

using mocperc::LayerBonds;
using mocperc::Site;
using mocperc::SubregionSet;
using mocperc::SurfacePartition;

// Materializes the space-time graph: node (t, s) for t = 0..d. Slice t joins
// its intralayer bonds on layer t and links (t, s) to (t+1, destination(s))
// when the interlayer bond is open. Components are found by BFS and then
// restricted to the last layer.
inline SurfacePartition flood_fill(std::uint32_t n, const std::vector<LayerBonds>& slices) {
  const std::size_t layers = slices.size() + 1;
  std::vector<std::vector<std::uint32_t>> adj(layers * n);
  const auto node = [n](std::size_t t, Site s) { return static_cast<std::uint32_t>(t * n + s); };
  for (std::size_t t = 0; t < slices.size(); ++t) {
    for (const auto& b : slices[t].intralayer) {
      adj[node(t, b.a)].push_back(node(t, b.b));
      adj[node(t, b.b)].push_back(node(t, b.a));
    }
    for (Site s = 0; s < n; ++s) {
      if (!slices[t].interlayer_open[s]) continue;
      const Site d = slices[t].destination(s);
      adj[node(t, s)].push_back(node(t + 1, d));
      adj[node(t + 1, d)].push_back(node(t, s));
    }
  }
  std::vector<std::uint32_t> comp(adj.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (std::uint32_t start = 0; start < adj.size(); ++start) {
    if (comp[start] != UINT32_MAX) continue;
    std::queue<std::uint32_t> q;
    q.push(start);
    comp[start] = next;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj[u]) {
        if (comp[v] == UINT32_MAX) {
          comp[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  std::vector<std::uint32_t> labels(n);
  for (Site s = 0; s < n; ++s) labels[s] = comp[node(slices.size(), s)];
  return SurfacePartition::from_labels(labels);
}

// Entropy in ln 2 units of a region B for a product of cat states: one unit
// per cluster that has sites both inside and outside B.
inline int cat_entropy(const SurfacePartition& p, const std::vector<char>& in_b) {
  int s = 0;
  for (const auto& c : p.clusters) {
    bool in = false, out = false;
    for (Site x : c) (in_b[x] ? in : out) = true;
    s += in && out;
  }
  return s;
}

// k-party mutual information by inclusion-exclusion:
//   I_k = sum over nonempty T of (-1)^{|T|+1} S(union_{i in T} A_i).
inline int mutual_information(const SurfacePartition& p, const SubregionSet& subs) {
  const std::uint32_t k = subs.k();
  int total = 0;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    std::vector<char> in_b(subs.num_sites(), 0);
    int size = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
      if (!(mask >> i & 1u)) continue;
      ++size;
      for (Site s : subs.region(i)) in_b[s] = 1;
    }
    total += (size % 2 == 1 ? 1 : -1) * cat_entropy(p, in_b);
  }
  return total;
}

}  // namespace oracle
