#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "mocperc/ensembles.hpp"

namespace mocperc {

/// Space-time window of a 1+1D circuit: `num_layers` consecutive layers
/// starting at `first_layer`, and `num_columns` consecutive ring sites
/// starting at `first_site`.
struct WeightWindow {
  std::uint32_t first_site = 0;
  std::uint32_t num_columns = 0;
  std::uint32_t first_layer = 0;
  std::uint32_t num_layers = 0;

  /// Window covering the last `layers` layers of a depth-`depth` circuit and
  /// the sites [lo - margin, hi + margin] of a ring of `ring` sites.
  static WeightWindow around(std::uint32_t lo, std::uint32_t hi,
                             std::uint32_t margin, std::uint32_t ring,
                             std::uint32_t depth, std::uint32_t layers);
};

/// Per-edge bond openness. Row t is layer first_layer + t, column c is site
/// first_site + c. horizontal(t, c) is the ZZ bond (c, c+1) of layer t;
/// vertical(t, c) is the bond from site c of layer t to the next layer.
/// Columns wrap when the window spans the whole ring.
struct RealizationWeights {
  Eigen::ArrayXXd horizontal;
  Eigen::ArrayXXd vertical;
  bool periodic_columns = false;

  RealizationWeights() = default;
  RealizationWeights(Eigen::Index layers, Eigen::Index columns, bool periodic)
      : horizontal(Eigen::ArrayXXd::Zero(layers, columns)),
        vertical(Eigen::ArrayXXd::Zero(layers, columns)),
        periodic_columns(periodic) {}
};

/// Copies the 0/1 openness of ring bonds in the window as layers stream by.
class WeightRecorder {
 public:
  WeightRecorder(const WeightWindow& window, std::uint32_t ring);

  void record(std::uint32_t layer, const LayerBonds& bonds);
  const RealizationWeights& weights() const noexcept { return weights_; }

 private:
  WeightWindow window_;
  std::uint32_t ring_;
  RealizationWeights weights_;
};

/// Averages each horizontal edge with the mean of the two vertical edges
/// leaving its endpoints, and each vertical edge with the mean of the two
/// horizontal edges touching its upper end. Missing neighbours (window edge,
/// top layer) are dropped from the neighbour mean; with none left the edge
/// keeps its own value.
RealizationWeights convolve(const RealizationWeights& raw);

/// Measure-weighted sum of realization weights.
class WeightedGraphAccumulator {
 public:
  WeightedGraphAccumulator() = default;
  WeightedGraphAccumulator(Eigen::Index layers, Eigen::Index columns);

  void accumulate(const RealizationWeights& weights, double measure_value);
  void merge(const WeightedGraphAccumulator& other);

  /// Conditional mean weight given the measure: sum_weights / sum_measure.
  /// Throws std::runtime_error when no realization carried any weight.
  RealizationWeights finalize() const;

  const Eigen::ArrayXXd& sum_horizontal() const noexcept { return sum_h_; }
  const Eigen::ArrayXXd& sum_vertical() const noexcept { return sum_v_; }
  double sum_measure() const noexcept { return sum_measure_; }
  std::uint64_t count() const noexcept { return count_; }

 private:
  Eigen::ArrayXXd sum_h_;
  Eigen::ArrayXXd sum_v_;
  double sum_measure_ = 0.0;
  std::uint64_t count_ = 0;
  bool periodic_ = false;
};

}  // namespace mocperc
