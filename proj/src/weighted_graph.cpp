#include "mocperc/weighted_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace mocperc {

WeightWindow WeightWindow::around(std::uint32_t lo, std::uint32_t hi,
                                  std::uint32_t margin, std::uint32_t ring,
                                  std::uint32_t depth, std::uint32_t layers) {
  WeightWindow w;
  const std::uint64_t span = std::uint64_t{hi} - lo + 1 + 2 * std::uint64_t{margin};
  if (hi < lo || span >= ring) {
    w.first_site = 0;
    w.num_columns = ring;
  } else {
    w.first_site = (lo + ring - margin % ring) % ring;
    w.num_columns = static_cast<std::uint32_t>(span);
  }
  w.num_layers = std::min(layers, depth);
  w.first_layer = depth - w.num_layers;
  return w;
}

WeightRecorder::WeightRecorder(const WeightWindow& window, std::uint32_t ring)
    : window_(window),
      ring_(ring),
      weights_(window.num_layers, window.num_columns, window.num_columns == ring) {}

void WeightRecorder::record(std::uint32_t layer, const LayerBonds& bonds) {
  if (layer < window_.first_layer || layer >= window_.first_layer + window_.num_layers) {
    return;
  }
  const Eigen::Index row = layer - window_.first_layer;
  const auto column = [&](Site s) -> Eigen::Index {
    return static_cast<Eigen::Index>((s + ring_ - window_.first_site) % ring_);
  };
  weights_.horizontal.row(row).setZero();
  for (const Bond& b : bonds.intralayer) {
    // Ring bond (s, s+1) is stored at column s.
    const Site left = (b.a + 1) % ring_ == b.b ? b.a : b.b;
    const Eigen::Index c = column(left);
    if (c < weights_.horizontal.cols()) weights_.horizontal(row, c) = 1.0;
  }
  for (Eigen::Index c = 0; c < weights_.vertical.cols(); ++c) {
    const Site s = static_cast<Site>((window_.first_site + c) % ring_);
    weights_.vertical(row, c) = bonds.interlayer_open[s] ? 1.0 : 0.0;
  }
}

RealizationWeights convolve(const RealizationWeights& raw) {
  const Eigen::Index layers = raw.horizontal.rows();
  const Eigen::Index cols = raw.horizontal.cols();
  RealizationWeights out(layers, cols, raw.periodic_columns);
  const auto col = [&](Eigen::Index c) -> Eigen::Index {
    if (raw.periodic_columns) return (c + cols) % cols;
    return (c < 0 || c >= cols) ? -1 : c;
  };
  for (Eigen::Index t = 0; t < layers; ++t) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      // Horizontal (c, c+1): vertical edges leaving c and c+1.
      double sum = 0.0;
      int n = 0;
      for (Eigen::Index nb : {col(c), col(c + 1)}) {
        if (nb >= 0) {
          sum += raw.vertical(t, nb);
          ++n;
        }
      }
      out.horizontal(t, c) =
          n ? 0.5 * (raw.horizontal(t, c) + sum / n) : raw.horizontal(t, c);

      // Vertical at c: horizontal edges (c-1, c) and (c, c+1) one layer up.
      sum = 0.0;
      n = 0;
      if (t + 1 < layers) {
        for (Eigen::Index nb : {col(c - 1), col(c)}) {
          if (nb >= 0) {
            sum += raw.horizontal(t + 1, nb);
            ++n;
          }
        }
      }
      out.vertical(t, c) =
          n ? 0.5 * (raw.vertical(t, c) + sum / n) : raw.vertical(t, c);
    }
  }
  return out;
}

WeightedGraphAccumulator::WeightedGraphAccumulator(Eigen::Index layers,
                                                   Eigen::Index columns)
    : sum_h_(Eigen::ArrayXXd::Zero(layers, columns)),
      sum_v_(Eigen::ArrayXXd::Zero(layers, columns)) {}

void WeightedGraphAccumulator::accumulate(const RealizationWeights& weights,
                                          double measure_value) {
  if (measure_value < 0.0) {
    throw std::invalid_argument("measure value must be nonnegative");
  }
  if (sum_h_.size() == 0 && count_ == 0) {
    sum_h_ = Eigen::ArrayXXd::Zero(weights.horizontal.rows(), weights.horizontal.cols());
    sum_v_ = Eigen::ArrayXXd::Zero(weights.vertical.rows(), weights.vertical.cols());
  }
  if (weights.horizontal.rows() != sum_h_.rows() ||
      weights.horizontal.cols() != sum_h_.cols()) {
    throw std::invalid_argument("weight window shape mismatch");
  }
  periodic_ = weights.periodic_columns;
  ++count_;
  if (measure_value == 0.0) return;
  sum_h_ += measure_value * weights.horizontal;
  sum_v_ += measure_value * weights.vertical;
  sum_measure_ += measure_value;
}

void WeightedGraphAccumulator::merge(const WeightedGraphAccumulator& other) {
  if (other.sum_h_.size() == 0) {
    count_ += other.count_;
    return;
  }
  if (sum_h_.size() == 0) {
    const auto mine = count_;
    *this = other;
    count_ += mine;
    return;
  }
  if (other.sum_h_.rows() != sum_h_.rows() || other.sum_h_.cols() != sum_h_.cols()) {
    throw std::invalid_argument("weight window shape mismatch");
  }
  sum_h_ += other.sum_h_;
  sum_v_ += other.sum_v_;
  sum_measure_ += other.sum_measure_;
  count_ += other.count_;
  periodic_ = periodic_ || other.periodic_;
}

RealizationWeights WeightedGraphAccumulator::finalize() const {
  if (!(sum_measure_ > 0.0)) {
    throw std::runtime_error(
        "no hits: weighted graph is undefined, collect more realizations");
  }
  RealizationWeights out;
  out.horizontal = sum_h_ / sum_measure_;
  out.vertical = sum_v_ / sum_measure_;
  out.periodic_columns = periodic_;
  return out;
}

}  // namespace mocperc
