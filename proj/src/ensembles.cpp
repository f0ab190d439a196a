#include "mocperc/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace mocperc {

namespace {

void sample_interlayer(const RealizationRng& rng, std::uint32_t layer,
                       const BernoulliSource& open, LayerBonds& out) {
  open.for_each(rng, Stream::kInterlayer, layer, out.num_sites(),
                [&](std::uint32_t s, bool o) { out.interlayer_open[s] = o; });
}

std::uint32_t log2_exact(std::uint32_t n) {
  return static_cast<std::uint32_t>(std::countr_zero(n));
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::kMoc1d: return "moc1d";
    case Family::kMoc2d: return "moc2d";
    case Family::kHyperbolic: return "hyperbolic";
    case Family::kDyck: return "dyck";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "moc1d") return Family::kMoc1d;
  if (name == "moc2d") return Family::kMoc2d;
  if (name == "hyperbolic") return Family::kHyperbolic;
  if (name == "dyck") return Family::kDyck;
  throw std::invalid_argument("unknown ensemble family '" + std::string(name) +
                              "'");
}

EnsembleConfig EnsembleConfig::moc1d(std::uint32_t n, std::uint32_t depth,
                                     double p) {
  EnsembleConfig cfg{Family::kMoc1d, n, n, depth, p, 0.0};
  cfg.validate();
  return cfg;
}

EnsembleConfig EnsembleConfig::moc2d(std::uint32_t side, std::uint32_t depth,
                                     double p) {
  EnsembleConfig cfg{Family::kMoc2d, side * side, side, depth, p, 0.0};
  cfg.validate();
  return cfg;
}

EnsembleConfig EnsembleConfig::hyperbolic(std::uint32_t n, double p,
                                          double q) {
  EnsembleConfig cfg{Family::kHyperbolic, n, n, 0, p, q};
  if (n >= 4 && std::has_single_bit(n)) cfg.depth = log2_exact(n) - 1;
  cfg.validate();
  return cfg;
}

EnsembleConfig EnsembleConfig::dyck(std::uint32_t n, std::uint32_t depth,
                                    double p) {
  EnsembleConfig cfg{Family::kDyck, n, n, depth, p, 0.0};
  cfg.validate();
  return cfg;
}

void EnsembleConfig::validate() const {
  if (num_sites == 0) throw std::invalid_argument("num_sites must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  switch (family) {
    case Family::kMoc1d:
      if (depth == 0) throw std::invalid_argument("depth must be positive");
      break;
    case Family::kMoc2d:
      if (side < 2 || side * side != num_sites)
        throw std::invalid_argument("moc2d needs side L >= 2 and N = L*L");
      if (depth == 0) throw std::invalid_argument("depth must be positive");
      break;
    case Family::kHyperbolic:
      if (num_sites < 4 || !std::has_single_bit(num_sites))
        throw std::invalid_argument(
            "hyperbolic circuit needs N = 2^n with n >= 2");
      if (!(q >= 0.0) || p + q > 1.0 + 1e-12)
        throw std::invalid_argument("hyperbolic circuit needs q >= 0, p+q <= 1");
      if (depth != log2_exact(num_sites) - 1)
        throw std::invalid_argument("hyperbolic depth must be log2(N) - 1");
      break;
    case Family::kDyck:
      if (num_sites < 2 || num_sites % 2 != 0)
        throw std::invalid_argument("dyck brickwork needs an even N >= 2");
      if (depth == 0) throw std::invalid_argument("depth must be positive");
      break;
  }
}

void LayerBonds::reset(std::uint32_t n) {
  intralayer.clear();
  interlayer_open.assign(n, 0);
  next_site.clear();
}

std::vector<Bond> ring_bonds(std::uint32_t n) {
  std::vector<Bond> bonds;
  bonds.reserve(n);
  for (Site i = 0; i < n; ++i) bonds.push_back({i, (i + 1) % n});
  return bonds;
}

std::vector<Bond> torus_bonds(std::uint32_t side) {
  std::vector<Bond> bonds;
  bonds.reserve(2 * side * side);
  for (Site y = 0; y < side; ++y) {
    for (Site x = 0; x < side; ++x) {
      const Site s = y * side + x;
      bonds.push_back({s, y * side + (x + 1) % side});
      bonds.push_back({s, ((y + 1) % side) * side + x});
    }
  }
  return bonds;
}

void sample_moc1d_layer(const EnsembleConfig& cfg, const RealizationRng& rng,
                        std::uint32_t layer, LayerBonds& out) {
  const std::uint32_t n = cfg.num_sites;
  const BernoulliSource open(cfg.p);
  out.reset(n);
  // Branch-free append: the slot is always written, the count only advances
  // for open bonds.
  out.intralayer.resize(n);
  Bond* dst = out.intralayer.data();
  std::uint32_t count = 0;
  open.for_each(rng, Stream::kIntralayer, layer, n,
                [&](std::uint32_t i, bool o) {
                  dst[count] = {i, i + 1 == n ? 0 : i + 1};
                  count += o;
                });
  out.intralayer.resize(count);
  sample_interlayer(rng, layer, open, out);
}

LayerBonds sample_moc1d_layer(const EnsembleConfig& cfg,
                              const RealizationRng& rng, std::uint32_t layer) {
  LayerBonds out;
  sample_moc1d_layer(cfg, rng, layer, out);
  return out;
}

void sample_moc2d_layer(const EnsembleConfig& cfg, const RealizationRng& rng,
                        std::uint32_t layer, LayerBonds& out) {
  const std::uint32_t side = cfg.side;
  const BernoulliSource open(cfg.p);
  out.reset(cfg.num_sites);
  out.intralayer.resize(2 * cfg.num_sites);
  Bond* dst = out.intralayer.data();
  std::uint32_t count = 0;
  open.for_each(rng, Stream::kIntralayer, layer, 2 * cfg.num_sites,
                [&](std::uint32_t b, bool o) {
                  const Site s = b >> 1;
                  const Site x = s % side;
                  const Site y = s / side;
                  const Site right = y * side + (x + 1 == side ? 0 : x + 1);
                  const Site down = (y + 1 == side ? 0 : y + 1) * side + x;
                  dst[count] = {s, (b & 1u) ? down : right};
                  count += o;
                });
  out.intralayer.resize(count);
  sample_interlayer(rng, layer, open, out);
}

LayerBonds sample_moc2d_layer(const EnsembleConfig& cfg,
                              const RealizationRng& rng, std::uint32_t layer) {
  LayerBonds out;
  sample_moc2d_layer(cfg, rng, layer, out);
  return out;
}

std::uint32_t hyperbolic_offset(const EnsembleConfig& cfg,
                                const RealizationRng& rng) {
  return rng.below(Stream::kOffset, 0, 0, cfg.num_sites);
}

GatePattern hyperbolic_gate(const EnsembleConfig& cfg,
                            const RealizationRng& rng, std::uint32_t layer,
                            std::uint32_t gate) {
  const double u = rng.uniform(Stream::kGatePattern, layer, gate);
  if (u < 0.5 * cfg.p) return GatePattern::kLeftTransmission;
  if (u < cfg.p) return GatePattern::kRightTransmission;
  if (u < cfg.p + cfg.q) return GatePattern::kBranching;
  return GatePattern::kReflection;
}

std::uint32_t hyperbolic_gate_size(const EnsembleConfig& cfg,
                                   std::uint32_t layer) {
  // Bottom layer carries the largest gates, 2^(n-1); the top layer has size 2.
  return std::uint32_t{1} << (cfg.depth - layer);
}

namespace {

// Gate layer `layer` lowers to two slices: the first applies X to the input
// of reflecting gates, the second applies the ZZ chain followed by X on the
// transmitted-away half of the output.
void hyperbolic_slice(const EnsembleConfig& cfg, const RealizationRng& rng,
                      std::uint32_t slice, LayerBonds& out) {
  const std::uint32_t n = cfg.num_sites;
  const std::uint32_t layer = slice / 2;
  const bool input_slice = slice % 2 == 0;
  const std::uint32_t size = hyperbolic_gate_size(cfg, layer);
  const std::uint32_t offset = hyperbolic_offset(cfg, rng);
  out.reset(n);
  std::fill(out.interlayer_open.begin(), out.interlayer_open.end(), 1);
  for (std::uint32_t g = 0; g < n / size; ++g) {
    const GatePattern pattern = hyperbolic_gate(cfg, rng, layer, g);
    const auto site = [&](std::uint32_t j) {
      return (offset + g * size + j) % n;
    };
    if (input_slice) {
      if (pattern == GatePattern::kReflection) {
        for (std::uint32_t j = 0; j < size; ++j) out.interlayer_open[site(j)] = 0;
      }
      continue;
    }
    for (std::uint32_t j = 0; j + 1 < size; ++j) {
      out.intralayer.push_back({site(j), site(j + 1)});
    }
    if (pattern == GatePattern::kLeftTransmission) {
      for (std::uint32_t j = 0; j < size / 2; ++j) out.interlayer_open[site(j)] = 0;
    } else if (pattern == GatePattern::kRightTransmission) {
      for (std::uint32_t j = size / 2; j < size; ++j) {
        out.interlayer_open[site(j)] = 0;
      }
    }
  }
}

void dyck_slice(const EnsembleConfig& cfg, const RealizationRng& rng,
                std::uint32_t slice, LayerBonds& out) {
  const std::uint32_t n = cfg.num_sites;
  const std::uint32_t layer = slice / 2;
  const bool first = slice % 2 == 0;
  const std::uint32_t phase = layer % 2;
  out.reset(n);
  std::fill(out.interlayer_open.begin(), out.interlayer_open.end(), 1);
  if (first) {
    out.next_site.resize(n);
    for (Site s = 0; s < n; ++s) out.next_site[s] = s;
  }
  for (std::uint32_t pair = 0; pair < n / 2; ++pair) {
    const Site a = (phase + 2 * pair) % n;
    const Site b = (a + 1) % n;
    if (dyck_composite(cfg, rng, layer, pair)) {
      out.intralayer.push_back({a, b});
      if (first) {
        out.interlayer_open[a] = 0;
        out.interlayer_open[b] = 0;
      }
    } else if (first) {
      out.next_site[a] = b;
      out.next_site[b] = a;
    }
  }
}

}  // namespace

std::vector<LayerBonds> sample_hyperbolic_realization(
    const EnsembleConfig& cfg, const RealizationRng& rng) {
  std::vector<LayerBonds> slices(slice_count(cfg));
  for (std::uint32_t s = 0; s < slices.size(); ++s) {
    hyperbolic_slice(cfg, rng, s, slices[s]);
  }
  return slices;
}

bool dyck_composite(const EnsembleConfig& cfg, const RealizationRng& rng,
                    std::uint32_t layer, std::uint32_t pair) {
  return BernoulliSource(cfg.p).draw(rng, Stream::kGatePattern, layer, pair);
}

std::vector<LayerBonds> sample_dyck_layer(const EnsembleConfig& cfg,
                                          const RealizationRng& rng,
                                          std::uint32_t layer) {
  std::vector<LayerBonds> slices(2);
  dyck_slice(cfg, rng, 2 * layer, slices[0]);
  dyck_slice(cfg, rng, 2 * layer + 1, slices[1]);
  return slices;
}

std::uint32_t slice_count(const EnsembleConfig& cfg) {
  switch (cfg.family) {
    case Family::kMoc1d:
    case Family::kMoc2d:
      return cfg.depth;
    case Family::kHyperbolic:
    case Family::kDyck:
      return 2 * cfg.depth;
  }
  return 0;
}

void sample_slice(const EnsembleConfig& cfg, const RealizationRng& rng,
                  std::uint32_t slice, LayerBonds& out) {
  switch (cfg.family) {
    case Family::kMoc1d: sample_moc1d_layer(cfg, rng, slice, out); return;
    case Family::kMoc2d: sample_moc2d_layer(cfg, rng, slice, out); return;
    case Family::kHyperbolic: hyperbolic_slice(cfg, rng, slice, out); return;
    case Family::kDyck: dyck_slice(cfg, rng, slice, out); return;
  }
}

}  // namespace mocperc
