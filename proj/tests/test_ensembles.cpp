#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "mocperc/ensembles.hpp"

using namespace mocperc;

namespace {

bool ring_adjacent(Site a, Site b, std::uint32_t n) {
  return (a + 1) % n == b || (b + 1) % n == a;
}

bool torus_adjacent(Site a, Site b, std::uint32_t side) {
  const int ax = a % side, ay = a / side, bx = b % side, by = b / side;
  const int dx = std::min<int>((ax - bx + side) % side, (bx - ax + side) % side);
  const int dy = std::min<int>((ay - by + side) % side, (by - ay + side) % side);
  return dx + dy == 1;
}

std::size_t open_interlayer(const LayerBonds& b) {
  return static_cast<std::size_t>(std::count(b.interlayer_open.begin(), b.interlayer_open.end(), 1));
}

}  // namespace

TEST(Moc1d, FullyOpenAtPOne) {
  const auto cfg = EnsembleConfig::moc1d(16, 4, 1.0);
  const auto b = sample_moc1d_layer(cfg, RealizationRng(1, 0), 0);
  EXPECT_EQ(b.intralayer.size(), 16u);
  EXPECT_EQ(open_interlayer(b), 16u);
  EXPECT_EQ(b.intralayer, ring_bonds(16));
}

TEST(Moc1d, FullyCutAtPZero) {
  const auto cfg = EnsembleConfig::moc1d(16, 4, 0.0);
  const auto b = sample_moc1d_layer(cfg, RealizationRng(1, 0), 0);
  EXPECT_TRUE(b.intralayer.empty());
  EXPECT_EQ(open_interlayer(b), 0u);
}

TEST(Moc1d, BondsAreNearestNeighbours) {
  const auto cfg = EnsembleConfig::moc1d(37, 8, 0.5);
  for (std::uint32_t layer = 0; layer < 8; ++layer) {
    const auto b = sample_moc1d_layer(cfg, RealizationRng(3, 1), layer);
    ASSERT_EQ(b.num_sites(), 37u);
    for (const Bond& e : b.intralayer) {
      ASSERT_LT(e.a, 37u);
      ASSERT_LT(e.b, 37u);
      EXPECT_TRUE(ring_adjacent(e.a, e.b, 37));
    }
  }
}

TEST(Moc1d, OpenFractionAtHalf) {
  const auto cfg = EnsembleConfig::moc1d(1000, 1000, 0.5);
  std::uint64_t intra = 0, inter = 0;
  for (std::uint32_t layer = 0; layer < 1000; ++layer) {
    const auto b = sample_moc1d_layer(cfg, RealizationRng(123, 0), layer);
    intra += b.intralayer.size();
    inter += open_interlayer(b);
  }
  const double n = 1e6;
  const double sigma = std::sqrt(n * 0.25);
  EXPECT_NEAR(intra, 0.5 * n, 3 * sigma);
  EXPECT_NEAR(inter, 0.5 * n, 3 * sigma);
}

TEST(Moc1d, SameSeedSameStream) {
  const auto cfg = EnsembleConfig::moc1d(64, 4, 0.5);
  for (std::uint32_t layer = 0; layer < 4; ++layer) {
    const auto a = sample_moc1d_layer(cfg, RealizationRng(77, 5), layer);
    const auto b = sample_moc1d_layer(cfg, RealizationRng(77, 5), layer);
    EXPECT_EQ(a.intralayer, b.intralayer);
    EXPECT_EQ(a.interlayer_open, b.interlayer_open);
  }
}

TEST(Moc2d, TorusOfSideTwoHasEightBonds) {
  const auto bonds = torus_bonds(2);
  ASSERT_EQ(bonds.size(), 8u);
  // Each of the 4 adjacent site pairs appears once per direction of wrap.
  for (const Bond& e : bonds) EXPECT_TRUE(torus_adjacent(e.a, e.b, 2));
  const auto cfg = EnsembleConfig::moc2d(2, 1, 1.0);
  EXPECT_EQ(sample_moc2d_layer(cfg, RealizationRng(0, 0), 0).intralayer.size(), 8u);
}

TEST(Moc2d, BondCountAndAdjacency) {
  for (std::uint32_t side : {3u, 4u, 7u}) {
    const auto bonds = torus_bonds(side);
    EXPECT_EQ(bonds.size(), 2u * side * side);
    for (const Bond& e : bonds) EXPECT_TRUE(torus_adjacent(e.a, e.b, side));
  }
  const auto cfg = EnsembleConfig::moc2d(5, 1, 1.0);
  const auto b = sample_moc2d_layer(cfg, RealizationRng(0, 0), 0);
  EXPECT_EQ(b.intralayer, torus_bonds(5));
  EXPECT_EQ(open_interlayer(b), 25u);
}

TEST(Moc2d, OpenFractionAtCriticalPoint) {
  const double p = 0.248812;
  const auto cfg = EnsembleConfig::moc2d(50, 2000, p);
  std::uint64_t intra = 0;
  for (std::uint32_t layer = 0; layer < 2000; ++layer) {
    intra += sample_moc2d_layer(cfg, RealizationRng(8, 0), layer).intralayer.size();
  }
  const double n = 2.0 * 2500 * 2000;  // 10^7 bonds
  EXPECT_NEAR(intra / n, p, 3 * std::sqrt(p * (1 - p) / n));
}

TEST(Moc2d, InterlayerFrequency) {
  const double p = 0.3;
  const auto cfg = EnsembleConfig::moc2d(32, 1000, p);
  std::uint64_t inter = 0;
  for (std::uint32_t layer = 0; layer < 1000; ++layer) {
    inter += open_interlayer(sample_moc2d_layer(cfg, RealizationRng(8, 1), layer));
  }
  const double n = 1024.0 * 1000;
  EXPECT_NEAR(inter, n * p, 4 * std::sqrt(n * p * (1 - p)));
}

TEST(Hyperbolic, StructureOfEightSites) {
  const auto cfg = EnsembleConfig::hyperbolic(8, 0.5, 0.25);
  EXPECT_EQ(cfg.depth, 2u);
  std::vector<std::uint32_t> sizes = {hyperbolic_gate_size(cfg, 0), hyperbolic_gate_size(cfg, 1)};
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::uint32_t>{2, 4}));
  const auto slices = sample_hyperbolic_realization(cfg, RealizationRng(1, 1));
  EXPECT_EQ(slices.size(), slice_count(cfg));
}

TEST(Hyperbolic, RejectsBadParameters) {
  EXPECT_THROW(EnsembleConfig::hyperbolic(12, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(EnsembleConfig::hyperbolic(2, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(EnsembleConfig::hyperbolic(16, 0.7, 0.4), std::invalid_argument);
}

TEST(Hyperbolic, GateChainsStayInsideGates) {
  const auto cfg = EnsembleConfig::hyperbolic(32, 0.4, 0.3);
  for (std::uint64_t r = 0; r < 50; ++r) {
    const RealizationRng rng(2, r);
    const auto slices = sample_hyperbolic_realization(cfg, rng);
    const std::uint32_t offset = hyperbolic_offset(cfg, rng);
    for (std::uint32_t s = 0; s < slices.size(); ++s) {
      const std::uint32_t size = hyperbolic_gate_size(cfg, s / 2);
      for (const Bond& e : slices[s].intralayer) {
        ASSERT_TRUE(ring_adjacent(e.a, e.b, 32));
        const std::uint32_t ga = ((e.a + 32 - offset) % 32) / size;
        const std::uint32_t gb = ((e.b + 32 - offset) % 32) / size;
        EXPECT_EQ(ga, gb);
      }
      if (s % 2 == 0) EXPECT_TRUE(slices[s].intralayer.empty());
      else EXPECT_EQ(slices[s].intralayer.size(), 32 - 32 / size);
    }
  }
}

TEST(Hyperbolic, OnlyTransmissionsWhenPIsOne) {
  const auto cfg = EnsembleConfig::hyperbolic(64, 1.0, 0.0);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const RealizationRng rng(4, r);
    for (std::uint32_t layer = 0; layer < cfg.depth; ++layer) {
      for (std::uint32_t g = 0; g < 64 / hyperbolic_gate_size(cfg, layer); ++g) {
        const auto pat = hyperbolic_gate(cfg, rng, layer, g);
        EXPECT_TRUE(pat == GatePattern::kLeftTransmission ||
                    pat == GatePattern::kRightTransmission);
      }
    }
    // Exactly half of each gate output is cut.
    const auto slices = sample_hyperbolic_realization(cfg, rng);
    for (std::uint32_t s = 1; s < slices.size(); s += 2) EXPECT_EQ(open_interlayer(slices[s]), 32u);
  }
}

TEST(Hyperbolic, PatternFrequencies) {
  const double p = 0.4, q = 0.35;
  const auto cfg = EnsembleConfig::hyperbolic(4, p, q);
  std::array<std::uint64_t, 4> counts{};
  const std::uint32_t n = 400000;
  for (std::uint32_t g = 0; g < n; ++g) {
    ++counts[static_cast<int>(hyperbolic_gate(cfg, RealizationRng(6, g / 1000), 0, g % 1000))];
  }
  const std::array<double, 4> expect = {p / 2, p / 2, q, 1 - p - q};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(counts[i], n * expect[i], 4 * std::sqrt(n * expect[i] * (1 - expect[i])))
        << "pattern " << i;
  }
}

TEST(Dyck, AllSwapsAtPZero) {
  const auto cfg = EnsembleConfig::dyck(10, 4, 0.0);
  for (std::uint32_t layer = 0; layer < 4; ++layer) {
    const auto slices = sample_dyck_layer(cfg, RealizationRng(1, 0), layer);
    ASSERT_EQ(slices.size(), 2u);
    for (const auto& s : slices) {
      EXPECT_TRUE(s.intralayer.empty());
      EXPECT_EQ(open_interlayer(s), 10u);
    }
    // The first slice swaps the brickwork pairs.
    const auto& next = slices[0].next_site;
    ASSERT_EQ(next.size(), 10u);
    for (Site s = 0; s < 10; ++s) {
      EXPECT_NE(next[s], s);
      EXPECT_EQ(next[next[s]], s);
      EXPECT_TRUE(ring_adjacent(s, next[s], 10));
    }
  }
}

TEST(Dyck, CompositesAtPOne) {
  const auto cfg = EnsembleConfig::dyck(8, 2, 1.0);
  const auto slices = sample_dyck_layer(cfg, RealizationRng(1, 0), 1);
  EXPECT_EQ(slices[0].intralayer.size(), 4u);
  EXPECT_EQ(slices[1].intralayer.size(), 4u);
  EXPECT_EQ(open_interlayer(slices[0]), 0u);
  EXPECT_EQ(open_interlayer(slices[1]), 8u);
  // Odd layers pair (1,2), (3,4), ...
  EXPECT_EQ(slices[0].intralayer.front(), (Bond{1, 2}));
  EXPECT_EQ(slices[0].intralayer.back(), (Bond{7, 0}));
}

TEST(Dyck, CompositeFrequency) {
  const double p = 0.3;
  const auto cfg = EnsembleConfig::dyck(1000, 1000, p);
  std::uint64_t hits = 0;
  const std::uint32_t n = 500 * 1000;
  for (std::uint32_t layer = 0; layer < 1000; ++layer) {
    for (std::uint32_t pair = 0; pair < 500; ++pair) {
      hits += dyck_composite(cfg, RealizationRng(3, 0), layer, pair);
    }
  }
  EXPECT_NEAR(hits, n * p, 4 * std::sqrt(n * p * (1 - p)));
}

TEST(Families, NamesRoundTrip) {
  for (Family f : {Family::kMoc1d, Family::kMoc2d, Family::kHyperbolic, Family::kDyck}) {
    EXPECT_EQ(family_from_string(to_string(f)), f);
  }
  EXPECT_THROW(family_from_string("moc3d"), std::invalid_argument);
}

TEST(Families, Validation) {
  EXPECT_THROW(EnsembleConfig::moc1d(0, 4, 0.5), std::invalid_argument);
  EXPECT_THROW(EnsembleConfig::moc1d(8, 0, 0.5), std::invalid_argument);
  EXPECT_THROW(EnsembleConfig::moc1d(8, 4, 1.5), std::invalid_argument);
  EXPECT_THROW(EnsembleConfig::moc2d(1, 4, 0.5), std::invalid_argument);
  EXPECT_THROW(EnsembleConfig::dyck(7, 4, 0.5), std::invalid_argument);
}
