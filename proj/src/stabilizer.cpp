#include "mocperc/stabilizer.hpp"

#include <bit>
#include <string>

namespace mocperc {

bool PauliString::commutes_with(const PauliString& o) const noexcept {
  return std::popcount((x & o.z) ^ (z & o.x)) % 2 == 0;
}

void PauliString::multiply_by(const PauliString& o) noexcept {
  // X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
  phase = static_cast<std::uint8_t>(
      (phase + o.phase + 2 * std::popcount(z & o.x)) & 3u);
  x ^= o.x;
  z ^= o.z;
}

Tableau::Tableau(std::uint32_t num_qubits) : n_(num_qubits) {
  if (num_qubits == 0 || num_qubits > 64) {
    throw std::invalid_argument("tableau supports 1..64 qubits");
  }
  gens_.resize(n_);
  for (std::uint32_t q = 0; q < n_; ++q) gens_[q].x = std::uint64_t{1} << q;
}

bool Tableau::measure(const PauliString& op, bool minus) {
  std::size_t pivot = gens_.size();
  for (std::size_t g = 0; g < gens_.size(); ++g) {
    if (gens_[g].commutes_with(op)) continue;
    if (pivot == gens_.size()) {
      pivot = g;
    } else {
      gens_[g].multiply_by(gens_[pivot]);
    }
  }
  if (pivot == gens_.size()) return false;
  gens_[pivot] = op;
  if (minus) gens_[pivot].phase = static_cast<std::uint8_t>((op.phase + 2) & 3u);
  return true;
}

bool Tableau::apply_x_measurement(Site site, bool minus) {
  if (site >= n_) throw std::out_of_range("qubit out of range");
  PauliString op;
  op.x = std::uint64_t{1} << site;
  return measure(op, minus);
}

bool Tableau::apply_zz_measurement(Site i, Site j, bool minus) {
  if (i >= n_ || j >= n_) throw std::out_of_range("qubit out of range");
  if (i == j) throw std::invalid_argument("ZZ measurement needs two qubits");
  PauliString op;
  op.z = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
  return measure(op, minus);
}

namespace {

std::uint64_t permute_bits(std::uint64_t v, std::span<const Site> next_site) {
  std::uint64_t out = 0;
  for (; v; v &= v - 1) {
    const auto s = static_cast<std::uint32_t>(std::countr_zero(v));
    out |= std::uint64_t{1} << next_site[s];
  }
  return out;
}

}  // namespace

void Tableau::apply_permutation(std::span<const Site> next_site) {
  if (next_site.empty()) return;
  if (next_site.size() != n_) throw std::invalid_argument("permutation size mismatch");
  for (auto& g : gens_) {
    g.x = permute_bits(g.x, next_site);
    g.z = permute_bits(g.z, next_site);
  }
}

std::uint32_t Tableau::rank() const {
  std::vector<unsigned __int128> rows;
  for (const auto& g : gens_) {
    rows.push_back((static_cast<unsigned __int128>(g.x) << 64) | g.z);
  }
  std::uint32_t r = 0;
  for (int bit = 127; bit >= 0 && r < rows.size(); --bit) {
    const unsigned __int128 mask = static_cast<unsigned __int128>(1) << bit;
    std::size_t pick = r;
    while (pick < rows.size() && !(rows[pick] & mask)) ++pick;
    if (pick == rows.size()) continue;
    std::swap(rows[r], rows[pick]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != r && (rows[i] & mask)) rows[i] ^= rows[r];
    }
    ++r;
  }
  return r;
}

bool Tableau::mutually_commuting() const {
  for (std::size_t a = 0; a < gens_.size(); ++a) {
    for (std::size_t b = a + 1; b < gens_.size(); ++b) {
      if (!gens_[a].commutes_with(gens_[b])) return false;
    }
  }
  return true;
}

SurfacePartition extract_cat_partition(const Tableau& tab) {
  const std::uint32_t n = tab.num_qubits();
  std::vector<PauliString> rows = tab.generators();

  // Reduced row echelon form on the X block, lowest qubit first.
  std::size_t x_rows = 0;
  for (std::uint32_t q = 0; q < n && x_rows < rows.size(); ++q) {
    const std::uint64_t mask = std::uint64_t{1} << q;
    std::size_t pick = x_rows;
    while (pick < rows.size() && !(rows[pick].x & mask)) ++pick;
    if (pick == rows.size()) continue;
    std::swap(rows[x_rows], rows[pick]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != x_rows && (rows[i].x & mask)) rows[i].multiply_by(rows[x_rows]);
    }
    ++x_rows;
  }

  std::vector<std::uint64_t> supports;
  std::uint64_t covered = 0;
  for (std::size_t i = 0; i < x_rows; ++i) {
    if (rows[i].x & covered) {
      throw TableauStructureError("X-strings of the canonical form overlap");
    }
    covered |= rows[i].x;
    supports.push_back(rows[i].x);
  }
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  if (covered != all) {
    throw TableauStructureError("some qubit is not covered by an X-string");
  }
  // Every Z-block of a valid state is even on each cluster: pure rows are
  // products of Z-pairs, and X-strings carry only such products.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i >= x_rows && rows[i].x != 0) {
      throw TableauStructureError("generator rows are dependent");
    }
    for (std::uint64_t c : supports) {
      if (std::popcount(rows[i].z & c) % 2 != 0) {
        throw TableauStructureError("Z content splits a cluster in row " +
                                    std::to_string(i));
      }
    }
  }
  if (rows.size() - x_rows + supports.size() != n) {
    throw TableauStructureError("wrong number of generators");
  }

  std::vector<std::uint32_t> labels(n);
  for (std::uint32_t c = 0; c < supports.size(); ++c) {
    for (std::uint64_t v = supports[c]; v; v &= v - 1) {
      labels[static_cast<std::uint32_t>(std::countr_zero(v))] = c;
    }
  }
  return SurfacePartition::from_labels(labels);
}

Tableau replay_slices(std::uint32_t num_sites, std::span<const LayerBonds> slices,
                      const RealizationRng& outcome_rng) {
  Tableau tab(num_sites);
  for (std::uint32_t layer = 0; layer < slices.size(); ++layer) {
    const LayerBonds& bonds = slices[layer];
    std::uint32_t op = 0;
    const auto coin = [&] { return (outcome_rng.word(Stream::kOutcome, layer, op++) & 1u) != 0; };
    for (const Bond& b : bonds.intralayer) {
      if (b.a != b.b) tab.apply_zz_measurement(b.a, b.b, coin());
    }
    for (Site s = 0; s < num_sites; ++s) {
      if (!bonds.interlayer_open[s]) tab.apply_x_measurement(s, coin());
    }
    tab.apply_permutation(bonds.next_site);
  }
  return tab;
}

Tableau replay_realization(const EnsembleConfig& cfg,
                           const RealizationRng& bonds_rng,
                           const RealizationRng& outcome_rng) {
  cfg.validate();
  std::vector<LayerBonds> slices(slice_count(cfg));
  for (std::uint32_t s = 0; s < slices.size(); ++s) {
    sample_slice(cfg, bonds_rng, s, slices[s]);
  }
  return replay_slices(cfg.num_sites, slices, outcome_rng);
}

OracleReport oracle_check(const EnsembleConfig& cfg, std::uint64_t seed,
                          std::uint64_t first, std::uint64_t count) {
  cfg.validate();
  OracleReport report;
  std::vector<LayerBonds> slices(slice_count(cfg));
  for (std::uint64_t r = first; r < first + count; ++r) {
    const RealizationRng rng(seed, r);
    ClusterState state(cfg.num_sites);
    for (std::uint32_t s = 0; s < slices.size(); ++s) {
      sample_slice(cfg, rng, s, slices[s]);
      state.advance_layer(slices[s]);
    }
    ++report.checked;
    try {
      const SurfacePartition a =
          extract_cat_partition(replay_slices(cfg.num_sites, slices, rng));
      const SurfacePartition b = extract_cat_partition(
          replay_slices(cfg.num_sites, slices, RealizationRng(~seed, r)));
      report.matched += a == b && a == state.surface_partition();
    } catch (const TableauStructureError&) {
      ++report.structure_errors;
    }
  }
  return report;
}

}  // namespace mocperc
