#pragma once

#include <array>
#include <cstdint>

namespace mocperc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every output block is a pure function of (key, counter), so any random
/// draw in a simulation can be regenerated in isolation from its coordinates.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(Key key) : key_(key) {}

  [[nodiscard]] Counter operator()(Counter ctr) const noexcept;

 private:
  Key key_;
};

/// Independent random streams drawn from the same master seed.
enum class Stream : std::uint32_t {
  kIntralayer = 1,
  kInterlayer = 2,
  kGatePattern = 3,
  kOffset = 4,
  kOutcome = 5,
  kAuxiliary = 6,
};

/// Addressable source of uniform 32-bit words for one realization.
///
/// A word is identified by (stream, layer, index); the realization index and
/// master seed are fixed at construction.
class RealizationRng {
 public:
  RealizationRng(std::uint64_t master_seed, std::uint64_t realization);

  /// Four consecutive words, block number `block` of (stream, layer).
  [[nodiscard]] Philox4x32::Counter block(Stream stream, std::uint32_t layer,
                                         std::uint32_t block) const noexcept {
    return gen_({block, layer, static_cast<std::uint32_t>(stream) ^ real_hi_,
                 real_lo_});
  }

  [[nodiscard]] std::uint32_t word(Stream stream, std::uint32_t layer,
                                   std::uint32_t index) const noexcept {
    return block(stream, layer, index >> 2)[index & 3u];
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  [[nodiscard]] double uniform(Stream stream, std::uint32_t layer,
                               std::uint32_t index) const noexcept;

  /// Uniform integer in [0, n).
  [[nodiscard]] std::uint32_t below(Stream stream, std::uint32_t layer,
                                    std::uint32_t index,
                                    std::uint32_t n) const noexcept;

  std::uint64_t realization() const noexcept {
    return (static_cast<std::uint64_t>(real_hi_ >> 8) << 32) | real_lo_;
  }

 private:
  Philox4x32 gen_;
  std::uint32_t real_lo_;
  std::uint32_t real_hi_;
};

/// Exact Bernoulli(p) draws addressed by (stream, layer, index).
///
/// When p = m / 2^b for some b <= 8, each draw consumes only b bits of the
/// stream (p = 1/2 costs one bit); otherwise each draw consumes a full 32-bit
/// word compared against round(p * 2^32). p = 0 and p = 1 consume nothing.
class BernoulliSource {
 public:
  explicit BernoulliSource(double p);

  double p() const noexcept { return p_; }
  unsigned bits_per_draw() const noexcept { return bits_; }

  bool draw(const RealizationRng& rng, Stream stream, std::uint32_t layer,
            std::uint32_t index) const noexcept;

  /// Calls f(index, success) for draws 0..count-1, in order.
  template <typename F>
  void for_each(const RealizationRng& rng, Stream stream, std::uint32_t layer,
                std::uint32_t count, F&& f) const {
    if (bits_ == 0) {
      for (std::uint32_t i = 0; i < count; ++i) f(i, constant_);
      return;
    }
    std::uint32_t index = 0;
    if (bits_ == 32) {
      for (std::uint32_t blk = 0; index < count; ++blk) {
        const auto words = rng.block(stream, layer, blk);
        for (unsigned lane = 0; lane < 4 && index < count; ++lane, ++index) {
          f(index, words[lane] < threshold_);
        }
      }
      return;
    }
    const std::uint32_t mask = (1u << bits_) - 1;
    for (std::uint32_t blk = 0; index < count; ++blk) {
      const auto words = rng.block(stream, layer, blk);
      for (unsigned lane = 0; lane < 4 && index < count; ++lane) {
        std::uint32_t w = words[lane];
        for (unsigned c = 0; c < per_word_ && index < count; ++c, ++index) {
          f(index, (w & mask) < threshold_);
          w >>= bits_;
        }
      }
    }
  }

 private:
  double p_;
  unsigned bits_ = 32;
  unsigned per_word_ = 1;
  bool constant_ = false;
  std::uint64_t threshold_ = 0;
};

/// Fixed-point acceptance threshold: a word w is a success iff w < threshold.
/// p = 1 maps to 2^32 so every word succeeds.
constexpr std::uint64_t bernoulli_threshold(double p) noexcept {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(p * 4294967296.0 + 0.5);
}

}  // namespace mocperc
