#include "mocperc/rng.hpp"

namespace mocperc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter ctr) const noexcept {
  Key key = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RealizationRng::RealizationRng(std::uint64_t master_seed,
                               std::uint64_t realization)
    : gen_({static_cast<std::uint32_t>(master_seed),
            static_cast<std::uint32_t>(master_seed >> 32)}),
      real_lo_(static_cast<std::uint32_t>(realization)),
      real_hi_(static_cast<std::uint32_t>(realization >> 32) << 8) {}

double RealizationRng::uniform(Stream stream, std::uint32_t layer,
                               std::uint32_t index) const noexcept {
  // Two words per draw: index 2i and 2i+1 of the stream.
  const auto b = block(stream, layer, index >> 1);
  const unsigned off = (index & 1u) * 2u;
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(b[off]) << 21) ^ (b[off + 1] >> 11);
  return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) *
         0x1.0p-53;
}

std::uint32_t RealizationRng::below(Stream stream, std::uint32_t layer,
                                    std::uint32_t index,
                                    std::uint32_t n) const noexcept {
  // Lemire's multiply-shift; bias is at most n / 2^32, irrelevant here.
  return static_cast<std::uint32_t>(
      (static_cast<std::uint64_t>(word(stream, layer, index)) * n) >> 32);
}

BernoulliSource::BernoulliSource(double p) : p_(p) {
  if (p <= 0.0 || p >= 1.0) {
    bits_ = 0;
    constant_ = p >= 1.0;
    return;
  }
  for (unsigned b = 1; b <= 8; ++b) {
    const double scaled = p * static_cast<double>(1u << b);
    if (scaled == static_cast<double>(static_cast<std::uint32_t>(scaled))) {
      bits_ = b;
      per_word_ = 32 / b;
      threshold_ = static_cast<std::uint64_t>(scaled);
      return;
    }
  }
  threshold_ = bernoulli_threshold(p);
}

bool BernoulliSource::draw(const RealizationRng& rng, Stream stream,
                           std::uint32_t layer,
                           std::uint32_t index) const noexcept {
  if (bits_ == 0) return constant_;
  if (bits_ == 32) return rng.word(stream, layer, index) < threshold_;
  const std::uint32_t w = rng.word(stream, layer, index / per_word_);
  const unsigned shift = (index % per_word_) * bits_;
  return ((w >> shift) & ((1u << bits_) - 1)) < threshold_;
}

}  // namespace mocperc
