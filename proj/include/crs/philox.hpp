#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
// (key, counter) pair maps to four independent 32-bit words, so parallel
// workers can draw disjoint streams by counter without any shared state.

#include <array>
#include <cstdint>
#include <limits>

namespace crs {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  static constexpr Key key_from_seed(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

  /// Uniform in (0, 1) with 52 random bits, built from two 32-bit words.
  static constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 20) ^ (lo >> 12);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Sequential adaptor satisfying UniformRandomBitGenerator; stream `stream`
/// of seed `seed` walks counters (index, stream) for index = 0, 1, ...
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  explicit PhiloxEngine(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_(Philox4x32::key_from_seed(seed)), stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  /// Uniform double in (0, 1).
  double uniform() noexcept {
    const auto hi = (*this)();
    const auto lo = (*this)();
    return Philox4x32::to_unit(hi, lo);
  }

 private:
  void refill() noexcept {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                             key_);
    ++index_;
    pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
};

}  // namespace crs
