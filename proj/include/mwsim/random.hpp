#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mwsim::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline Counter philox4x32(Counter ctr, Key key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

/// Random stream of one Monte Carlo sample. The draw sequence depends only on
/// (seed, stream id, draw index), never on scheduling.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        id_(stream_id) {}

  /// Uniform double in the open interval (0, 1), 53 random bits.
  double uniform() {
    next_block_if_needed(2);
    const std::uint64_t hi = block_[used_++] >> 5;  // 27 bits
    const std::uint64_t lo = block_[used_++] >> 6;  // 26 bits
    const std::uint64_t bits = (hi << 26) | lo;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call, no caching so the
  /// draw index stays a pure function of the call count).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  void next_block_if_needed(int n) {
    if (used_ + n <= 4) return;
    block_ = philox4x32({static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32),
                         static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32)},
                        key_);
    ++draw_;
    used_ = 0;
  }

  Key key_;
  std::uint64_t id_;
  std::uint64_t draw_ = 0;
  Counter block_{};
  int used_ = 4;
};

/// Derives an independent seed for sub-task `index` (e.g. a scan point).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  const Counter c = philox4x32({static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32), 0x5eed5eedu, 0u},
                               {static_cast<std::uint32_t>(master),
                                static_cast<std::uint32_t>(master >> 32)});
  return (std::uint64_t{c[0]} << 32) | c[1];
}

}  // namespace mwsim::rng
