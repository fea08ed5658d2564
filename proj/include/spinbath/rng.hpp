#pragma once

#include <cstdint>

namespace spinbath {

/// Counter-based random stream (Philox2x64, 10 rounds).
///
/// A stream is a pure function of (master seed, stream index, draw index),
/// so any number of streams can be consumed concurrently or out of order
/// and still reproduce bit-identical values. Ensemble members, sampling
/// stages, and sub-seed derivations each get their own stream index.
class RandomStream {
public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : key_(master_seed), stream_(stream_index) {}

  std::uint64_t next_u64() {
    if (avail_ == 0) refill();
    return buf_[2 - avail_--];
  }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

private:
  static constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
  static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

  void refill() {
    std::uint64_t x0 = block_;
    std::uint64_t x1 = stream_;
    std::uint64_t k = key_;
    for (int round = 0; round < 10; ++round) {
      const auto prod = static_cast<unsigned __int128>(kMul) * x0;
      const auto hi = static_cast<std::uint64_t>(prod >> 64);
      const auto lo = static_cast<std::uint64_t>(prod);
      x0 = hi ^ k ^ x1;
      x1 = lo;
      k += kWeyl;
    }
    buf_[0] = x0;
    buf_[1] = x1;
    avail_ = 2;
    ++block_;
  }

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int avail_ = 0;
};

}  // namespace spinbath
