#pragma once

#include <cstdint>
#include <limits>

#include "kicked/model.hpp"

namespace kicked {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream generator built on SplitMix64.
///
/// A stream is identified by (seed, stream_id); its key is
/// mix64(mix64(seed) ^ (stream_id * golden)). Draw i of the stream is
/// mix64(key + (i + 1) * golden), so trajectory i of an ensemble always sees
/// the same numbers no matter which thread runs it or in what order.
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

  StreamRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key_(mix64(mix64(seed) ^ (stream_id * golden + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    counter_ += 1;
    return mix64(key_ + counter_ * golden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01();
  }

  /// Uniform angle on [-pi, pi).
  double angle() noexcept { return -pi + two_pi * uniform01(); }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kicked
