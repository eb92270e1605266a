#pragma once

#include <cstdint>

namespace brainclust {

/// xorshift64* with a splitmix64-scrambled seed. The recurrence is
///
///   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;  out = x * 0x2545F4914F6CDD1D
///
/// and the initial state is splitmix64(seed), which is never zero. Defined
/// here bit-for-bit so other implementations can reproduce every random
/// volume this library emits.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform on the 2^23 cell midpoints ((x >> 41) + 0.5) * 2^-23, which are
  /// exact in float and never 0, so a filled voxel can't read as background.
  float uniform_float() noexcept;

  /// Uniform in [0, 1) with 53 bits.
  double uniform_double() noexcept;

  /// Standard normal via Box-Muller; consumes two draws per call.
  double normal() noexcept;

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace brainclust
