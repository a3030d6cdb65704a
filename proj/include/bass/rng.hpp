#pragma once

#include <cstdint>

namespace bass {

// SplitMix64. Used instead of <random> engines + distributions so that every
// seeded stream is identical across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  bool bit() { return (next() >> 63) != 0; }

  // Uniform on [-1, 1), exactly representable as float.
  float symmetric_unit() {
    auto u = static_cast<float>(next() >> 40) * 0x1.0p-24f;
    return 2.0f * u - 1.0f;
  }

  // Uniform on [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace bass
