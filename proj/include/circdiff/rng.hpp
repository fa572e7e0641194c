#pragma once

#include "circdiff/real.hpp"

#include <cstdint>

namespace circdiff {

// Deterministic generator for certificate sampling and property tests.
// splitmix64 under the hood so reports are byte-identical across platforms
// (std::uniform_real_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  Real uniform(const Real& lo, const Real& hi) {
    return lo + (hi - lo) * Real(next_double());
  }

  long uniform_long(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace circdiff
