#pragma once

#include <cstdint>

#include "latqmc/normal.hpp"

namespace latqmc {

// Counter-based deterministic generator. Every draw is a pure function of
// (seed, stream, counter), so parallel consumers can pull from disjoint
// streams without shared state and results do not depend on thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull)) {}

  std::uint64_t raw(std::uint64_t counter) const {
    return mix(base_ + counter * 0x9E3779B97F4A7C15ull);
  }

  // uniform on [0,1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(raw(counter) >> 11) * 0x1.0p-53;
  }

  // uniform on (0,1), safe to feed through the inverse normal CDF
  double uniform_open(std::uint64_t counter) const {
    return (static_cast<double>(raw(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian(std::uint64_t counter) const {
    return inverse_normal_cdf(uniform_open(counter));
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    x += 0x9E3779B97F4A7C15ull;
    x ^= x >> 29;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 32;
    return x;
  }

  std::uint64_t base_;
};

}  // namespace latqmc
