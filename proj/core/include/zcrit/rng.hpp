// Deterministic seeded random numbers for reproducible test data. splitmix64
// core with explicit mappings to doubles, so identical seeds give identical
// streams on every platform regardless of standard-library distributions.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace zcrit {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; two fresh uniforms per draw, no cache.
  double gaussian() {
    double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::uint64_t state_;
};

}  // namespace zcrit
