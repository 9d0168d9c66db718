// SPDX-License-Identifier: Apache-2.0
//
// Seeded random streams with a fixed algorithm: std::mt19937_64 for the raw
// bits, and hand-written uniform / normal transforms (the standard library
// distributions are implementation-defined, which would break reproducibility
// across toolchains).

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace flocktrack {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes two uniforms per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard normal resampled until |z| <= limit.
  double truncated_normal(double limit) {
    for (;;) {
      const double z = normal();
      if (std::abs(z) <= limit) return z;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Seed of the corruption stream, kept apart from the motion stream so that
// corrupting a clip never changes its ground truth.
inline constexpr std::uint64_t kCorruptionSeedSalt = 0x9E3779B97F4A7C15ULL;

}  // namespace flocktrack
