#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mixtv {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index), e.g. one per estimator worker.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Index drawn proportionally to nonnegative weights. Falls back to the last
/// positive entry when rounding pushes the target past the running sum.
inline std::size_t sample_index(Rng& rng, std::span<const double> weights, double total) {
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace mixtv
