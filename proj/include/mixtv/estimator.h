#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>

#include "mixtv/coupling.h"
#include "mixtv/model.h"

namespace mixtv {

struct EstimatorConfig {
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  /// Replaces the worst-case ratio (4nq)^-(k1+k2-1) in the sample count.
  std::optional<double> gamma_override;
  /// Replaces m = ceil(100 / (gamma epsilon^2)) outright.
  std::optional<std::uint64_t> samples_override;
  int workers = 1;
  /// Independent runs whose median is reported (1 = the plain 99% estimator).
  int repetitions = 1;
  std::size_t max_states = CouplingDag::kDefaultMaxStates;
};

struct TvEstimate {
  double estimate = 0.0;     // fbar * discrepancy
  double discrepancy = 0.0;  // Pr[X != Y] under the recursive coupling
  double fbar = 0.0;
  double gamma = 1.0;
  std::uint64_t samples = 0;  // per repetition
  std::uint64_t seed = 0;
  int repetitions = 1;
  std::chrono::duration<double> elapsed{0.0};
};

/// (4 n q)^-(k1 + k2 - 1).
double theoretical_gamma(int n, int q, int k1, int k2);

/// ceil(100 / (gamma epsilon^2)). Throws kTooLarge past 2^63.
std::uint64_t sample_count(double gamma, double epsilon);

inline constexpr double kFactTolerance = 1e-9;

/// max{0, P(omega) - Q(omega)} / Pr[X = omega and X != Y], clamped to [0, 1].
/// A ratio above 1 + 1e-9 would contradict the coupling inequality and throws
/// kFactViolation; a zero denominator throws kZeroDenominator.
double f_value(const Mixture& p, const Mixture& q, const CouplingDag& dag, std::span<const int> omega);

/// Relative-error estimate of the TV distance between p and q.
TvEstimate approximate_tv(const Mixture& p, const Mixture& q, const EstimatorConfig& config);

/// Same, reusing an already built coupling graph for p and q.
TvEstimate approximate_tv(const CouplingDag& dag, const EstimatorConfig& config);

}  // namespace mixtv
