#include "mixtv/estimator.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "mixtv/error.h"

namespace mixtv {

double theoretical_gamma(int n, int q, int k1, int k2) {
  return std::pow(4.0 * n * q, -(k1 + k2 - 1));
}

std::uint64_t sample_count(double gamma, double epsilon) {
  if (!(gamma > 0.0) || gamma > 1.0) throw Error(ErrorKind::kInvalidArgument, "gamma must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidArgument, "epsilon must be positive");
  const double m = 100.0 / (gamma * epsilon * epsilon);
  // Shave a few ulps so 100 / 0.1^2 lands on 10000 rather than 10001.
  const double rounded = std::ceil(m * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()));
  if (!(rounded < 0x1.0p63)) {
    throw Error(ErrorKind::kTooLarge, "theoretical sample count exceeds 2^63; use a samples override");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(rounded));
}

double f_value(const Mixture& p, const Mixture& q, const CouplingDag& dag, std::span<const int> omega) {
  const double num = std::max(0.0, mass(p, omega) - mass(q, omega));
  const double den = evaluate_failure_mass(dag, omega);
  if (!(den > 0.0)) {
    throw Error(ErrorKind::kZeroDenominator, "configuration has zero failure mass under the coupling");
  }
  const double ratio = num / den;
  if (ratio > 1.0 + kFactTolerance) {
    throw Error(ErrorKind::kFactViolation,
                "f = " + std::to_string(ratio) + " exceeds 1: pointwise failure mass below max{0, P - Q}");
  }
  return std::min(ratio, 1.0);
}

namespace {

void check_config(const EstimatorConfig& config) {
  if (!(config.epsilon > 0.0)) throw Error(ErrorKind::kInvalidArgument, "epsilon must be positive");
  if (config.gamma_override && (!(*config.gamma_override > 0.0) || *config.gamma_override > 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "gamma override must lie in (0, 1]");
  }
  if (config.samples_override && *config.samples_override == 0) {
    throw Error(ErrorKind::kInvalidArgument, "samples override must be positive");
  }
  if (config.workers < 1) throw Error(ErrorKind::kInvalidArgument, "workers must be at least 1");
  if (config.repetitions < 1) throw Error(ErrorKind::kInvalidArgument, "repetitions must be at least 1");
}

// Sum of f over `count` draws from pi on one independent stream.
double sum_f(const CouplingDag& dag, std::uint64_t count, Rng rng) {
  double total = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Configuration omega = sample_failed_trajectory(dag, rng);
    total += f_value(dag.p(), dag.q(), dag, omega);
  }
  return total;
}

double run_fbar(const CouplingDag& dag, std::uint64_t samples, std::uint64_t seed, int repetition, int workers) {
  const auto w = static_cast<std::uint64_t>(workers);
  std::vector<double> partial(w, 0.0);
  auto stream_index = [&](std::uint64_t worker) {
    return (static_cast<std::uint64_t>(repetition) << 32) | worker;
  };
  auto slice = [&](std::uint64_t worker) { return samples / w + (worker < samples % w ? 1 : 0); };

  if (w == 1) {
    partial[0] = sum_f(dag, samples, make_stream(seed, stream_index(0)));
  } else {
    std::vector<std::exception_ptr> errors(w);
    {
      std::vector<std::jthread> threads;
      threads.reserve(w);
      for (std::uint64_t k = 0; k < w; ++k) {
        threads.emplace_back([&, k] {
          try {
            partial[k] = sum_f(dag, slice(k), make_stream(seed, stream_index(k)));
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  double total = 0.0;
  for (double x : partial) total += x;  // ascending worker index
  return total / static_cast<double>(samples);
}

}  // namespace

TvEstimate approximate_tv(const CouplingDag& dag, const EstimatorConfig& config) {
  check_config(config);
  const auto start = std::chrono::steady_clock::now();
  TvEstimate out;
  out.seed = config.seed;
  out.repetitions = config.repetitions;
  out.discrepancy = failure_probability(dag);
  out.gamma = config.gamma_override.value_or(theoretical_gamma(dag.p().n(), dag.p().q(), dag.p().k(), dag.q().k()));

  if (!(out.discrepancy > 0.0)) {
    // The coupling never fails, so the distributions coincide.
    out.samples = 0;
    out.estimate = 0.0;
    out.elapsed = std::chrono::steady_clock::now() - start;
    return out;
  }

  out.samples = config.samples_override.value_or(0);
  if (out.samples == 0) out.samples = sample_count(out.gamma, config.epsilon);

  std::vector<double> fbars;
  fbars.reserve(static_cast<std::size_t>(config.repetitions));
  for (int r = 0; r < config.repetitions; ++r) {
    fbars.push_back(run_fbar(dag, out.samples, config.seed, r, config.workers));
  }
  std::sort(fbars.begin(), fbars.end());
  out.fbar = fbars[(fbars.size() - 1) / 2];
  out.estimate = out.fbar * out.discrepancy;
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

TvEstimate approximate_tv(const Mixture& p, const Mixture& q, const EstimatorConfig& config) {
  check_config(config);
  const auto start = std::chrono::steady_clock::now();
  const CouplingDag dag = build_dag(p, q, config.max_states);
  TvEstimate out = approximate_tv(dag, config);
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

}  // namespace mixtv
