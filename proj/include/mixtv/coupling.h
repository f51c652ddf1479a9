#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mixtv/model.h"
#include "mixtv/random.h"

// Recursive coupling of two mixtures of product distributions.
//
// The coupling walks coordinates left to right keeping a pair of current
// mixing weights (alpha, beta). At coordinate j it extracts, for every value
// c, the mass l(c) shared by all active components (Type-I: X_j = Y_j = c,
// weights kept), then the remaining common mass min(P_j(c), Q_j(c)) - l(c)
// (Type-II: X_j = Y_j = c, weights reweighted so that at least one active
// component drops out), and couples the leftover mass with X_j != Y_j
// (Type-III: failure). Because every Type-II step deactivates a component,
// the set of reachable weight pairs is polynomial in n*q and is materialized
// as a layered graph on which failure probabilities, conditional sampling and
// pointwise evaluation are dynamic programs.
//
// Coordinates and values are 0-based throughout.

namespace mixtv {

enum class TransitionKind : std::uint8_t { kTypeI, kTypeII, kTypeIII };

std::string_view transition_kind_name(TransitionKind kind);

inline constexpr std::int32_t kFailureState = -1;

struct Transition {
  std::int32_t target = kFailureState;
  TransitionKind kind = TransitionKind::kTypeI;
  std::int32_t x_value = 0;  // X_j
  std::int32_t y_value = 0;  // Y_j, differs from x_value only for Type-III
  double weight = 0.0;
};

/// Minimum of P_j^(s)(c) over active s and Q_j^(t)(c) over active t. The
/// result is one of the stored marginals, never a recomputed value.
/// Throws kNoActiveComponent if either side has no positive weight.
double lower_bound(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                   std::span<const double> beta, int c);

/// One-sided reweighting w_s (M_j^(s)(c) - ell) / sum_u w_u (M_j^(u)(c) - ell).
/// When the denominator vanishes the weights are returned unchanged.
std::vector<double> reweight(const Mixture& m, int j, std::span<const double> weights, int c, double ell);

struct WeightPair {
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Weights after a Type-II step on value c at coordinate j.
WeightPair update_weights(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                          std::span<const double> beta, int c);

/// A positive-probability outcome of one coupling step.
struct StepBranch {
  TransitionKind kind;
  int x_value;
  int y_value;
  double weight;
};

/// All positive-weight outcomes of the coupling step at coordinate j, in the
/// order Type-I by c, Type-II by c, then Type-III by (c, c'). Leftover mass is
/// coupled proportionally: w(c, c') = r_P(c) r_Q(c') / R.
std::vector<StepBranch> coupling_step(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                                      std::span<const double> beta);

/// Explicit state graph of the recursive coupling.
///
/// State 0 is the root (layer 0, original weights). States are stored in
/// breadth-first order, so every transition target has a larger index and
/// layers are contiguous. The failure state is not stored; transitions into
/// it have target kFailureState. States are identified by their path key:
/// symbol 0 for a Type-I step, c + 1 for a Type-II step on value c. Each key
/// has a unique parent, so no floating-point comparison is ever needed.
class CouplingDag {
 public:
  static constexpr std::size_t kDefaultMaxStates = 4'000'000;

  const Mixture& p() const { return p_; }
  const Mixture& q() const { return q_; }

  /// Number of non-failure states.
  std::size_t size() const { return layer_.size(); }
  bool failure_reachable() const { return failure_reachable_; }
  /// States including the failure state when it is reachable.
  std::size_t state_count() const { return size() + (failure_reachable_ ? 1 : 0); }
  std::size_t transition_count() const { return edges_.size(); }

  int layer(int state) const { return layer_[idx(state)]; }
  std::span<const double> alpha(int state) const;
  std::span<const double> beta(int state) const;
  /// |{s: alpha_s > 0}| + |{t: beta_t > 0}|.
  int active_count(int state) const;
  std::vector<int> path_key(int state) const;
  std::span<const Transition> transitions(int state) const;

  /// Probability that the walk from `state` ends in failure; 1 for
  /// kFailureState.
  double fail_probability(int state) const {
    return state == kFailureState ? 1.0 : fail_[idx(state)];
  }

 private:
  friend CouplingDag build_dag(const Mixture& p, const Mixture& q, std::size_t max_states);

  static std::size_t idx(int state) { return static_cast<std::size_t>(state); }
  int add_state(int layer, int parent, int symbol, std::span<const double> alpha, std::span<const double> beta);

  Mixture p_;
  Mixture q_;
  std::vector<std::int32_t> layer_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> symbol_;
  std::vector<double> alpha_;  // size() * k1
  std::vector<double> beta_;   // size() * k2
  std::vector<std::size_t> edge_begin_;
  std::vector<Transition> edges_;
  std::vector<double> fail_;
  bool failure_reachable_ = false;
};

/// Expands the coupling breadth-first from (0, alpha, beta) and fills the
/// failure probabilities by a backward pass. Throws kTooLarge once more than
/// max_states states have been created.
CouplingDag build_dag(const Mixture& p, const Mixture& q,
                      std::size_t max_states = CouplingDag::kDefaultMaxStates);

/// Pr[X != Y] under the coupling.
double failure_probability(const CouplingDag& dag);

/// Draws X from Pr[X = . | X != Y]. Throws kZeroDiscrepancy when the coupling
/// never fails.
Configuration sample_failed_trajectory(const CouplingDag& dag, Rng& rng);

/// Pr[X = sigma and X != Y].
double evaluate_failure_mass(const CouplingDag& dag, std::span<const int> sigma);

/// Ancestral sample of coordinates j..n-1 from sum_s weights[s] prod_i M_i^(s).
void sample_suffix(const Mixture& m, int j, std::span<const double> weights, Rng& rng, std::span<int> out);

/// One (X, Y) draw by running the recursive coupling directly.
std::pair<Configuration, Configuration> simulate_coupling(const Mixture& p, const Mixture& q, Rng& rng);

/// Upper bound (n q + 1)^(k1 + k2 - 1) + 1 on the number of states.
double state_bound(int n, int q, int k1, int k2);

std::vector<std::size_t> layer_histogram(const CouplingDag& dag);

/// Diagnostic serialization: every state with layer, path key, weights and
/// failure probability, and its outgoing transitions (target null = failure).
nlohmann::json dump_dag(const CouplingDag& dag);

}  // namespace mixtv
