#include "mixtv/coupling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixtv/error.h"

namespace mixtv {

std::string_view transition_kind_name(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::kTypeI: return "TypeI";
    case TransitionKind::kTypeII: return "TypeII";
    case TransitionKind::kTypeIII: return "TypeIII";
  }
  return "Unknown";
}

namespace {

void check_step_args(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                     std::span<const double> beta) {
  check_compatible(p, q);
  if (j < 0 || j >= p.n()) throw Error(ErrorKind::kShapeMismatch, "coordinate outside [0, n)");
  if (alpha.size() != static_cast<std::size_t>(p.k()) || beta.size() != static_cast<std::size_t>(q.k())) {
    throw Error(ErrorKind::kShapeMismatch, "weight vector has wrong number of components");
  }
}

void check_value(const Mixture& m, int c) {
  if (c < 0 || c >= m.q()) throw Error(ErrorKind::kShapeMismatch, "value outside [0, q)");
}

bool any_active(std::span<const double> w) {
  return std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
}

// Minimum over active components of both sides, assuming both sides have one.
double lower_bound_unchecked(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                             std::span<const double> beta, int c) {
  double ell = std::numeric_limits<double>::infinity();
  for (int s = 0; s < p.k(); ++s) {
    if (alpha[static_cast<std::size_t>(s)] > 0.0) ell = std::min(ell, p.marginal(s, j, c));
  }
  for (int t = 0; t < q.k(); ++t) {
    if (beta[static_cast<std::size_t>(t)] > 0.0) ell = std::min(ell, q.marginal(t, j, c));
  }
  return ell;
}

// sum_s w_s (M_j^(s)(c) - ell) over active s: the mass of value c left after
// the shared part, i.e. M_bar_j(c) - ell. Every term is >= 0 exactly because
// ell is a stored marginal no larger than any active one.
double excess(const Mixture& m, int j, std::span<const double> w, int c, double ell) {
  double total = 0.0;
  for (int s = 0; s < m.k(); ++s) {
    const double ws = w[static_cast<std::size_t>(s)];
    if (ws > 0.0) total += ws * (m.marginal(s, j, c) - ell);
  }
  return total;
}

std::vector<double> reweight_unchecked(const Mixture& m, int j, std::span<const double> w, int c, double ell) {
  std::vector<double> out(w.begin(), w.end());
  const double denom = excess(m, j, w, c, ell);
  if (!(denom > 0.0)) return out;
  for (int s = 0; s < m.k(); ++s) {
    const double ws = w[static_cast<std::size_t>(s)];
    out[static_cast<std::size_t>(s)] = ws > 0.0 ? ws * (m.marginal(s, j, c) - ell) / denom : 0.0;
  }
  return out;
}

}  // namespace

double lower_bound(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                   std::span<const double> beta, int c) {
  check_step_args(p, q, j, alpha, beta);
  check_value(p, c);
  if (!any_active(alpha) || !any_active(beta)) {
    throw Error(ErrorKind::kNoActiveComponent, "lower bound needs an active component on each side");
  }
  return lower_bound_unchecked(p, q, j, alpha, beta, c);
}

std::vector<double> reweight(const Mixture& m, int j, std::span<const double> weights, int c, double ell) {
  if (j < 0 || j >= m.n()) throw Error(ErrorKind::kShapeMismatch, "coordinate outside [0, n)");
  if (weights.size() != static_cast<std::size_t>(m.k())) {
    throw Error(ErrorKind::kShapeMismatch, "weight vector has wrong number of components");
  }
  check_value(m, c);
  return reweight_unchecked(m, j, weights, c, ell);
}

WeightPair update_weights(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                          std::span<const double> beta, int c) {
  const double ell = lower_bound(p, q, j, alpha, beta, c);
  return WeightPair{reweight_unchecked(p, j, alpha, c, ell), reweight_unchecked(q, j, beta, c, ell)};
}

std::vector<StepBranch> coupling_step(const Mixture& p, const Mixture& q, int j, std::span<const double> alpha,
                                      std::span<const double> beta) {
  check_step_args(p, q, j, alpha, beta);
  if (!any_active(alpha) || !any_active(beta)) {
    throw Error(ErrorKind::kNoActiveComponent, "coupling step needs an active component on each side");
  }
  const int nq = p.q();
  const auto qs = static_cast<std::size_t>(nq);
  std::vector<double> ell(qs), extra_p(qs), extra_q(qs);
  for (int c = 0; c < nq; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    ell[ci] = lower_bound_unchecked(p, q, j, alpha, beta, c);
    extra_p[ci] = excess(p, j, alpha, c, ell[ci]);
    extra_q[ci] = excess(q, j, beta, c, ell[ci]);
  }

  std::vector<StepBranch> out;
  for (int c = 0; c < nq; ++c) {
    const double w = ell[static_cast<std::size_t>(c)];
    if (w > 0.0) out.push_back({TransitionKind::kTypeI, c, c, w});
  }
  for (int c = 0; c < nq; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    const double w = std::min(extra_p[ci], extra_q[ci]);
    if (w > 0.0) out.push_back({TransitionKind::kTypeII, c, c, w});
  }

  std::vector<double> rest_p(qs), rest_q(qs);
  double rest_total = 0.0;
  for (std::size_t c = 0; c < qs; ++c) {
    rest_p[c] = std::max(0.0, extra_p[c] - extra_q[c]);
    rest_q[c] = std::max(0.0, extra_q[c] - extra_p[c]);
    rest_total += rest_p[c];
  }
  if (rest_total > 0.0) {
    for (int c = 0; c < nq; ++c) {
      for (int d = 0; d < nq; ++d) {
        const double w = rest_p[static_cast<std::size_t>(c)] * rest_q[static_cast<std::size_t>(d)] / rest_total;
        if (w > 0.0) out.push_back({TransitionKind::kTypeIII, c, d, w});
      }
    }
  }
  return out;
}

std::span<const double> CouplingDag::alpha(int state) const {
  const auto k = static_cast<std::size_t>(p_.k());
  return std::span<const double>(alpha_).subspan(idx(state) * k, k);
}

std::span<const double> CouplingDag::beta(int state) const {
  const auto k = static_cast<std::size_t>(q_.k());
  return std::span<const double>(beta_).subspan(idx(state) * k, k);
}

int CouplingDag::active_count(int state) const {
  int count = 0;
  for (double a : alpha(state)) count += a > 0.0 ? 1 : 0;
  for (double b : beta(state)) count += b > 0.0 ? 1 : 0;
  return count;
}

std::vector<int> CouplingDag::path_key(int state) const {
  std::vector<int> key(static_cast<std::size_t>(layer(state)));
  for (int s = state; parent_[idx(s)] >= 0; s = parent_[idx(s)]) {
    key[static_cast<std::size_t>(layer(s) - 1)] = symbol_[idx(s)];
  }
  return key;
}

std::span<const Transition> CouplingDag::transitions(int state) const {
  const std::size_t begin = edge_begin_[idx(state)];
  const std::size_t end = idx(state) + 1 < edge_begin_.size() ? edge_begin_[idx(state) + 1] : edges_.size();
  return std::span<const Transition>(edges_).subspan(begin, end - begin);
}

int CouplingDag::add_state(int layer, int parent, int symbol, std::span<const double> alpha,
                           std::span<const double> beta) {
  const int id = static_cast<int>(layer_.size());
  layer_.push_back(layer);
  parent_.push_back(parent);
  symbol_.push_back(symbol);
  alpha_.insert(alpha_.end(), alpha.begin(), alpha.end());
  beta_.insert(beta_.end(), beta.begin(), beta.end());
  return id;
}

CouplingDag build_dag(const Mixture& p, const Mixture& q, std::size_t max_states) {
  check_compatible(p, q);
  CouplingDag dag;
  dag.p_ = p;
  dag.q_ = q;
  const int n = p.n();
  dag.add_state(0, -1, 0, p.weights(), q.weights());

  for (std::size_t s = 0; s < dag.size(); ++s) {
    const int state = static_cast<int>(s);
    dag.edge_begin_.push_back(dag.edges_.size());
    const int j = dag.layer(state);
    if (j == n) continue;

    // Copies: add_state() may reallocate the weight storage.
    const std::vector<double> alpha(dag.alpha(state).begin(), dag.alpha(state).end());
    const std::vector<double> beta(dag.beta(state).begin(), dag.beta(state).end());
    int keep_child = kFailureState;
    for (const StepBranch& b : coupling_step(p, q, j, alpha, beta)) {
      Transition t{kFailureState, b.kind, b.x_value, b.y_value, b.weight};
      switch (b.kind) {
        case TransitionKind::kTypeI:
          if (keep_child == kFailureState) keep_child = dag.add_state(j + 1, state, 0, alpha, beta);
          t.target = keep_child;
          break;
        case TransitionKind::kTypeII: {
          const WeightPair next = update_weights(p, q, j, alpha, beta, b.x_value);
          t.target = dag.add_state(j + 1, state, b.x_value + 1, next.alpha, next.beta);
          break;
        }
        case TransitionKind::kTypeIII:
          dag.failure_reachable_ = true;
          break;
      }
      dag.edges_.push_back(t);
    }
    if (dag.size() > max_states) {
      throw Error(ErrorKind::kTooLarge,
                  "coupling graph exceeds the state ceiling of " + std::to_string(max_states));
    }
  }

  dag.fail_.assign(dag.size(), 0.0);
  for (std::size_t s = dag.size(); s-- > 0;) {
    double total = 0.0;
    for (const Transition& t : dag.transitions(static_cast<int>(s))) {
      total += t.weight * dag.fail_probability(t.target);
    }
    dag.fail_[s] = total;
  }
  return dag;
}

double failure_probability(const CouplingDag& dag) { return dag.fail_probability(0); }

void sample_suffix(const Mixture& m, int j, std::span<const double> weights, Rng& rng, std::span<int> out) {
  if (j == m.n()) return;
  double total = 0.0;
  for (double w : weights) total += w;
  const int s = static_cast<int>(sample_index(rng, weights, total));
  for (int i = j; i < m.n(); ++i) {
    const auto row = m.row(s, i);
    double row_total = 0.0;
    for (double v : row) row_total += v;
    out[static_cast<std::size_t>(i - j)] = static_cast<int>(sample_index(rng, row, row_total));
  }
}

Configuration sample_failed_trajectory(const CouplingDag& dag, Rng& rng) {
  if (!(failure_probability(dag) > 0.0)) {
    throw Error(ErrorKind::kZeroDiscrepancy, "the coupling never fails; nothing to condition on");
  }
  const Mixture& p = dag.p();
  Configuration x(static_cast<std::size_t>(p.n()));
  int state = 0;
  while (true) {
    const int j = dag.layer(state);
    const auto edges = dag.transitions(state);
    // Pick t with probability w(t) pFail(target) / pFail(state).
    const double target = uniform01(rng) * dag.fail_probability(state);
    double acc = 0.0;
    const Transition* chosen = nullptr;
    for (const Transition& t : edges) {
      const double w = t.weight * dag.fail_probability(t.target);
      if (w <= 0.0) continue;
      acc += w;
      chosen = &t;
      if (target < acc) break;
    }
    if (chosen == nullptr) throw Error(ErrorKind::kZeroDiscrepancy, "walk reached a state that cannot fail");
    x[static_cast<std::size_t>(j)] = chosen->x_value;
    if (chosen->target == kFailureState) {
      const double ell = lower_bound_unchecked(p, dag.q(), j, dag.alpha(state), dag.beta(state), chosen->x_value);
      const std::vector<double> suffix_weights = reweight_unchecked(p, j, dag.alpha(state), chosen->x_value, ell);
      sample_suffix(p, j + 1, suffix_weights, rng, std::span<int>(x).subspan(static_cast<std::size_t>(j + 1)));
      return x;
    }
    state = chosen->target;
  }
}

double evaluate_failure_mass(const CouplingDag& dag, std::span<const int> sigma) {
  const Mixture& p = dag.p();
  check_configuration(p, sigma);
  const int n = p.n();

  // The states reachable while X follows sigma form a subtree; list it
  // breadth-first, then run the backward recursion over it.
  struct Node {
    int state;
    int parent;  // local index, -1 for the root
    double weight_from_parent;
  };
  std::vector<Node> nodes{{0, -1, 1.0}};
  for (std::size_t l = 0; l < nodes.size(); ++l) {
    const int state = nodes[l].state;
    const int j = dag.layer(state);
    if (j == n) continue;
    for (const Transition& t : dag.transitions(state)) {
      if (t.kind != TransitionKind::kTypeIII && t.x_value == sigma[static_cast<std::size_t>(j)]) {
        nodes.push_back({t.target, static_cast<int>(l), t.weight});
      }
    }
  }

  std::vector<double> acc(nodes.size(), 0.0);
  double root_value = 0.0;
  for (std::size_t l = nodes.size(); l-- > 0;) {
    const int state = nodes[l].state;
    const int j = dag.layer(state);
    double value = acc[l];
    if (j < n) {
      const int c = sigma[static_cast<std::size_t>(j)];
      double fail_weight = 0.0;
      for (const Transition& t : dag.transitions(state)) {
        if (t.kind == TransitionKind::kTypeIII && t.x_value == c) fail_weight += t.weight;
      }
      if (fail_weight > 0.0) {
        // tau: probability of the remaining suffix under the post-failure weights.
        const double ell = lower_bound_unchecked(p, dag.q(), j, dag.alpha(state), dag.beta(state), c);
        const std::vector<double> w = reweight_unchecked(p, j, dag.alpha(state), c, ell);
        value += fail_weight * suffix_mass(p, j + 1, w, sigma.subspan(static_cast<std::size_t>(j + 1)));
      }
    }
    if (nodes[l].parent < 0) {
      root_value = value;
    } else {
      acc[static_cast<std::size_t>(nodes[l].parent)] += nodes[l].weight_from_parent * value;
    }
  }
  return root_value;
}

std::pair<Configuration, Configuration> simulate_coupling(const Mixture& p, const Mixture& q, Rng& rng) {
  check_compatible(p, q);
  const int n = p.n();
  Configuration x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  std::vector<double> alpha(p.weights().begin(), p.weights().end());
  std::vector<double> beta(q.weights().begin(), q.weights().end());
  std::vector<double> weights;
  for (int j = 0; j < n; ++j) {
    const std::vector<StepBranch> branches = coupling_step(p, q, j, alpha, beta);
    weights.clear();
    double total = 0.0;
    for (const StepBranch& b : branches) {
      weights.push_back(b.weight);
      total += b.weight;
    }
    const StepBranch& b = branches[sample_index(rng, weights, total)];
    const auto ji = static_cast<std::size_t>(j);
    x[ji] = b.x_value;
    y[ji] = b.y_value;
    switch (b.kind) {
      case TransitionKind::kTypeI:
        break;
      case TransitionKind::kTypeII: {
        WeightPair next = update_weights(p, q, j, alpha, beta, b.x_value);
        alpha = std::move(next.alpha);
        beta = std::move(next.beta);
        break;
      }
      case TransitionKind::kTypeIII: {
        const double ell_x = lower_bound_unchecked(p, q, j, alpha, beta, b.x_value);
        const double ell_y = lower_bound_unchecked(p, q, j, alpha, beta, b.y_value);
        const std::vector<double> wx = reweight_unchecked(p, j, alpha, b.x_value, ell_x);
        const std::vector<double> wy = reweight_unchecked(q, j, beta, b.y_value, ell_y);
        sample_suffix(p, j + 1, wx, rng, std::span<int>(x).subspan(ji + 1));
        sample_suffix(q, j + 1, wy, rng, std::span<int>(y).subspan(ji + 1));
        return {std::move(x), std::move(y)};
      }
    }
  }
  return {std::move(x), std::move(y)};
}

double state_bound(int n, int q, int k1, int k2) {
  return std::pow(static_cast<double>(n) * q + 1.0, k1 + k2 - 1) + 1.0;
}

std::vector<std::size_t> layer_histogram(const CouplingDag& dag) {
  std::vector<std::size_t> hist(static_cast<std::size_t>(dag.p().n()) + 1, 0);
  for (std::size_t s = 0; s < dag.size(); ++s) ++hist[static_cast<std::size_t>(dag.layer(static_cast<int>(s)))];
  return hist;
}

nlohmann::json dump_dag(const CouplingDag& dag) {
  using nlohmann::json;
  json states = json::array();
  for (std::size_t s = 0; s < dag.size(); ++s) {
    const int state = static_cast<int>(s);
    json edges = json::array();
    for (const Transition& t : dag.transitions(state)) {
      json e{{"kind", transition_kind_name(t.kind)}, {"x", t.x_value}, {"y", t.y_value}, {"weight", t.weight}};
      e["target"] = t.target == kFailureState ? json(nullptr) : json(t.target);
      edges.push_back(std::move(e));
    }
    const auto a = dag.alpha(state);
    const auto b = dag.beta(state);
    states.push_back(json{{"id", state},
                          {"layer", dag.layer(state)},
                          {"path_key", dag.path_key(state)},
                          {"alpha", std::vector<double>(a.begin(), a.end())},
                          {"beta", std::vector<double>(b.begin(), b.end())},
                          {"p_fail", dag.fail_probability(state)},
                          {"transitions", std::move(edges)}});
  }
  return json{{"n", dag.p().n()},
              {"q", dag.p().q()},
              {"k1", dag.p().k()},
              {"k2", dag.q().k()},
              {"failure_reachable", dag.failure_reachable()},
              {"states", std::move(states)}};
}

}  // namespace mixtv
