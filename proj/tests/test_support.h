#pragma once

// Shared fixtures for the unit tests and the acceptance binary, plus an
// exact reference for the joint law of the recursive coupling that works
// straight from the mixture marginals without the state graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mixtv/model.h"

namespace mixtv::testing {

using Rows = std::vector<std::vector<double>>;

inline Mixture make_mixture(int q, std::vector<double> weights, std::vector<Rows> components) {
  const int n = components.empty() ? 0 : static_cast<int>(components.front().size());
  return validate_mixture(q, n, RawMixture{std::move(weights), std::move(components)});
}

inline Mixture make_product(int q, Rows rows) { return make_mixture(q, {1.0}, {std::move(rows)}); }

/// Subcube mixture from patterns over {'0', '1', '*'}.
inline Mixture make_cubes(std::vector<double> weights, const std::vector<std::string>& patterns) {
  std::vector<Rows> components;
  for (const auto& pattern : patterns) {
    Rows rows;
    for (char ch : pattern) {
      if (ch == '0') rows.push_back({1.0, 0.0});
      else if (ch == '1') rows.push_back({0.0, 1.0});
      else rows.push_back({0.5, 0.5});
    }
    components.push_back(std::move(rows));
  }
  return make_mixture(2, std::move(weights), std::move(components));
}

inline Mixture uniform_cube(int n) { return make_cubes({1.0}, {std::string(static_cast<std::size_t>(n), '*')}); }
inline Mixture point_mass(const std::string& bits) { return make_cubes({1.0}, {bits}); }

/// Index of a configuration in lexicographic order, last coordinate fastest.
inline std::size_t config_index(int q, const std::vector<int>& omega) {
  std::size_t idx = 0;
  for (int v : omega) idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(v);
  return idx;
}

/// Exact distributions induced by the recursive coupling, indexed by
/// config_index().
struct CouplingLaw {
  std::vector<double> x;          // law of X
  std::vector<double> y;          // law of Y
  std::vector<double> x_failed;   // Pr[X = sigma, X != Y]
  double failure = 0.0;
};

namespace detail {

inline double mixture_suffix(const Mixture& m, int j, const std::vector<double>& w, std::size_t suffix, int len) {
  // suffix encodes coordinates j..n-1 in lexicographic order.
  std::vector<int> values(static_cast<std::size_t>(len));
  for (int i = len - 1; i >= 0; --i) {
    values[static_cast<std::size_t>(i)] = static_cast<int>(suffix % static_cast<std::size_t>(m.q()));
    suffix /= static_cast<std::size_t>(m.q());
  }
  double total = 0.0;
  for (int s = 0; s < m.k(); ++s) {
    double prod = w[static_cast<std::size_t>(s)];
    for (int i = 0; i < len; ++i) prod *= m.marginal(s, j + i, values[static_cast<std::size_t>(i)]);
    total += prod;
  }
  return total;
}

inline std::size_t ipow(int q, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(q);
  return r;
}

struct LawBuilder {
  const Mixture& p;
  const Mixture& qd;
  CouplingLaw law;

  double mixed(const Mixture& m, const std::vector<double>& w, int j, int c) const {
    double total = 0.0;
    for (int s = 0; s < m.k(); ++s) total += w[static_cast<std::size_t>(s)] * m.marginal(s, j, c);
    return total;
  }

  double lower(const std::vector<double>& a, const std::vector<double>& b, int j, int c) const {
    double l = 1.0;
    for (int s = 0; s < p.k(); ++s) {
      if (a[static_cast<std::size_t>(s)] > 0.0) l = std::min(l, p.marginal(s, j, c));
    }
    for (int t = 0; t < qd.k(); ++t) {
      if (b[static_cast<std::size_t>(t)] > 0.0) l = std::min(l, qd.marginal(t, j, c));
    }
    return l;
  }

  // alpha^(s) (P^(s)_j(c) - l) / (Pbar_j(c) - l)
  std::vector<double> updated(const Mixture& m, const std::vector<double>& w, int j, int c, double l) const {
    const double denom = mixed(m, w, j, c) - l;
    std::vector<double> out(w.size(), 0.0);
    if (!(denom > 0.0)) return out;
    for (std::size_t s = 0; s < w.size(); ++s) {
      out[s] = w[s] > 0.0 ? std::max(0.0, w[s] * (m.marginal(static_cast<int>(s), j, c) - l) / denom) : 0.0;
    }
    return out;
  }

  void explore(int j, const std::vector<double>& a, const std::vector<double>& b, std::size_t prefix, double prob) {
    const int n = p.n();
    const int q = p.q();
    if (prob <= 0.0) return;
    if (j == n) {
      law.x[prefix] += prob;
      law.y[prefix] += prob;
      return;
    }
    std::vector<double> rp(static_cast<std::size_t>(q)), rq(static_cast<std::size_t>(q));
    double residual = 0.0;
    for (int c = 0; c < q; ++c) {
      const double pc = mixed(p, a, j, c);
      const double qc = mixed(qd, b, j, c);
      const double l = lower(a, b, j, c);
      const double both = std::min(pc, qc);
      explore(j + 1, a, b, prefix * static_cast<std::size_t>(q) + static_cast<std::size_t>(c), prob * l);
      if (both - l > 0.0) {
        explore(j + 1, updated(p, a, j, c, l), updated(qd, b, j, c, l),
                prefix * static_cast<std::size_t>(q) + static_cast<std::size_t>(c), prob * (both - l));
      }
      rp[static_cast<std::size_t>(c)] = std::max(0.0, pc - qc);
      rq[static_cast<std::size_t>(c)] = std::max(0.0, qc - pc);
      residual += rp[static_cast<std::size_t>(c)];
    }
    if (!(residual > 0.0)) return;
    const int len = n - j - 1;
    const std::size_t tail = ipow(q, len);
    for (int c = 0; c < q; ++c) {
      if (!(rp[static_cast<std::size_t>(c)] > 0.0)) continue;
      const double lc = lower(a, b, j, c);
      const std::vector<double> ax = updated(p, a, j, c, lc);
      for (int d = 0; d < q; ++d) {
        if (!(rq[static_cast<std::size_t>(d)] > 0.0)) continue;
        const double w = prob * rp[static_cast<std::size_t>(c)] * rq[static_cast<std::size_t>(d)] / residual;
        const double ld = lower(a, b, j, d);
        const std::vector<double> by = updated(qd, b, j, d, ld);
        law.failure += w;
        for (std::size_t u = 0; u < tail; ++u) {
          const std::size_t xi = (prefix * static_cast<std::size_t>(q) + static_cast<std::size_t>(c)) * tail + u;
          const std::size_t yi = (prefix * static_cast<std::size_t>(q) + static_cast<std::size_t>(d)) * tail + u;
          const double xm = w * mixture_suffix(p, j + 1, ax, u, len);
          law.x[xi] += xm;
          law.x_failed[xi] += xm;
          law.y[yi] += w * mixture_suffix(qd, j + 1, by, u, len);
        }
      }
    }
  }
};

}  // namespace detail

/// Exhaustive expansion of the coupling; meant for q^n in the hundreds.
inline CouplingLaw coupling_law(const Mixture& p, const Mixture& q) {
  detail::LawBuilder builder{p, q, {}};
  const std::size_t size = detail::ipow(p.q(), p.n());
  builder.law.x.assign(size, 0.0);
  builder.law.y.assign(size, 0.0);
  builder.law.x_failed.assign(size, 0.0);
  const auto w = p.weights();
  const auto v = q.weights();
  builder.explore(0, std::vector<double>(w.begin(), w.end()), std::vector<double>(v.begin(), v.end()), 0, 1.0);
  return builder.law;
}

}  // namespace mixtv::testing
