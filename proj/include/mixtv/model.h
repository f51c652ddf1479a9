#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mixtv {

/// A point of [q]^n. Values are encoded 0..q-1.
using Configuration = std::vector<int>;

/// Unvalidated mixture description as read from an instance file:
/// weights[s] and components[s][i][c] = Pr[X_i = c | component s].
struct RawMixture {
  std::vector<double> weights;
  std::vector<std::vector<std::vector<double>>> components;
};

/// Mixture of k product distributions over [q]^n.
///
/// Immutable after construction through validate_mixture(). Weights and
/// marginal rows are stored renormalized. Components whose weight is exactly
/// zero are kept but report active() == false.
class Mixture {
 public:
  int q() const { return q_; }
  int n() const { return n_; }
  int k() const { return static_cast<int>(weights_.size()); }

  std::span<const double> weights() const { return weights_; }
  double weight(int s) const { return weights_[static_cast<std::size_t>(s)]; }
  bool active(int s) const { return weight(s) > 0.0; }

  /// Pr[X_i = c] under component s.
  double marginal(int s, int i, int c) const {
    return marginals_[(static_cast<std::size_t>(s) * static_cast<std::size_t>(n_) +
                       static_cast<std::size_t>(i)) *
                          static_cast<std::size_t>(q_) +
                      static_cast<std::size_t>(c)];
  }

  /// The q probabilities of coordinate i under component s.
  std::span<const double> row(int s, int i) const {
    return std::span<const double>(marginals_).subspan(
        (static_cast<std::size_t>(s) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)) *
            static_cast<std::size_t>(q_),
        static_cast<std::size_t>(q_));
  }

  RawMixture to_raw() const;

  friend bool operator==(const Mixture&, const Mixture&) = default;

 private:
  friend Mixture validate_mixture(int q, int n, const RawMixture& raw);

  int q_ = 0;
  int n_ = 0;
  std::vector<double> weights_;
  std::vector<double> marginals_;  // k * n * q, row-major
};

inline constexpr double kEntryTolerance = 1e-12;
inline constexpr double kNormalizationTolerance = 1e-9;

/// Checks shapes and probability constraints, then renormalizes weights and
/// every marginal row by dividing by its sum.
///
/// Throws Error with kShapeMismatch, kNotAProbability or kNormalizationError.
Mixture validate_mixture(int q, int n, const RawMixture& raw);

/// P(omega) = sum_s w_s prod_i P_i^(s)(omega_i).
double mass(const Mixture& m, std::span<const int> omega);

/// sum_s weights[s] prod_{i=j..n-1} P_i^(s)(suffix[i-j]) with 0-based j in
/// [0, n]. j == n with an empty suffix gives 1. mass(m, w) is exactly
/// suffix_mass(m, 0, m.weights(), w).
double suffix_mass(const Mixture& m, int j, std::span<const double> weights,
                   std::span<const int> suffix);

/// Throws kShapeMismatch unless omega has length m.n() and values in [0, q).
void check_configuration(const Mixture& m, std::span<const int> omega);

/// Throws kShapeMismatch unless p and q live on the same [q]^n.
void check_compatible(const Mixture& p, const Mixture& q);

}  // namespace mixtv
