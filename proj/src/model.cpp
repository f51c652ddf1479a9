#include "mixtv/model.h"

#include <cmath>
#include <sstream>
#include <string>

#include "mixtv/error.h"

namespace mixtv {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kNotAProbability: return "NotAProbability";
    case ErrorKind::kNormalizationError: return "NormalizationError";
    case ErrorKind::kNoActiveComponent: return "NoActiveComponent";
    case ErrorKind::kZeroDiscrepancy: return "ZeroDiscrepancy";
    case ErrorKind::kFactViolation: return "FactViolation";
    case ErrorKind::kZeroDenominator: return "ZeroDenominator";
    case ErrorKind::kNotASubcube: return "NotASubcube";
    case ErrorKind::kWrongAlphabet: return "WrongAlphabet";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kNotThreeCnf: return "NotThreeCnf";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

// Validates one probability vector in place: entries in [-tol, 1+tol] (tiny
// negatives clamp to zero), sum within the normalization tolerance of 1.
void normalize_row(std::vector<double>& row, const std::string& where) {
  double sum = 0.0;
  for (double& v : row) {
    if (!std::isfinite(v) || v < -kEntryTolerance || v > 1.0 + kEntryTolerance) {
      std::ostringstream os;
      os << where << ": entry " << v << " is not a probability";
      fail(ErrorKind::kNotAProbability, os.str());
    }
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << where << ": sums to " << sum << ", not 1";
    fail(ErrorKind::kNormalizationError, os.str());
  }
  for (double& v : row) v /= sum;
}

}  // namespace

Mixture validate_mixture(int q, int n, const RawMixture& raw) {
  if (q < 2) fail(ErrorKind::kShapeMismatch, "alphabet size q must be at least 2");
  if (n < 1) fail(ErrorKind::kShapeMismatch, "dimension n must be at least 1");
  const std::size_t k = raw.weights.size();
  if (k == 0) fail(ErrorKind::kShapeMismatch, "mixture has no components");
  if (raw.components.size() != k) {
    fail(ErrorKind::kShapeMismatch, "weights has " + std::to_string(k) + " entries but components has " +
                                        std::to_string(raw.components.size()));
  }

  Mixture m;
  m.q_ = q;
  m.n_ = n;
  m.weights_ = raw.weights;
  normalize_row(m.weights_, "weights");
  m.marginals_.reserve(k * static_cast<std::size_t>(n) * static_cast<std::size_t>(q));
  for (std::size_t s = 0; s < k; ++s) {
    const auto& comp = raw.components[s];
    if (comp.size() != static_cast<std::size_t>(n)) {
      fail(ErrorKind::kShapeMismatch, "component " + std::to_string(s) + " has " + std::to_string(comp.size()) +
                                          " coordinates, expected " + std::to_string(n));
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> row = comp[static_cast<std::size_t>(i)];
      if (row.size() != static_cast<std::size_t>(q)) {
        fail(ErrorKind::kShapeMismatch, "component " + std::to_string(s) + " coordinate " + std::to_string(i) +
                                            " has " + std::to_string(row.size()) + " values, expected " +
                                            std::to_string(q));
      }
      normalize_row(row, "component " + std::to_string(s) + " coordinate " + std::to_string(i));
      m.marginals_.insert(m.marginals_.end(), row.begin(), row.end());
    }
  }
  return m;
}

RawMixture Mixture::to_raw() const {
  RawMixture raw;
  raw.weights = weights_;
  raw.components.resize(weights_.size());
  for (int s = 0; s < k(); ++s) {
    auto& comp = raw.components[static_cast<std::size_t>(s)];
    comp.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      auto r = row(s, i);
      comp.emplace_back(r.begin(), r.end());
    }
  }
  return raw;
}

void check_configuration(const Mixture& m, std::span<const int> omega) {
  if (omega.size() != static_cast<std::size_t>(m.n())) {
    fail(ErrorKind::kShapeMismatch,
         "configuration has length " + std::to_string(omega.size()) + ", expected " + std::to_string(m.n()));
  }
  for (int v : omega) {
    if (v < 0 || v >= m.q()) {
      fail(ErrorKind::kShapeMismatch, "configuration value " + std::to_string(v) + " outside [0, q)");
    }
  }
}

void check_compatible(const Mixture& p, const Mixture& q) {
  if (p.n() != q.n() || p.q() != q.q()) {
    fail(ErrorKind::kShapeMismatch, "mixtures live on different spaces");
  }
}

double suffix_mass(const Mixture& m, int j, std::span<const double> weights, std::span<const int> suffix) {
  if (j < 0 || j > m.n()) fail(ErrorKind::kShapeMismatch, "suffix start outside [0, n]");
  if (weights.size() != static_cast<std::size_t>(m.k())) {
    fail(ErrorKind::kShapeMismatch, "reweighting has wrong number of components");
  }
  if (suffix.size() != static_cast<std::size_t>(m.n() - j)) {
    fail(ErrorKind::kShapeMismatch, "suffix has wrong length");
  }
  for (int v : suffix) {
    if (v < 0 || v >= m.q()) fail(ErrorKind::kShapeMismatch, "suffix value outside [0, q)");
  }
  if (suffix.empty()) return 1.0;

  // Components ascending, coordinates left to right.
  double total = 0.0;
  for (int s = 0; s < m.k(); ++s) {
    double prod = 1.0;
    for (std::size_t i = 0; i < suffix.size(); ++i) {
      prod *= m.marginal(s, j + static_cast<int>(i), suffix[i]);
    }
    total += weights[static_cast<std::size_t>(s)] * prod;
  }
  return total;
}

double mass(const Mixture& m, std::span<const int> omega) {
  check_configuration(m, omega);
  return suffix_mass(m, 0, m.weights(), omega);
}

}  // namespace mixtv
