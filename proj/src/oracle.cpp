#include "mixtv/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "mixtv/error.h"
#include "mixtv/random.h"

namespace mixtv {

std::uint64_t enumeration_size(int q, int n) {
  std::uint64_t size = 1;
  for (int i = 0; i < n; ++i) {
    size *= static_cast<std::uint64_t>(q);
    if (size > kMaxEnumeration) {
      throw Error(ErrorKind::kTooLarge, "q^n = " + std::to_string(q) + "^" + std::to_string(n) + " exceeds 2^24");
    }
  }
  return size;
}

void for_each_configuration(int q, int n, const std::function<void(std::span<const int>)>& visit) {
  const std::uint64_t size = enumeration_size(q, n);
  std::vector<int> omega(static_cast<std::size_t>(n), 0);
  for (std::uint64_t index = 0; index < size; ++index) {
    visit(omega);
    for (int i = n - 1; i >= 0; --i) {
      int& digit = omega[static_cast<std::size_t>(i)];
      if (++digit < q) break;
      digit = 0;
    }
  }
}

double brute_force_tv(const Mixture& p, const Mixture& q) {
  check_compatible(p, q);
  double total = 0.0;
  for_each_configuration(p.q(), p.n(), [&](std::span<const int> omega) {
    total += std::max(0.0, mass(p, omega) - mass(q, omega));
  });
  return total;
}

namespace {

void require_subcube(const Mixture& m) {
  if (m.q() != 2) throw Error(ErrorKind::kWrongAlphabet, "subcube mixtures need q = 2");
  for (int s = 0; s < m.k(); ++s) {
    for (int i = 0; i < m.n(); ++i) {
      const double one = m.marginal(s, i, 1);
      if (std::fabs(one) > kSubcubeTolerance && std::fabs(one - 1.0) > kSubcubeTolerance &&
          std::fabs(one - 0.5) > kSubcubeTolerance) {
        throw Error(ErrorKind::kNotASubcube, "component " + std::to_string(s) + " is not a subcube");
      }
    }
  }
}

bool feasible(const Mixture& m, int s, std::span<const int> omega) {
  for (int i = 0; i < m.n(); ++i) {
    if (!(m.marginal(s, i, omega[static_cast<std::size_t>(i)]) > kSubcubeTolerance)) return false;
  }
  return true;
}

}  // namespace

ChiTable brute_force_chi_counts(const Mixture& p, const Mixture& q) {
  check_compatible(p, q);
  require_subcube(p);
  require_subcube(q);
  const int k = p.k() + q.k();
  if (k > kMaxFormulas) throw Error(ErrorKind::kTooLarge, "too many components for a chi table");
  std::vector<std::uint64_t> counts(std::size_t{1} << k, 0);
  for_each_configuration(2, p.n(), [&](std::span<const int> omega) {
    std::uint64_t chi = 0;
    for (int s = 0; s < p.k(); ++s) {
      if (feasible(p, s, omega)) chi |= 1ULL << s;
    }
    for (int t = 0; t < q.k(); ++t) {
      if (feasible(q, t, omega)) chi |= 1ULL << (p.k() + t);
    }
    ++counts[chi];
  });
  return ChiTable(counts.begin(), counts.end());
}

void validate_cnf(const CnfFormula& formula) {
  if (formula.variables < 1) throw Error(ErrorKind::kNotThreeCnf, "formula needs at least one variable");
  if (formula.clauses.empty()) throw Error(ErrorKind::kNotThreeCnf, "formula needs at least one clause");
  for (std::size_t j = 0; j < formula.clauses.size(); ++j) {
    const auto& clause = formula.clauses[j];
    for (int a = 0; a < 3; ++a) {
      const int v = std::abs(clause[static_cast<std::size_t>(a)]);
      if (v < 1 || v > formula.variables) {
        throw Error(ErrorKind::kNotThreeCnf, "clause " + std::to_string(j + 1) + " references variable out of range");
      }
      for (int b = 0; b < a; ++b) {
        if (std::abs(clause[static_cast<std::size_t>(b)]) == v) {
          throw Error(ErrorKind::kNotThreeCnf, "clause " + std::to_string(j + 1) + " repeats variable " + std::to_string(v));
        }
      }
    }
  }
}

CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula formula;
  long long declared_clauses = -1;
  std::vector<int> pending;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;
    if (first == "c") continue;
    if (first == "%") break;
    if (first == "p") {
      std::string format;
      long long r = 0;
      if (declared_clauses >= 0 || !(tokens >> format >> r >> declared_clauses) || format != "cnf" || r < 1 ||
          declared_clauses < 0 || r > 1'000'000) {
        throw Error(ErrorKind::kParseError, "bad DIMACS header: " + line);
      }
      formula.variables = static_cast<int>(r);
      continue;
    }
    if (declared_clauses < 0) throw Error(ErrorKind::kParseError, "clause before DIMACS header");
    tokens.clear();
    tokens.str(line);
    long long literal = 0;
    while (tokens >> literal) {
      if (literal == 0) {
        if (pending.size() != 3) {
          throw Error(ErrorKind::kNotThreeCnf,
                      "clause " + std::to_string(formula.clauses.size() + 1) + " has " + std::to_string(pending.size()) +
                          " literals");
        }
        formula.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      } else {
        if (std::llabs(literal) > formula.variables) {
          throw Error(ErrorKind::kNotThreeCnf, "literal " + std::to_string(literal) + " out of range");
        }
        pending.push_back(static_cast<int>(literal));
      }
    }
    if (!tokens.eof()) throw Error(ErrorKind::kParseError, "bad DIMACS clause line: " + line);
  }
  if (declared_clauses < 0) throw Error(ErrorKind::kParseError, "missing DIMACS header");
  if (!pending.empty()) throw Error(ErrorKind::kParseError, "last clause is not terminated by 0");
  if (static_cast<long long>(formula.clauses.size()) != declared_clauses) {
    throw Error(ErrorKind::kParseError, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                            std::to_string(formula.clauses.size()));
  }
  validate_cnf(formula);
  return formula;
}

CnfFormula parse_dimacs_text(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

std::uint64_t brute_force_sat_count(const CnfFormula& formula) {
  validate_cnf(formula);
  if (formula.variables > 24) throw Error(ErrorKind::kTooLarge, "brute-force #SAT needs r <= 24");
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << formula.variables;
  for (std::uint64_t x = 0; x < total; ++x) {
    bool all = true;
    for (const auto& clause : formula.clauses) {
      bool any = false;
      for (int literal : clause) {
        const bool value = ((x >> (std::abs(literal) - 1)) & 1U) != 0;
        if (value == (literal > 0)) {
          any = true;
          break;
        }
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) ++count;
  }
  return count;
}

CnfInstance generate_3cnf_instance(const CnfFormula& formula) {
  validate_cnf(formula);
  const int r = formula.variables;
  const int m = static_cast<int>(formula.clauses.size());
  const int big_n = std::max(r, m);
  const int n = big_n + 1;
  const std::vector<double> free_row{0.5, 0.5};
  const std::vector<double> zero_row{1.0, 0.0};
  const std::vector<double> one_row{0.0, 1.0};

  RawMixture p;
  p.weights.assign(static_cast<std::size_t>(m), 1.0 / m);
  for (auto clause : formula.clauses) {
    std::sort(clause.begin(), clause.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n), free_row);
    rows[0] = zero_row;
    // The only assignment of these three variables falsifying the clause.
    for (int literal : clause) rows[static_cast<std::size_t>(std::abs(literal))] = literal > 0 ? zero_row : one_row;
    p.components.push_back(std::move(rows));
  }

  const double lambda = 1.0 / (2.0 * m);
  RawMixture q;
  q.weights = {lambda, 1.0 - lambda};
  for (const auto& selector : {zero_row, one_row}) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n), free_row);
    rows[0] = selector;
    q.components.push_back(std::move(rows));
  }

  const std::uint64_t sat = brute_force_sat_count(formula);
  // 2^-N S with S = sat * 2^(N - r) over the padded variables.
  const double density = std::ldexp(static_cast<double>(sat), -r);
  return CnfInstance{validate_mixture(2, n, p), validate_mixture(2, n, q), big_n, sat,
                     1.0 - lambda + density * lambda};
}

double sat_count_from_tv(const CnfFormula& formula, double tv) {
  const double m = static_cast<double>(formula.clauses.size());
  return std::ldexp(2.0 * m * tv - 2.0 * m + 1.0, formula.variables);
}

namespace {

std::vector<double> dirichlet(Rng& rng, int size) {
  std::vector<double> out(static_cast<std::size_t>(size));
  double total = 0.0;
  while (!(total > 0.0)) {
    total = 0.0;
    for (double& x : out) {
      x = -std::log1p(-uniform01(rng));
      total += x;
    }
  }
  for (double& x : out) x /= total;
  return out;
}

RawMixture random_side(Rng& rng, int n, int q, int k, InstanceFamily family) {
  RawMixture raw;
  raw.weights = dirichlet(rng, k);
  raw.components.resize(static_cast<std::size_t>(k));
  for (auto& component : raw.components) {
    component.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      if (family == InstanceFamily::kGeneral) {
        component.push_back(dirichlet(rng, q));
      } else {
        switch (rng() % 3) {
          case 0: component.push_back({1.0, 0.0}); break;
          case 1: component.push_back({0.0, 1.0}); break;
          default: component.push_back({0.5, 0.5}); break;
        }
      }
    }
  }
  return raw;
}

}  // namespace

Instance random_instance(int n, int q, int k1, int k2, std::uint64_t seed, InstanceFamily family) {
  if (n < 1 || q < 2 || k1 < 1 || k2 < 1) {
    throw Error(ErrorKind::kInvalidArgument, "random instances need n >= 1, q >= 2, k1 >= 1, k2 >= 1");
  }
  if (family == InstanceFamily::kSubcube && q != 2) {
    throw Error(ErrorKind::kWrongAlphabet, "subcube instances need q = 2");
  }
  Rng rng = make_stream(seed);
  RawMixture p = random_side(rng, n, q, k1, family);
  RawMixture qd = random_side(rng, n, q, k2, family);
  return Instance{validate_mixture(q, n, p), validate_mixture(q, n, qd)};
}

}  // namespace mixtv
