#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "mixtv/instance_io.h"
#include "mixtv/model.h"
#include "mixtv/subcube.h"

// Brute-force references and instance generators for tests.

namespace mixtv {

/// Largest q^n the exhaustive routines will enumerate.
inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 24;

/// q^n, or kTooLarge if it exceeds kMaxEnumeration.
std::uint64_t enumeration_size(int q, int n);

/// Calls visit on every point of [q]^n in lexicographic order (last
/// coordinate fastest).
void for_each_configuration(int q, int n, const std::function<void(std::span<const int>)>& visit);

/// Sum over all omega of max{0, P(omega) - Q(omega)}.
double brute_force_tv(const Mixture& p, const Mixture& q);

/// N_chi by evaluating every component at every point. Bit j of chi is
/// component j's feasibility, P's components first.
ChiTable brute_force_chi_counts(const Mixture& p, const Mixture& q);

/// Clauses hold signed 1-based variable indices, three per clause.
struct CnfFormula {
  int variables = 0;
  std::vector<std::array<int, 3>> clauses;
};

/// Throws kNotThreeCnf unless every clause has three distinct in-range
/// variables and there is at least one clause.
void validate_cnf(const CnfFormula& formula);

/// DIMACS "p cnf r m" followed by zero-terminated clauses. Comment lines
/// start with 'c'; a '%' line ends the clause list.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs_text(const std::string& text);

/// Satisfying assignments over the formula's own variables. r <= 24.
std::uint64_t brute_force_sat_count(const CnfFormula& formula);

struct CnfInstance {
  Mixture p;             // m subcubes, each fixing b = 0 and one clause's falsifying assignment
  Mixture q;             // V0 / V1 uniform on b = 0 / b = 1 with weights 1/(2m), 1 - 1/(2m)
  int padded_variables;  // N = max{r, m}
  std::uint64_t sat_count;  // over the r original variables
  double predicted_tv;      // 1 - 1/(2m) + 2^-N S / (2m)
};

/// Two subcube mixtures over {0,1}^(N+1) whose TV distance encodes #SAT.
/// Coordinate 0 is the selector bit b and coordinate v is variable x_v.
CnfInstance generate_3cnf_instance(const CnfFormula& formula);

/// #SAT recovered from a TV value: 2^r (2m TV - 2m + 1).
double sat_count_from_tv(const CnfFormula& formula, double tv);

enum class InstanceFamily { kGeneral, kSubcube };

/// Deterministic in seed. Weights and, for the general family, marginal rows
/// are drawn from a flat Dirichlet; subcube marginals are uniform over
/// {fixed 0, fixed 1, free}.
Instance random_instance(int n, int q, int k1, int k2, std::uint64_t seed, InstanceFamily family);

}  // namespace mixtv
