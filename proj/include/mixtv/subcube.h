#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mixtv/model.h"

// Exact TV distance between mixtures of Boolean subcubes.
//
// A subcube component fixes some coordinates to 1, some to 0 and is uniform
// on the rest, so its mass at omega is either 0 or 2^-r. The pair (P, Q)
// therefore induces k1 + k2 feasibility formulas F_1..F_K, and |P - Q| at
// omega depends only on the characteristic vector chi = (F_1(omega), ...,
// F_K(omega)). The TV distance is a sum over the 2^K vectors chi weighted by
// N_chi, the number of points with that vector, and N_chi follows from
// inclusion-exclusion over intersections of subcubes.
//
// Characteristic vectors and formula subsets are bit masks: bit j stands for
// formula j, P's components first (j < k1), then Q's.

namespace mixtv {

/// Exact point counts; small values stay inline, large n spills to the heap.
using Count = boost::multiprecision::cpp_int;

struct Subcube {
  std::vector<int> ones;   // coordinates fixed to 1
  std::vector<int> zeros;  // coordinates fixed to 0
  std::vector<int> free;   // uniform coordinates

  /// Mass of each feasible point, 2^-|free|.
  double point_mass() const;
};

struct SubcubeProfile {
  int n = 0;
  std::vector<Subcube> components;
};

inline constexpr double kSubcubeTolerance = 1e-12;
/// Largest k1 + k2 accepted by the table-based routines.
inline constexpr int kMaxFormulas = 20;

/// Partitions every component's coordinates by P_i(1) in {1, 0, 1/2}.
/// Throws kWrongAlphabet for q != 2 and kNotASubcube for any other marginal.
SubcubeProfile classify_subcube(const Mixture& m);

/// The formulas of p followed by those of q.
SubcubeProfile concat_profiles(const SubcubeProfile& p, const SubcubeProfile& q);

/// |Phi(S)|: number of points feasible for every formula in `subset`, found by
/// merging fixed coordinates. 0 on a contradiction, else 2^(unfixed).
Count cube_intersection_count(const SubcubeProfile& formulas, std::uint64_t subset);

/// N_chi = sum over S within chi's zero set of (-1)^|S| |Phi(ones(chi) + S)|.
Count chi_count(const SubcubeProfile& formulas, std::uint64_t chi);

/// N_chi for every chi, indexed by mask.
using ChiTable = std::vector<Count>;

/// Whole table at once. Intersection sizes for all 2^K subsets are derived
/// from per-coordinate masks (a pairwise conflict table plus a subset-sum of
/// fixed-coordinate counts), then each N_chi is assembled by the same
/// inclusion-exclusion as chi_count().
ChiTable chi_table(const SubcubeProfile& formulas);

/// Exact TV distance for two subcube mixtures. Throws kNotASubcube,
/// kWrongAlphabet, kShapeMismatch, or kTooLarge when k1 + k2 > kMaxFormulas.
double exact_subcube_tv(const Mixture& p, const Mixture& q);

/// N * 2^-r as a double without forming 2^-r separately, so the product stays
/// representable for any r as long as N <= 2^r.
double scaled_count(const Count& count, long long r);

}  // namespace mixtv
