#include "mixtv/subcube.h"

#include <bit>
#include <cmath>
#include <string>

#include "mixtv/error.h"

namespace mixtv {

double Subcube::point_mass() const { return std::ldexp(1.0, -static_cast<int>(free.size())); }

SubcubeProfile classify_subcube(const Mixture& m) {
  if (m.q() != 2) throw Error(ErrorKind::kWrongAlphabet, "subcube mixtures need q = 2");
  SubcubeProfile profile;
  profile.n = m.n();
  profile.components.resize(static_cast<std::size_t>(m.k()));
  for (int s = 0; s < m.k(); ++s) {
    Subcube& cube = profile.components[static_cast<std::size_t>(s)];
    for (int i = 0; i < m.n(); ++i) {
      const double one = m.marginal(s, i, 1);
      if (std::fabs(one - 1.0) <= kSubcubeTolerance) {
        cube.ones.push_back(i);
      } else if (std::fabs(one) <= kSubcubeTolerance) {
        cube.zeros.push_back(i);
      } else if (std::fabs(one - 0.5) <= kSubcubeTolerance) {
        cube.free.push_back(i);
      } else {
        throw Error(ErrorKind::kNotASubcube, "component " + std::to_string(s) + " coordinate " + std::to_string(i) +
                                                 " has P(1) = " + std::to_string(one));
      }
    }
  }
  return profile;
}

SubcubeProfile concat_profiles(const SubcubeProfile& p, const SubcubeProfile& q) {
  if (p.n != q.n) throw Error(ErrorKind::kShapeMismatch, "subcube mixtures have different dimensions");
  SubcubeProfile out{p.n, p.components};
  out.components.insert(out.components.end(), q.components.begin(), q.components.end());
  return out;
}

namespace {

int formula_count(const SubcubeProfile& formulas) { return static_cast<int>(formulas.components.size()); }

void check_mask(const SubcubeProfile& formulas, std::uint64_t mask) {
  const int k = formula_count(formulas);
  if (k > 63 || (k < 64 && (mask >> k) != 0)) {
    throw Error(ErrorKind::kShapeMismatch, "formula mask references more than k1 + k2 formulas");
  }
}

Count power_of_two(long long e) {
  Count c = 1;
  c <<= static_cast<unsigned>(e);
  return c;
}

}  // namespace

Count cube_intersection_count(const SubcubeProfile& formulas, std::uint64_t subset) {
  check_mask(formulas, subset);
  // -1 unfixed, else the forced bit.
  std::vector<signed char> fixed(static_cast<std::size_t>(formulas.n), -1);
  long long unfixed = formulas.n;
  for (int j = 0; j < formula_count(formulas); ++j) {
    if (((subset >> j) & 1U) == 0) continue;
    const Subcube& cube = formulas.components[static_cast<std::size_t>(j)];
    for (int bit = 0; bit <= 1; ++bit) {
      for (int i : bit == 1 ? cube.ones : cube.zeros) {
        signed char& slot = fixed[static_cast<std::size_t>(i)];
        if (slot == -1) {
          slot = static_cast<signed char>(bit);
          --unfixed;
        } else if (slot != bit) {
          return Count(0);
        }
      }
    }
  }
  return power_of_two(unfixed);
}

Count chi_count(const SubcubeProfile& formulas, std::uint64_t chi) {
  check_mask(formulas, chi);
  const int k = formula_count(formulas);
  const std::uint64_t full = k == 64 ? ~0ULL : ((1ULL << k) - 1);
  const std::uint64_t zeros = full & ~chi;
  Count total = 0;
  // Binary-counter walk over all S within the zero set, including S = {}.
  std::uint64_t s = 0;
  do {
    const Count phi = cube_intersection_count(formulas, chi | s);
    if (std::popcount(s) % 2 == 0) {
      total += phi;
    } else {
      total -= phi;
    }
    s = (s - zeros) & zeros;
  } while (s != 0);
  return total;
}

ChiTable chi_table(const SubcubeProfile& formulas) {
  const int k = formula_count(formulas);
  if (k > kMaxFormulas) {
    throw Error(ErrorKind::kTooLarge, "k1 + k2 = " + std::to_string(k) + " exceeds " + std::to_string(kMaxFormulas));
  }
  const std::size_t size = std::size_t{1} << k;
  const std::uint64_t full = size - 1;

  // Per coordinate: which formulas fix it to 1 and which to 0.
  std::vector<std::uint64_t> fix_one(static_cast<std::size_t>(formulas.n), 0);
  std::vector<std::uint64_t> fix_zero(static_cast<std::size_t>(formulas.n), 0);
  for (int j = 0; j < k; ++j) {
    const Subcube& cube = formulas.components[static_cast<std::size_t>(j)];
    for (int i : cube.ones) fix_one[static_cast<std::size_t>(i)] |= 1ULL << j;
    for (int i : cube.zeros) fix_zero[static_cast<std::size_t>(i)] |= 1ULL << j;
  }

  // Two subcubes intersect iff no coordinate is fixed to opposite bits, and a
  // family of subcubes intersects iff it does so pairwise.
  std::vector<std::uint64_t> conflicts(static_cast<std::size_t>(k), 0);
  // touched[U] = number of coordinates fixed by exactly the formulas in U.
  std::vector<long long> touched(size, 0);
  for (std::size_t i = 0; i < fix_one.size(); ++i) {
    for (std::uint64_t m = fix_one[i]; m != 0; m &= m - 1) conflicts[static_cast<std::size_t>(std::countr_zero(m))] |= fix_zero[i];
    for (std::uint64_t m = fix_zero[i]; m != 0; m &= m - 1) conflicts[static_cast<std::size_t>(std::countr_zero(m))] |= fix_one[i];
    ++touched[fix_one[i] | fix_zero[i]];
  }
  // Subset sums: within[A] = coordinates fixed only by formulas inside A.
  std::vector<long long>& within = touched;
  for (int b = 0; b < k; ++b) {
    for (std::size_t a = 0; a < size; ++a) {
      if ((a >> b) & 1U) within[a] += within[a ^ (std::size_t{1} << b)];
    }
  }
  // |Phi(T)| = 0 if T contains a conflicting pair, else 2^(coordinates T leaves free).
  std::vector<char> empty(size, 0);
  std::vector<long long> free_dims(size, 0);
  for (std::size_t t = 0; t < size; ++t) {
    if (t != 0) {
      const int low = std::countr_zero(t);
      const std::size_t rest = t & (t - 1);
      empty[t] = static_cast<char>(empty[rest] || (conflicts[static_cast<std::size_t>(low)] & rest) != 0);
    }
    free_dims[t] = within[full & ~t];
  }

  ChiTable table(size);
  for (std::uint64_t chi = 0; chi < size; ++chi) {
    const std::uint64_t zeros = full & ~chi;
    Count total = 0;
    std::uint64_t s = 0;
    do {
      const std::uint64_t t = chi | s;
      if (!empty[t]) {
        if (std::popcount(s) % 2 == 0) {
          total += power_of_two(free_dims[t]);
        } else {
          total -= power_of_two(free_dims[t]);
        }
      }
      s = (s - zeros) & zeros;
    } while (s != 0);
    table[chi] = std::move(total);
  }
  return table;
}

double scaled_count(const Count& count, long long r) {
  if (count == 0) return 0.0;
  const auto msb = static_cast<long long>(boost::multiprecision::msb(count));
  if (msb < 63) return std::ldexp(static_cast<double>(count.convert_to<std::uint64_t>()), static_cast<int>(-r));
  const long long shift = msb - 62;
  const Count top = count >> static_cast<unsigned>(shift);
  return std::ldexp(static_cast<double>(top.convert_to<std::uint64_t>()), static_cast<int>(shift - r));
}

double exact_subcube_tv(const Mixture& p, const Mixture& q) {
  check_compatible(p, q);
  const SubcubeProfile formulas = concat_profiles(classify_subcube(p), classify_subcube(q));
  const ChiTable table = chi_table(formulas);
  const int k1 = p.k();
  const int k = formula_count(formulas);

  double twice_tv = 0.0;
  for (std::uint64_t chi = 1; chi < table.size(); ++chi) {
    const Count& count = table[chi];
    if (count == 0) continue;
    double diff = 0.0;
    for (int j = 0; j < k; ++j) {
      if (((chi >> j) & 1U) == 0) continue;
      const long long r = static_cast<long long>(formulas.components[static_cast<std::size_t>(j)].free.size());
      const double term = scaled_count(count, r);
      if (j < k1) {
        diff += p.weight(j) * term;
      } else {
        diff -= q.weight(j - k1) * term;
      }
    }
    twice_tv += std::fabs(diff);
  }
  return 0.5 * twice_tv;
}

}  // namespace mixtv
