#include "mixtv/subcube.h"

#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "mixtv/error.h"
#include "mixtv/oracle.h"
#include "test_support.h"

namespace mixtv {
namespace {

using testing::make_cubes;
using testing::make_mixture;
using testing::Rows;

// F1 fixes x1 = 1, F2 fixes x2 = 0, n = 3.
SubcubeProfile two_formulas() {
  return concat_profiles(classify_subcube(make_cubes({1.0}, {"1**"})), classify_subcube(make_cubes({1.0}, {"*0*"})));
}

TEST(ClassifySubcube, Partition) {
  const SubcubeProfile profile = classify_subcube(make_cubes({1.0}, {"10*"}));
  ASSERT_EQ(profile.components.size(), 1U);
  EXPECT_EQ(profile.components[0].ones, std::vector<int>{0});
  EXPECT_EQ(profile.components[0].zeros, std::vector<int>{1});
  EXPECT_EQ(profile.components[0].free, std::vector<int>{2});
  EXPECT_EQ(profile.components[0].point_mass(), 0.5);
}

TEST(ClassifySubcube, RejectsOtherMarginals) {
  try {
    classify_subcube(testing::make_product(2, Rows{{0.7, 0.3}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotASubcube);
  }
}

TEST(ClassifySubcube, RejectsLargerAlphabet) {
  try {
    classify_subcube(testing::make_product(3, Rows{{0.5, 0.5, 0.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWrongAlphabet);
  }
}

TEST(ClassifySubcube, ToleratesTinyOffsets) {
  const SubcubeProfile profile =
      classify_subcube(testing::make_product(2, Rows{{0.5 + 1e-13, 0.5 - 1e-13}, {1e-13, 1.0 - 1e-13}}));
  EXPECT_EQ(profile.components[0].free, std::vector<int>{0});
  EXPECT_EQ(profile.components[0].ones, std::vector<int>{1});
}

TEST(CubeIntersectionCount, Examples) {
  const SubcubeProfile f = two_formulas();
  EXPECT_EQ(cube_intersection_count(f, 0b11), 2);
  EXPECT_EQ(cube_intersection_count(f, 0b01), 4);
  EXPECT_EQ(cube_intersection_count(f, 0), 8);
  const SubcubeProfile clash =
      concat_profiles(classify_subcube(make_cubes({1.0}, {"1*"})), classify_subcube(make_cubes({1.0}, {"0*"})));
  EXPECT_EQ(cube_intersection_count(clash, 0b11), 0);
  const SubcubeProfile five = classify_subcube(testing::uniform_cube(5));
  EXPECT_EQ(cube_intersection_count(five, 0), 32);
}

TEST(CubeIntersectionCount, RejectsOutOfRangeMask) {
  EXPECT_THROW(cube_intersection_count(two_formulas(), 0b100), Error);
}

TEST(ChiCount, TwoFormulaExample) {
  const SubcubeProfile f = two_formulas();
  EXPECT_EQ(chi_count(f, 0b11), 2);
  EXPECT_EQ(chi_count(f, 0b01), 2);
  EXPECT_EQ(chi_count(f, 0b10), 2);
  EXPECT_EQ(chi_count(f, 0b00), 2);
  EXPECT_EQ(chi_table(f), (ChiTable{2, 2, 2, 2}));
}

TEST(ChiCount, AllOnesIsTheIntersection) {
  const Instance inst = random_instance(9, 2, 3, 2, 4, InstanceFamily::kSubcube);
  const SubcubeProfile f = concat_profiles(classify_subcube(inst.p), classify_subcube(inst.q));
  EXPECT_EQ(chi_count(f, 0b11111), cube_intersection_count(f, 0b11111));
}

TEST(ChiCount, TautologiesAndContradictions) {
  const SubcubeProfile free = concat_profiles(classify_subcube(testing::uniform_cube(4)),
                                              classify_subcube(testing::uniform_cube(4)));
  EXPECT_EQ(chi_table(free), (ChiTable{0, 0, 0, 16}));
  const SubcubeProfile points =
      concat_profiles(classify_subcube(testing::point_mass("01")), classify_subcube(testing::point_mass("11")));
  EXPECT_EQ(chi_count(points, 0b11), 0);
}

TEST(ChiTable, MatchesPerChiCountAndBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 1 + static_cast<int>(seed % 10);
    const int k1 = 1 + static_cast<int>(seed % 4);
    const int k2 = 1 + static_cast<int>((seed / 4) % 3);
    const Instance inst = random_instance(n, 2, k1, k2, seed, InstanceFamily::kSubcube);
    const SubcubeProfile f = concat_profiles(classify_subcube(inst.p), classify_subcube(inst.q));
    const ChiTable fast = chi_table(f);
    const ChiTable brute = brute_force_chi_counts(inst.p, inst.q);
    ASSERT_EQ(fast.size(), brute.size());
    Count total = 0;
    for (std::uint64_t chi = 0; chi < fast.size(); ++chi) {
      EXPECT_EQ(fast[chi], brute[chi]) << "seed " << seed << " chi " << chi;
      EXPECT_EQ(chi_count(f, chi), brute[chi]);
      EXPECT_GE(fast[chi], 0);
      total += fast[chi];
    }
    EXPECT_EQ(total, Count(1) << n);
  }
}

TEST(ChiTable, ExactBeyondSixtyFourBits) {
  const int n = 200;
  const Instance inst = random_instance(n, 2, 2, 2, 8, InstanceFamily::kSubcube);
  const SubcubeProfile f = concat_profiles(classify_subcube(inst.p), classify_subcube(inst.q));
  const ChiTable table = chi_table(f);
  Count total = 0;
  for (std::uint64_t chi = 0; chi < table.size(); ++chi) {
    EXPECT_EQ(table[chi], chi_count(f, chi));
    total += table[chi];
  }
  EXPECT_EQ(total, Count(1) << n);
}

TEST(ChiTable, TooManyFormulas) {
  std::vector<std::string> patterns(kMaxFormulas + 1, "*");
  const Mixture m = make_cubes(std::vector<double>(patterns.size(), 1.0 / static_cast<double>(patterns.size())), patterns);
  try {
    chi_table(classify_subcube(m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTooLarge);
  }
}

TEST(ScaledCount, ExactAndHuge) {
  EXPECT_EQ(scaled_count(Count(3), 2), 0.75);
  EXPECT_EQ(scaled_count(Count(0), 5), 0.0);
  EXPECT_EQ(scaled_count(Count(1) << 2000, 2000), 1.0);
  EXPECT_EQ(scaled_count((Count(1) << 1500) * 3, 1501), 1.5);
}

TEST(ExactSubcubeTv, Examples) {
  EXPECT_DOUBLE_EQ(exact_subcube_tv(make_cubes({1.0}, {"1**"}), make_cubes({1.0}, {"*0*"})), 0.5);
  const Mixture p = make_cubes({0.3, 0.7}, {"1*0", "**1"});
  EXPECT_EQ(exact_subcube_tv(p, p), 0.0);
  EXPECT_DOUBLE_EQ(exact_subcube_tv(testing::uniform_cube(2), testing::point_mass("00")), 0.75);
}

TEST(ExactSubcubeTv, SingleClauseReduction) {
  const CnfInstance inst = generate_3cnf_instance(parse_dimacs_text("p cnf 3 1\n1 2 3 0\n"));
  EXPECT_NEAR(exact_subcube_tv(inst.p, inst.q), 0.9375, 1e-12);
}

TEST(ExactSubcubeTv, Errors) {
  try {
    exact_subcube_tv(testing::uniform_cube(2), testing::uniform_cube(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
  try {
    exact_subcube_tv(testing::make_product(2, Rows{{0.3, 0.7}}), testing::uniform_cube(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotASubcube);
  }
}

TEST(ExactSubcubeTv, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const int n = 1 + static_cast<int>(seed % 14);
    const int k1 = 1 + static_cast<int>(seed % 5);
    const int k2 = 1 + static_cast<int>((seed / 5) % 3);
    const Instance inst = random_instance(n, 2, k1, k2, seed, InstanceFamily::kSubcube);
    EXPECT_NEAR(exact_subcube_tv(inst.p, inst.q), brute_force_tv(inst.p, inst.q), 1e-12) << "seed " << seed;
  }
}

TEST(ExactSubcubeTv, ZeroWeightComponentsIgnored) {
  const Mixture p = make_cubes({1.0, 0.0}, {"1*", "0*"});
  const Mixture q = make_cubes({1.0}, {"**"});
  EXPECT_DOUBLE_EQ(exact_subcube_tv(p, q), 0.5);
}

double seconds_for(int n) {
  const Instance inst = random_instance(n, 2, 5, 5, 42, InstanceFamily::kSubcube);
  double best = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    const double tv = exact_subcube_tv(inst.p, inst.q);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    EXPECT_GE(tv, 0.0);
    best = std::min(best, elapsed.count());
  }
  return best;
}

TEST(ExactSubcubeTv, RoughlyLinearInDimension) {
  const double small = seconds_for(10000);
  const double large = seconds_for(20000);
  EXPECT_LE(large, 2.5 * small + 0.005) << small << " s vs " << large << " s";
}

}  // namespace
}  // namespace mixtv
