#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <functional>

#include "fkan/animals.hpp"
#include "fkan/polymer.hpp"
#include "oracles.hpp"

using namespace fkan;

namespace {

struct Fixture {
  TorusGraph t;
  CoarseTorus ct;
  Fixture(int N, int L) : t(build_torus(2, N)), ct(build_coarse(t, L)) {}
};

// Families by plain recursion over the oracle's polymer list.
std::uint64_t oracle_family_count(int M, const std::vector<std::uint64_t>& polys, bool independent_mode,
                                  std::uint64_t must_meet, int trace_size) {
  std::uint64_t count = 0;
  std::vector<std::uint64_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    std::uint64_t trace = 0;
    for (auto c : chosen) trace |= c;
    if (trace_size < 0 || std::popcount(trace) == trace_size) ++count;
    for (std::size_t i = from; i < polys.size(); ++i) {
      if (must_meet != ~std::uint64_t{0} && !(polys[i] & must_meet)) continue;
      bool ok = true;
      for (auto c : chosen) ok = ok && (independent_mode ? oracle::independent(2, M, c, polys[i]) : !(c & polys[i]));
      if (!ok) continue;
      chosen.push_back(polys[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return count;
}

}  // namespace

TEST(Polymers, TwoByTwoCounts) {
  Fixture f(4, 1);
  const auto all = enumerate_polymers(f.ct, 4);
  std::vector<int> by_size(5, 0);
  for (const auto& g : all) ++by_size[g.size()];
  EXPECT_EQ(by_size[1], 4);
  EXPECT_EQ(by_size[2], 4);
  EXPECT_EQ(by_size[4], 1);
  EXPECT_EQ(all.back().sites, f.ct.all_sites());
}

TEST(Polymers, MatchSubsetOracle) {
  for (auto [N, M, k] : {std::tuple{4, 2, 4}, {6, 3, 9}, {8, 4, 6}}) {
    Fixture f(N, 1);
    std::vector<std::uint64_t> ours;
    for (const auto& g : enumerate_polymers(f.ct, k)) ours.push_back(g.sites);
    std::sort(ours.begin(), ours.end());
    auto theirs = oracle::polymers(2, M, k);
    std::sort(theirs.begin(), theirs.end());
    EXPECT_EQ(ours, theirs) << "M=" << M;
  }
}

TEST(Polymers, CapAndRange) {
  Fixture f(16, 1);
  EXPECT_THROW(enumerate_polymers(f.ct, 17), BudgetExceeded);
  Fixture g(4, 1);
  EXPECT_THROW(enumerate_polymers(g.ct, 5), InvalidArgument);
  EXPECT_TRUE(enumerate_polymers(g.ct, 0).empty());
}

TEST(Families, EmptyDeltaLeavesOnlyEmptyFamily) {
  Fixture f(6, 1);
  const auto polys = enumerate_polymers(f.ct, 3);
  FamilyConstraint c;
  c.must_intersect = SiteSet{0};
  const auto fams = enumerate_families(polys, f.ct, FamilyMode::independent, c);
  ASSERT_EQ(fams.size(), 1u);
  EXPECT_TRUE(fams[0].members.empty());
}

TEST(Families, SinglePolymer) {
  Fixture f(6, 1);
  const std::vector<Polymer> one{{SiteSet{1} << 4}};
  EXPECT_EQ(enumerate_families(one, f.ct, FamilyMode::independent).size(), 2u);
}

TEST(Families, TwoByTwoDiagonalSingletonsAreIndependent) {
  Fixture f(4, 1);
  const auto polys = enumerate_polymers(f.ct, 4);
  int pairs = 0;
  for (const auto& fam : enumerate_families(polys, f.ct, FamilyMode::independent)) {
    if (fam.members.size() < 2) continue;
    ++pairs;
    ASSERT_EQ(fam.members.size(), 2u);
    const SiteSet a = polys[fam.members[0]].sites, b = polys[fam.members[1]].sites;
    EXPECT_TRUE(oracle::independent(2, 2, a, b));
    EXPECT_EQ(site_count(a) + site_count(b), 2);
  }
  // {0,3} and {1,2}
  EXPECT_EQ(pairs, 2);
}

TEST(Families, CountsMatchRecursionOracle) {
  Fixture f(6, 1);
  const auto polys = enumerate_polymers(f.ct, 3);
  std::vector<std::uint64_t> masks;
  for (const auto& g : polys) masks.push_back(g.sites);
  for (auto mode : {FamilyMode::independent, FamilyMode::disjoint}) {
    const bool ind = mode == FamilyMode::independent;
    EXPECT_EQ(enumerate_families(polys, f.ct, mode).size(),
              oracle_family_count(3, masks, ind, ~std::uint64_t{0}, -1));
    for (int n : {2, 3, 4}) {
      FamilyConstraint c;
      c.must_intersect = SiteSet{0b10001};
      c.trace_size = n;
      EXPECT_EQ(enumerate_families(polys, f.ct, mode, c).size(), oracle_family_count(3, masks, ind, 0b10001, n))
          << to_string(mode) << " n=" << n;
    }
  }
}

TEST(Families, CompatibilityAndTrace) {
  Fixture f(8, 1);
  const auto polys = enumerate_polymers(f.ct, 2);
  for (const auto& fam : enumerate_families(polys, f.ct, FamilyMode::independent)) {
    SiteSet tr = 0;
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      tr |= polys[fam.members[i]].sites;
      for (std::size_t j = i + 1; j < fam.members.size(); ++j)
        EXPECT_FALSE(f.ct.connected(polys[fam.members[i]].sites | polys[fam.members[j]].sites));
    }
    EXPECT_EQ(tr, fam.trace);
  }
}

TEST(Families, BudgetIsEnforced) {
  Fixture f(8, 1);
  const auto polys = enumerate_polymers(f.ct, 3);
  EXPECT_THROW(enumerate_families(polys, f.ct, FamilyMode::disjoint, {}, 1000), BudgetExceeded);
}

TEST(CountBound, Trivial) {
  Fixture f(16, 1);
  EXPECT_EQ(count_bound_check(f.ct, SiteSet{0b11}, 1, 1.0).count, 0u);
  const auto one = count_bound_check(f.ct, SiteSet{1} << 9, 1, 1.0);
  EXPECT_EQ(one.count, 1u);
  EXPECT_TRUE(one.pass);
}

TEST(CountBound, SingleSiteCountsAreAnchoredAnimals) {
  // with |Delta| = 1 every member contains the Delta-site, so a family is one polymer
  Fixture f(16, 1);
  const auto anchored = oracle::anchored_counts(2, 5);
  const double c = fit_animal_constant(2, 8);
  for (int n = 1; n <= 5; ++n) {
    const auto rep = count_bound_check(f.ct, SiteSet{1} << 27, n, c);
    EXPECT_EQ(rep.count, anchored[n]) << n;
    EXPECT_TRUE(rep.pass);
  }
}

TEST(CountBound, TwoSiteDeltaMatchesOracle) {
  Fixture f(6, 1);
  const auto masks = oracle::polymers(2, 3, 9);
  const SiteSet delta = 0b100000001;  // sites 0 and 8
  for (int n = 2; n <= 6; ++n) {
    const auto rep = count_bound_check(f.ct, delta, n, 1.0);
    EXPECT_EQ(rep.count, oracle_family_count(3, masks, true, delta, n)) << n;
  }
}
