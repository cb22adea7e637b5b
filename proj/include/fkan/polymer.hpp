#pragma once

// Polymers (nonempty connected subsets of the coarse torus) and families of
// pairwise compatible polymers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fkan/animals.hpp"
#include "fkan/error.hpp"
#include "fkan/lattice.hpp"

namespace fkan {

struct Polymer {
  SiteSet sites = 0;
  int size() const { return site_count(sites); }
  friend bool operator==(const Polymer&, const Polymer&) = default;
  friend bool operator<(const Polymer& a, const Polymer& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.sites < b.sites;
  }
};

/// independent: gamma ∪ gamma' is not connected (no shared or adjacent sites).
/// disjoint: gamma ∩ gamma' is empty.
enum class FamilyMode { independent, disjoint };

inline std::string to_string(FamilyMode m) { return m == FamilyMode::independent ? "independent" : "disjoint"; }

inline FamilyMode parse_family_mode(const std::string& s) {
  if (s == "independent") return FamilyMode::independent;
  if (s == "disjoint") return FamilyMode::disjoint;
  throw InvalidArgument("unknown family mode: " + s);
}

/// Sites that a polymer in the given mode excludes from the rest of a family.
inline SiteSet blocking_set(const CoarseTorus& ct, SiteSet sites, FamilyMode mode) {
  return mode == FamilyMode::independent ? ct.closed_neighbourhood(sites) : sites;
}

inline bool compatible(const CoarseTorus& ct, SiteSet a, SiteSet b, FamilyMode mode) {
  return (blocking_set(ct, a, mode) & b) == 0;
}

inline constexpr int kDefaultPolymerCap = 16;

/// All connected site sets of size 1..max_size, each once, sorted by
/// (size, bit mask). Sets are grown from their smallest site.
inline std::vector<Polymer> enumerate_polymers(const CoarseTorus& ct, int max_size, int cap = kDefaultPolymerCap) {
  if (max_size < 1) return {};
  if (max_size > ct.num_sites()) throw InvalidArgument("enumerate_polymers: max_size exceeds the site count");
  if (max_size > cap) throw BudgetExceeded("enumerate_polymers: max_size exceeds cap");
  std::vector<Polymer> out;
  const int n = ct.num_sites();
  for (int root = 0; root < n; ++root) {
    const SiteSet allowed = ~((SiteSet{1} << root) - 1) & ct.all_sites();
    // set, frontier of untried sites, sites already seen (set ∪ frontier ∪ discarded)
    std::function<void(SiteSet, SiteSet, SiteSet)> grow = [&](SiteSet set, SiteSet untried, SiteSet seen) {
      while (untried) {
        const int s = std::countr_zero(untried);
        untried &= untried - 1;
        const SiteSet next = set | (SiteSet{1} << s);
        out.push_back({next});
        if (site_count(next) < max_size) {
          const SiteSet fresh = ct.neighbours(s) & allowed & ~seen;
          grow(next, untried | fresh, seen | fresh);
        }
      }
    };
    const SiteSet r = SiteSet{1} << root;
    out.push_back({r});
    if (max_size > 1) {
      const SiteSet fresh = ct.neighbours(root) & allowed;
      grow(r, fresh, r | fresh);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct PolymerFamily {
  std::vector<int> members;  // indices into the polymer list, increasing
  SiteSet trace = 0;
};

struct FamilyConstraint {
  std::optional<SiteSet> must_intersect;  // every member meets this set (I(Delta))
  std::optional<int> trace_size;          // |Tr| equals this
};

inline constexpr std::uint64_t kDefaultFamilyBudget = 50'000'000;

/// Calls visit(family) for every family of pairwise compatible polymers that
/// satisfies the constraint, including the empty family when admissible.
/// Under must_intersect = {} only the empty family qualifies.
inline std::uint64_t for_each_family(const std::vector<Polymer>& polymers, const CoarseTorus& ct, FamilyMode mode,
                                     const FamilyConstraint& c, const std::function<void(const PolymerFamily&)>& visit,
                                     std::uint64_t budget = kDefaultFamilyBudget) {
  std::vector<int> candidates;
  for (int i = 0; i < static_cast<int>(polymers.size()); ++i) {
    if (c.must_intersect && (polymers[i].sites & *c.must_intersect) == 0) continue;
    if (c.trace_size && polymers[i].size() > *c.trace_size) continue;
    candidates.push_back(i);
  }
  std::vector<SiteSet> blocks(polymers.size());
  for (int i : candidates) blocks[i] = blocking_set(ct, polymers[i].sites, mode);
  std::uint64_t count = 0;
  PolymerFamily fam;
  std::function<void(std::size_t, SiteSet, int)> rec = [&](std::size_t from, SiteSet blocked, int size) {
    if (!c.trace_size || size == *c.trace_size) {
      if (++count > budget) throw BudgetExceeded("family enumeration exceeds budget");
      visit(fam);
    }
    for (std::size_t j = from; j < candidates.size(); ++j) {
      const int i = candidates[j];
      const Polymer& g = polymers[i];
      if (g.sites & blocked) continue;
      if (c.trace_size && size + g.size() > *c.trace_size) continue;
      fam.members.push_back(i);
      const SiteSet old = fam.trace;
      fam.trace |= g.sites;
      rec(j + 1, blocked | blocks[i], size + g.size());
      fam.trace = old;
      fam.members.pop_back();
    }
  };
  rec(0, 0, 0);
  return count;
}

inline std::vector<PolymerFamily> enumerate_families(const std::vector<Polymer>& polymers, const CoarseTorus& ct,
                                                     FamilyMode mode, const FamilyConstraint& c = {},
                                                     std::uint64_t budget = kDefaultFamilyBudget) {
  std::vector<PolymerFamily> out;
  for_each_family(polymers, ct, mode, c, [&](const PolymerFamily& f) { out.push_back(f); }, budget);
  return out;
}

struct CountBoundReport {
  std::uint64_t count = 0;
  double bound = 0.0;  // 4^n exp(c n)
  double c_hat = 0.0;
  bool pass = true;
};

/// Exact number of families in F ∩ I(Delta) with |Tr| = n against 4^n e^{c n}.
inline CountBoundReport count_bound_check(const CoarseTorus& ct, SiteSet delta, int n, double c_hat,
                                          FamilyMode mode = FamilyMode::independent) {
  CountBoundReport rep;
  rep.c_hat = c_hat;
  rep.bound = std::pow(4.0, n) * std::exp(c_hat * n);
  if (n < site_count(delta) || n < 1) {
    rep.count = 0;
    return rep;
  }
  const auto polymers = enumerate_polymers(ct, std::min(n, ct.num_sites()), std::max(n, kDefaultPolymerCap));
  FamilyConstraint c;
  c.must_intersect = delta;
  c.trace_size = n;
  rep.count = for_each_family(polymers, ct, mode, c, [](const PolymerFamily&) {});
  rep.pass = static_cast<double>(rep.count) <= rep.bound;
  return rep;
}

}  // namespace fkan
