#pragma once

// Ursell functions, the polymer partition function Xi, its truncated
// cluster expansion, and the convergence and volume bounds that go with it.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <limits>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "fkan/complex_io.hpp"
#include "fkan/error.hpp"
#include "fkan/lattice.hpp"
#include "fkan/polymer.hpp"
#include "fkan/rational.hpp"

namespace fkan {

/// Which pairs of polymers are joined by an edge of the incompatibility graph.
/// `intersect` pairs with a common site; `touch` pairs whose union is connected.
/// Families of disjoint mode pair with `intersect`, independent mode with `touch`.
enum class Incompatibility { intersect, touch };

inline Incompatibility relation_for(FamilyMode m) {
  return m == FamilyMode::independent ? Incompatibility::touch : Incompatibility::intersect;
}

inline bool incompatible(const CoarseTorus* ct, SiteSet a, SiteSet b, Incompatibility rel) {
  if (a & b) return true;
  if (rel == Incompatibility::intersect) return false;
  if (!ct) throw InvalidArgument("touch relation needs a coarse torus");
  return (ct->boundary(a) & b) != 0;
}

inline constexpr int kUrsellCap = 5;
inline constexpr int kUrsellHardCap = 6;

namespace detail {

// pair (i<j) in colex order, so adding vertex n only adds bits above the old ones
inline int pair_bit(int i, int j) { return j * (j - 1) / 2 + i; }

inline bool spanning_connected(int n, std::uint32_t edges) {
  std::uint32_t reached = 1, frontier = 1;
  while (frontier) {
    std::uint32_t next = 0;
    for (int i = 0; i < n; ++i) {
      if (!((frontier >> i) & 1u)) continue;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const int b = i < j ? pair_bit(i, j) : pair_bit(j, i);
        if ((edges >> b) & 1u) next |= 1u << j;
      }
    }
    next &= ~reached;
    reached |= next;
    frontier = next;
  }
  return reached == (1u << n) - 1;
}

inline std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

class UrsellCache {
 public:
  static UrsellCache& instance() {
    static UrsellCache c;
    return c;
  }
  Rational get(int n, std::uint32_t graph) {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 32) | graph;
    {
      std::shared_lock lock(mu_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const Rational v = compute(n, graph);
    std::unique_lock lock(mu_);
    memo_.emplace(key, v);
    return v;
  }

 private:
  // (1/n!) * sum over connected spanning subgraphs G of H of (-1)^{|E(G)|}
  static Rational compute(int n, std::uint32_t graph) {
    if (n == 1) return Rational(1);
    if (!spanning_connected(n, graph)) return Rational(0);
    std::vector<int> bits;
    for (int b = 0; b < 32; ++b)
      if ((graph >> b) & 1u) bits.push_back(b);
    std::int64_t sum = 0;
    for (std::uint32_t s = 0; s < (1u << bits.size()); ++s) {
      std::uint32_t sub = 0;
      for (std::size_t i = 0; i < bits.size(); ++i)
        if ((s >> i) & 1u) sub |= 1u << bits[i];
      if (spanning_connected(n, sub)) sum += (std::popcount(s) % 2 == 0) ? 1 : -1;
    }
    return Rational(sum, factorial(n));
  }

  std::shared_mutex mu_;
  std::map<std::uint64_t, Rational> memo_;
};

}  // namespace detail

/// Ursell function of n objects whose incompatibility graph is given by the
/// predicate. n is limited to `cap` (at most 6: 2^15 subgraphs).
inline Rational ursell(int n, const std::function<bool(int, int)>& incompatible_pair, int cap = kUrsellCap) {
  if (n < 1) throw InvalidArgument("ursell: empty tuple");
  if (n > std::min(cap, kUrsellHardCap)) throw BudgetExceeded("ursell: tuple length exceeds cap");
  std::uint32_t graph = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (incompatible_pair(i, j)) graph |= 1u << detail::pair_bit(i, j);
  return detail::UrsellCache::instance().get(n, graph);
}

inline Rational ursell(const std::vector<SiteSet>& tuple, const CoarseTorus* ct = nullptr,
                       Incompatibility rel = Incompatibility::intersect, int cap = kUrsellCap) {
  return ursell(static_cast<int>(tuple.size()),
                [&](int i, int j) { return incompatible(ct, tuple[i], tuple[j], rel); }, cap);
}

/// Complex weights on a polymer list (aligned by index).
struct Activity {
  std::vector<cplx> w;
  std::string tag = "synthetic";
};

/// w(gamma) = base^{|gamma|}
inline Activity power_activity(const std::vector<Polymer>& polymers, cplx base) {
  Activity a;
  a.tag = "synthetic";
  for (const auto& g : polymers) a.w.push_back(std::pow(base, g.size()));
  return a;
}

/// Activity set to zero on polymers meeting `excluded`.
inline Activity exclude(const std::vector<Polymer>& polymers, const Activity& a, SiteSet excluded) {
  Activity out = a;
  out.tag = a.tag + "-excluded";
  for (std::size_t i = 0; i < polymers.size(); ++i)
    if (polymers[i].sites & excluded) out.w[i] = 0.0;
  return out;
}

/// (1 + |gamma|) w(gamma)
inline Activity tilted(const std::vector<Polymer>& polymers, const Activity& a) {
  Activity out = a;
  out.tag = "tilted";
  for (std::size_t i = 0; i < polymers.size(); ++i) out.w[i] *= 1.0 + polymers[i].size();
  return out;
}

/// Xi(w): sum over compatible families of the product of activities.
inline cplx exact_Xi(const std::vector<Polymer>& polymers, const CoarseTorus& ct, const Activity& a, FamilyMode mode,
                     std::uint64_t budget = kDefaultFamilyBudget) {
  if (a.w.size() != polymers.size()) throw InvalidArgument("exact_Xi: activity size mismatch");
  std::vector<int> live;
  for (int i = 0; i < static_cast<int>(polymers.size()); ++i)
    if (a.w[i] != 0.0) live.push_back(i);
  std::vector<SiteSet> blocks(polymers.size());
  for (int i : live) blocks[i] = blocking_set(ct, polymers[i].sites, mode);
  std::uint64_t count = 0;
  std::function<cplx(std::size_t, SiteSet)> rec = [&](std::size_t from, SiteSet blocked) -> cplx {
    if (++count > budget) throw BudgetExceeded("exact_Xi: family enumeration exceeds budget");
    cplx s = 1.0;
    for (std::size_t j = from; j < live.size(); ++j) {
      const int i = live[j];
      if (polymers[i].sites & blocked) continue;
      s += a.w[i] * rec(j + 1, blocked | blocks[i]);
    }
    return s;
  };
  return rec(0, 0);
}

struct ClusterSums {
  std::vector<cplx> per_order;        // index n = 0..n_max (entry 0 unused)
  std::vector<double> per_order_abs;  // sum |phi_n| prod |w|
  std::uint64_t tuples = 0;
  cplx total() const {
    cplx s = 0.0;
    for (auto v : per_order) s += v;
    return s;
  }
  double total_abs() const {
    double s = 0.0;
    for (auto v : per_order_abs) s += v;
    return s;
  }
};

inline constexpr std::uint64_t kDefaultTupleBudget = 200'000'000;

/// Sums over ordered tuples (gamma_1..gamma_n), repetition allowed, n <= n_max,
/// of phi_n prod w(gamma_i). With `touching` set, only tuples containing a
/// polymer that meets it are kept. Polymers of zero activity are skipped.
inline ClusterSums cluster_sums(const std::vector<Polymer>& polymers, const CoarseTorus* ct, const Activity& a,
                                Incompatibility rel, int n_max, std::optional<SiteSet> touching = std::nullopt,
                                int ursell_cap = kUrsellCap, std::uint64_t budget = kDefaultTupleBudget) {
  if (a.w.size() != polymers.size()) throw InvalidArgument("cluster_sums: activity size mismatch");
  if (n_max > std::min(ursell_cap, kUrsellHardCap)) throw BudgetExceeded("cluster_sums: n_max exceeds Ursell cap");
  std::vector<int> live;
  for (int i = 0; i < static_cast<int>(polymers.size()); ++i)
    if (a.w[i] != 0.0) live.push_back(i);
  double est = 0.0, pw = 1.0;
  for (int n = 1; n <= n_max; ++n) est += (pw *= static_cast<double>(live.size()));
  if (est > static_cast<double>(budget)) throw BudgetExceeded("cluster_sums: tuple count exceeds budget");
  const std::size_t L = live.size();
  // incompatibility between live polymers
  std::vector<char> inc(L * L);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j)
      inc[i * L + j] = incompatible(ct, polymers[live[i]].sites, polymers[live[j]].sites, rel);
  std::vector<char> meets(L, 1);
  if (touching)
    for (std::size_t i = 0; i < L; ++i) meets[i] = (polymers[live[i]].sites & *touching) != 0;

  ClusterSums out;
  out.per_order.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.per_order_abs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  std::vector<std::size_t> tuple;
  std::map<std::uint64_t, double> local;  // (n, graph) -> phi_n as double
  auto phi = [&](int n, std::uint32_t graph) {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 32) | graph;
    if (auto it = local.find(key); it != local.end()) return it->second;
    const double v = detail::UrsellCache::instance().get(n, graph).to_double();
    local.emplace(key, v);
    return v;
  };
  std::function<void(std::uint32_t, cplx, double, bool)> rec = [&](std::uint32_t graph, cplx prod, double prod_abs,
                                                                   bool hit) {
    const int n = static_cast<int>(tuple.size());
    if (n > 0 && hit) {
      ++out.tuples;
      const double f = phi(n, graph);
      if (f != 0.0) {
        out.per_order[n] += f * prod;
        out.per_order_abs[n] += std::abs(f) * prod_abs;
      }
    }
    if (n == n_max) return;
    for (std::size_t i = 0; i < L; ++i) {
      std::uint32_t g = graph;
      for (int k = 0; k < n; ++k)
        if (inc[tuple[k] * L + i]) g |= 1u << detail::pair_bit(k, n);
      tuple.push_back(i);
      const cplx w = a.w[live[i]];
      rec(g, prod * w, prod_abs * std::abs(w), hit || meets[i]);
      tuple.pop_back();
    }
  };
  rec(0, 1.0, 1.0, !touching.has_value());
  return out;
}

/// Truncated cluster expansion of log Xi(w) in the given family mode.
inline ClusterSums truncated_log_Xi(const std::vector<Polymer>& polymers, const CoarseTorus& ct, const Activity& a,
                                    FamilyMode mode, int n_max, int ursell_cap = kUrsellCap) {
  return cluster_sums(polymers, &ct, a, relation_for(mode), n_max, std::nullopt, ursell_cap);
}

struct KPReport {
  bool pass = true;
  double worst_margin = 0.0;         // min over gamma' of |gamma'|/2 - sum
  std::vector<double> margins;       // per polymer
};

/// For every gamma': sum over gamma incompatible with gamma' of
/// |w(gamma)| e^{|gamma|/2} <= |gamma'|/2.
inline KPReport kp_criterion_check(const std::vector<Polymer>& polymers, const CoarseTorus* ct, const Activity& a,
                                   Incompatibility rel = Incompatibility::intersect) {
  KPReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& gp : polymers) {
    double s = 0.0;
    for (std::size_t i = 0; i < polymers.size(); ++i)
      if (incompatible(ct, polymers[i].sites, gp.sites, rel))
        s += std::abs(a.w[i]) * std::exp(polymers[i].size() / 2.0);
    const double margin = gp.size() / 2.0 - s;
    rep.margins.push_back(margin);
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  if (polymers.empty()) rep.worst_margin = 0.0;
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

/// max over gamma of |w(gamma)| e^{|gamma| s}
inline double decay_constant(const std::vector<Polymer>& polymers, const Activity& a, double s) {
  double C = 0.0;
  for (std::size_t i = 0; i < polymers.size(); ++i)
    C = std::max(C, std::abs(a.w[i]) * std::exp(polymers[i].size() * s));
  return C;
}

inline const double kKPFactor = 1.0 / (1.0 - std::exp(-0.5));

struct VolumeBoundReport {
  double sum_abs = 0.0;  // truncated sum of |phi_n| prod |w|
  std::vector<double> per_order_abs;
  double C = 0.0;        // max |w| e^{|gamma|(1+c)}
  double bound = 0.0;    // C |sites| / (1 - e^{-1/2})
  bool hypothesis = true;  // C / (1 - e^{-1/2}) <= 1/2
  bool pass = true;
};

inline VolumeBoundReport volume_bound_check(const std::vector<Polymer>& polymers, const CoarseTorus& ct,
                                            const Activity& a, Incompatibility rel, int n_max, double c_hat) {
  VolumeBoundReport rep;
  const auto sums = cluster_sums(polymers, &ct, a, rel, n_max);
  rep.sum_abs = sums.total_abs();
  rep.per_order_abs = sums.per_order_abs;
  rep.C = decay_constant(polymers, a, 1.0 + c_hat);
  rep.bound = rep.C * ct.num_sites() * kKPFactor;
  rep.hypothesis = rep.C * kKPFactor <= 0.5;
  rep.pass = rep.sum_abs <= rep.bound;
  return rep;
}

struct IntersectingBoundReport {
  double restricted_abs = 0.0;    // tuples whose union meets A
  double unrestricted_abs = 0.0;
  double averaged = 0.0;          // (|A|/|T|) sum |phi| prod (1+|gamma|)|w|
  double C2 = 0.0;                // max |w| e^{|gamma|(2+c)}
  double c = 0.0;                 // C~ / (1 - e^{-1/2}) for the tilted activity
  double bound = 0.0;             // c |A|
  bool hypothesis = true;         // tilted activity satisfies the convergence hypotheses
  bool pass = true;
};

inline IntersectingBoundReport intersecting_bound_check(const std::vector<Polymer>& polymers, const CoarseTorus& ct,
                                                        const Activity& a, Incompatibility rel, SiteSet A, int n_max,
                                                        double c_hat) {
  IntersectingBoundReport rep;
  rep.restricted_abs = A == 0 ? 0.0 : cluster_sums(polymers, &ct, a, rel, n_max, A).total_abs();
  rep.unrestricted_abs = cluster_sums(polymers, &ct, a, rel, n_max).total_abs();
  const Activity wt = tilted(polymers, a);
  const double tilted_abs = cluster_sums(polymers, &ct, wt, rel, n_max).total_abs();
  rep.averaged = static_cast<double>(site_count(A)) / ct.num_sites() * tilted_abs;
  rep.C2 = decay_constant(polymers, a, 2.0 + c_hat);
  const double Ct = decay_constant(polymers, wt, 1.0 + c_hat);
  rep.c = Ct * kKPFactor;
  rep.bound = rep.c * site_count(A);
  rep.hypothesis = kp_criterion_check(polymers, &ct, wt, rel).pass && Ct * kKPFactor <= 0.5;
  rep.pass = rep.restricted_abs <= rep.bound * (1 + 1e-12);
  return rep;
}

/// How the modified activity w^{gamma-bar} removes polymers relative to a
/// trace T. `compatible` removes the polymers that could not join a family
/// containing T in the chosen mode (those meeting T, or touching it in
/// independent mode); `intersecting` removes only polymers meeting T.
enum class TraceExclusion { compatible, intersecting };

inline SiteSet excluded_sites(const CoarseTorus& ct, SiteSet trace, FamilyMode mode, TraceExclusion how) {
  if (how == TraceExclusion::intersecting) return trace;
  return blocking_set(ct, trace, mode);
}

/// Cluster-expansion form of log(Xi(w^T) / Xi(w)): minus the sum over tuples
/// containing a polymer that meets the excluded set.
inline cplx log_ratio_Xi(const std::vector<Polymer>& polymers, const CoarseTorus& ct, const Activity& a,
                         SiteSet excluded, FamilyMode mode, int n_max) {
  if (excluded == 0) return 0.0;
  return -cluster_sums(polymers, &ct, a, relation_for(mode), n_max, excluded).total();
}

}  // namespace fkan
