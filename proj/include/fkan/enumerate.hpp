#pragma once

// Exhaustive configuration enumeration. Every configuration on a region is
// visited by a depth-first walk over the edges with a rollback union-find, and
// mapped to an integer key that is accumulated into a count vector:
//
//   key = initial + sum over open edges of stride[i] - (number of merges) * merge
//
// With merge = 1 and the cluster count in the lowest digit this yields joint
// counts by (pattern, open edges, clusters) in a single pass.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "fkan/config.hpp"
#include "fkan/error.hpp"
#include "fkan/lattice.hpp"
#include "fkan/union_find.hpp"

namespace fkan {

inline constexpr int kDefaultEnumerationBudget = 26;
/// Hard limit regardless of the requested budget (2^36 configurations).
inline constexpr int kHardEnumerationCap = 36;

struct EnumOptions {
  int edge_budget = kDefaultEnumerationBudget;
  int threads = 0;  // 0 = hardware concurrency
};

struct EnumerationPlan {
  std::vector<int> order;            // edge indices in visiting order
  std::vector<std::uint64_t> stride;  // key increment when order[i] is open
  std::uint64_t merge = 1;            // key decrement per merge
  std::uint64_t initial = 0;
  std::size_t key_space = 0;
};

/// Leaf hook that adds nothing to the key.
struct NoExtra {
  static constexpr bool needs_uf = false;
  std::uint64_t operator()(const RollbackUnionFind&) const { return 0; }
};

inline void check_budget(int num_edges, const EnumOptions& opt) {
  if (num_edges > std::min(opt.edge_budget, kHardEnumerationCap))
    throw BudgetExceeded("enumeration of " + std::to_string(num_edges) + " edges exceeds budget of " +
                         std::to_string(std::min(opt.edge_budget, kHardEnumerationCap)));
}

namespace detail {

template <class Extra>
class KeyDfs {
 public:
  KeyDfs(const Region& r, const EnumerationPlan& plan, const Extra& extra, std::uint64_t* counts)
      : uf_(r.graph.num_vertices), plan_(plan), extra_(extra), counts_(counts) {
    for (auto [a, b] : r.glue) uf_.unite(a, b);
    const auto n = plan.order.size();
    eu_.resize(n);
    ev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      eu_[i] = r.graph.edges[plan.order[i]].u;
      ev_[i] = r.graph.edges[plan.order[i]].v;
    }
    n_ = static_cast<int>(n);
  }

  /// Enumerate all completions of the prefix mask over the first `depth` edges.
  void run_prefix(int depth, std::uint64_t prefix) {
    std::uint64_t key = plan_.initial;
    int merges = 0;
    for (int i = 0; i < depth; ++i) {
      if ((prefix >> i) & 1u) {
        key += plan_.stride[i];
        if (uf_.unite(eu_[i], ev_[i])) {
          key -= plan_.merge;
          ++merges;
        }
      }
    }
    visit(depth, key);
    for (int i = 0; i < merges; ++i) uf_.rollback();
  }

 private:
  void visit(int i, std::uint64_t key) {
    if (i == n_) {
      if constexpr (Extra::needs_uf)
        ++counts_[key + extra_(uf_)];
      else
        ++counts_[key];
      return;
    }
    if constexpr (!Extra::needs_uf) {
      if (i == n_ - 1) {
        ++counts_[key];
        const bool merges = uf_.find(eu_[i]) != uf_.find(ev_[i]);
        ++counts_[key + plan_.stride[i] - (merges ? plan_.merge : 0)];
        return;
      }
    }
    visit(i + 1, key);
    if (uf_.unite(eu_[i], ev_[i])) {
      visit(i + 1, key + plan_.stride[i] - plan_.merge);
      uf_.rollback();
    } else {
      visit(i + 1, key + plan_.stride[i]);
    }
  }

  RollbackUnionFind uf_;
  const EnumerationPlan& plan_;
  const Extra& extra_;
  std::uint64_t* counts_;
  std::vector<int> eu_, ev_;
  int n_ = 0;
};

}  // namespace detail

/// Runs the plan over every configuration of the region's edges. The plan
/// must list every edge exactly once. Work is split over prefix masks of the
/// first few edges; each thread keeps its own count vector.
template <class Extra = NoExtra>
std::vector<std::uint64_t> enumerate_keys(const Region& r, const EnumerationPlan& plan, const EnumOptions& opt = {},
                                          const Extra& extra = {}) {
  const int E = r.graph.num_edges();
  check_budget(E, opt);
  if (static_cast<int>(plan.order.size()) != E || plan.stride.size() != plan.order.size())
    throw InvalidArgument("enumerate_keys: plan must cover every edge");
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int prefix_depth = 0;
  while (prefix_depth < E && prefix_depth < 12 && (1 << prefix_depth) < 8 * threads) ++prefix_depth;
  const std::uint64_t tasks = std::uint64_t{1} << prefix_depth;
  threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), tasks));

  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(threads));
  auto worker = [&](int t) {
    partial[t].assign(plan.key_space, 0);
    detail::KeyDfs<Extra> dfs(r, plan, extra, partial[t].data());
    for (std::uint64_t task = static_cast<std::uint64_t>(t); task < tasks; task += static_cast<std::uint64_t>(threads))
      dfs.run_prefix(prefix_depth, task);
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  std::vector<std::uint64_t> counts = std::move(partial[0]);
  for (int t = 1; t < threads; ++t)
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += partial[t][i];
  return counts;
}

/// Calls visit(omega, uf) for every configuration; slow, intended for small
/// graphs and oracles.
inline void for_each_config(const Region& r, const std::function<void(const Config&, UnionFind&)>& visit,
                            const EnumOptions& opt = {}) {
  const int E = r.graph.num_edges();
  check_budget(E, opt);
  if (E > 30) throw BudgetExceeded("for_each_config: too many edges");
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << E); ++bits) {
    Config omega = Config::from_bits(static_cast<std::size_t>(E), bits);
    UnionFind uf(r.graph.num_vertices);
    for (auto [a, b] : r.glue) uf.unite(a, b);
    for (int e = 0; e < E; ++e)
      if ((bits >> e) & 1u) uf.unite(r.graph.edges[e].u, r.graph.edges[e].v);
    visit(omega, uf);
  }
}

}  // namespace fkan
