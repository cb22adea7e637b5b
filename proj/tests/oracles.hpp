#pragma once

// Independent reference computations used only by the tests. None of these
// share code paths with the library beyond the plain graph containers.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "fkan/lattice.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// Number of connected components of (V, open edges), with extra glue pairs,
/// by depth-first search.
inline int components(int V, const std::vector<std::pair<int, int>>& edges, std::uint64_t mask,
                      const std::vector<std::pair<int, int>>& glue = {}) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(V));
  for (std::size_t i = 0; i < edges.size(); ++i)
    if ((mask >> i) & 1u) {
      adj[edges[i].first].push_back(edges[i].second);
      adj[edges[i].second].push_back(edges[i].first);
    }
  for (auto [a, b] : glue) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(static_cast<std::size_t>(V), 0);
  int k = 0;
  for (int s = 0; s < V; ++s) {
    if (seen[s]) continue;
    ++k;
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
  }
  return k;
}

/// Sorted vertex list of the component of `origin`, glue pairs included.
inline std::vector<int> component_of(int V, const std::vector<std::pair<int, int>>& edges, std::uint64_t mask,
                                     int origin, const std::vector<std::pair<int, int>>& glue = {}) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(V));
  for (std::size_t i = 0; i < edges.size(); ++i)
    if ((mask >> i) & 1u) {
      adj[edges[i].first].push_back(edges[i].second);
      adj[edges[i].second].push_back(edges[i].first);
    }
  for (auto [a, b] : glue) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(static_cast<std::size_t>(V), 0);
  std::vector<int> stack{origin}, out;
  seen[origin] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline int component_size(int V, const std::vector<std::pair<int, int>>& edges, std::uint64_t mask, int origin,
                          const std::vector<std::pair<int, int>>& glue = {}) {
  return static_cast<int>(component_of(V, edges, mask, origin, glue).size());
}

inline std::vector<std::pair<int, int>> edge_pairs(const fkan::Graph& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : g.edges) out.emplace_back(e.u, e.v);
  return out;
}

/// phi_{p+z}[F] by summing (p+z)^m (1-p-z)^{E-m} q^k over all 2^E configurations.
inline cplx fk_expectation(const fkan::Region& r, const std::function<double(std::uint64_t)>& F, double p, double q,
                           cplx z) {
  const auto edges = edge_pairs(r.graph);
  const int E = static_cast<int>(edges.size());
  const cplx pz = p + z;
  cplx num = 0.0, den = 0.0;
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << E); ++w) {
    const int m = std::popcount(w);
    const int k = components(r.graph.num_vertices, edges, w, r.glue);
    const cplx weight = std::pow(pz, m) * std::pow(1.0 - pz, E - m) * std::pow(q, k);
    num += F(w) * weight;
    den += weight;
  }
  return num / den;
}

/// Real FK law of every configuration (index = edge bitmask).
inline std::vector<double> fk_law(const fkan::Region& r, double p, double q) {
  const auto edges = edge_pairs(r.graph);
  const int E = static_cast<int>(edges.size());
  std::vector<double> law(std::size_t{1} << E);
  double Z = 0.0;
  for (std::uint64_t w = 0; w < law.size(); ++w) {
    const int m = std::popcount(w);
    law[w] = std::pow(p, m) * std::pow(1.0 - p, E - m) * std::pow(q, components(r.graph.num_vertices, edges, w, r.glue));
    Z += law[w];
  }
  for (auto& v : law) v /= Z;
  return law;
}

// ---------------------------------------------------------------------------
// Lattice animals in Z^d by level-wise growth with deduplication.

using Cell = std::vector<int>;
using CellSet = std::set<Cell>;

inline std::vector<CellSet> animals_containing_origin(int d, int max_n) {
  std::vector<CellSet> out;
  std::set<CellSet> level{CellSet{Cell(static_cast<std::size_t>(d), 0)}};
  for (int n = 1; n <= max_n; ++n) {
    for (const auto& a : level) out.push_back(a);
    if (n == max_n) break;
    std::set<CellSet> next;
    for (const auto& a : level)
      for (const auto& c : a)
        for (int ax = 0; ax < d; ++ax)
          for (int s : {-1, 1}) {
            Cell nb = c;
            nb[ax] += s;
            if (a.count(nb)) continue;
            CellSet b = a;
            b.insert(nb);
            next.insert(std::move(b));
          }
    level = std::move(next);
  }
  return out;
}

/// Number of connected sets of n cells containing the origin.
inline std::vector<std::uint64_t> anchored_counts(int d, int max_n) {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(max_n) + 1, 0);
  for (const auto& a : animals_containing_origin(d, max_n)) ++c[a.size()];
  return c;
}

// ---------------------------------------------------------------------------
// Bernoulli cluster of the origin in Z^2 by enumerating connected bond sets.

/// P[C_0 = S] summed by vertex count, via connected edge sets B containing
/// the origin: weight p^|B| (1-p)^{(edges touching V(B)) - |B|}.
inline std::vector<cplx> bernoulli_cluster_size_law(cplx p, int max_n) {
  using E2 = std::array<int, 4>;  // x1 y1 x2 y2 with (x1,y1) < (x2,y2)
  auto norm = [](int a, int b, int c, int d) {
    if (std::make_pair(a, b) > std::make_pair(c, d)) return E2{c, d, a, b};
    return E2{a, b, c, d};
  };
  std::vector<cplx> law(static_cast<std::size_t>(max_n) + 1, 0.0);
  law[1] = std::pow(1.0 - p, 4);
  std::set<std::set<E2>> level;
  for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) level.insert({norm(0, 0, dx, dy)});
  while (!level.empty()) {
    std::set<std::set<E2>> next;
    for (const auto& B : level) {
      std::set<std::pair<int, int>> verts;
      for (const auto& e : B) {
        verts.insert({e[0], e[1]});
        verts.insert({e[2], e[3]});
      }
      const int n = static_cast<int>(verts.size());
      if (n > max_n) continue;
      std::set<E2> touching;
      for (auto [x, y] : verts)
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) touching.insert(norm(x, y, x + dx, y + dy));
      const int closed = static_cast<int>(touching.size() - B.size());
      law[n] += std::pow(p, static_cast<int>(B.size())) * std::pow(1.0 - p, closed);
      for (const auto& e : touching) {
        if (B.count(e)) continue;
        std::set<E2> B2 = B;
        B2.insert(e);
        std::set<std::pair<int, int>> v2 = verts;
        v2.insert({e[0], e[1]});
        v2.insert({e[2], e[3]});
        if (static_cast<int>(v2.size()) <= max_n) next.insert(std::move(B2));
      }
    }
    level = std::move(next);
  }
  return law;
}

// ---------------------------------------------------------------------------
// Coarse torus polymers by subset filtering.

/// Nearest-neighbour adjacency of the sites of (Z/M)^d from coordinates.
inline bool coarse_adjacent(int d, int M, int a, int b) {
  if (a == b) return false;
  int diff_axes = 0;
  bool unit = true;
  for (int i = 0; i < d; ++i) {
    const int ca = a % M, cb = b % M;
    a /= M;
    b /= M;
    if (ca == cb) continue;
    ++diff_axes;
    const int delta = ((ca - cb) % M + M) % M;
    unit = unit && (delta == 1 || delta == M - 1);
  }
  return diff_axes == 1 && unit;
}

inline bool connected_subset(int d, int M, std::uint64_t S) {
  if (S == 0) return false;
  const int n = 64 - std::countl_zero(S);
  std::uint64_t reached = S & (~S + 1), frontier = reached;
  while (frontier) {
    std::uint64_t next = 0;
    for (int a = 0; a < n; ++a)
      if ((frontier >> a) & 1u)
        for (int b = 0; b < n; ++b)
          if (((S >> b) & 1u) && !((reached >> b) & 1u) && coarse_adjacent(d, M, a, b)) next |= std::uint64_t{1} << b;
    reached |= next;
    frontier = next;
  }
  return reached == S;
}

/// All connected subsets of the sites of (Z/M)^d with at most max_size sites.
inline std::vector<std::uint64_t> polymers(int d, int M, int max_size) {
  int n = 1;
  for (int i = 0; i < d; ++i) n *= M;
  std::vector<std::uint64_t> out;
  for (std::uint64_t S = 1; S < (std::uint64_t{1} << n); ++S)
    if (std::popcount(S) <= max_size && connected_subset(d, M, S)) out.push_back(S);
  return out;
}

/// Independent-mode compatibility: no shared and no adjacent sites.
inline bool independent(int d, int M, std::uint64_t a, std::uint64_t b) {
  if (a & b) return false;
  for (int i = 0; i < 64; ++i)
    if ((a >> i) & 1u)
      for (int j = 0; j < 64; ++j)
        if (((b >> j) & 1u) && coarse_adjacent(d, M, i, j)) return false;
  return true;
}

/// Xi = sum over families of pairwise compatible polymers of prod w, by
/// filtering every subset of the polymer list.
inline cplx polymer_partition_function(int d, int M, const std::vector<std::uint64_t>& polys,
                                       const std::vector<cplx>& w, bool independent_mode) {
  const std::size_t n = polys.size();
  if (n > 24) throw std::runtime_error("oracle: too many polymers");
  cplx total = 0.0;
  for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << n); ++fam) {
    bool ok = true;
    cplx prod = 1.0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!((fam >> i) & 1u)) continue;
      prod *= w[i];
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if ((fam >> j) & 1u)
          ok = independent_mode ? independent(d, M, polys[i], polys[j]) : (polys[i] & polys[j]) == 0;
    }
    if (ok) total += prod;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Ursell function from the definition: (1/n!) sum over connected spanning
// subgraphs of the incompatibility graph of (-1)^{#edges}.

inline double ursell(int n, const std::function<bool(int, int)>& incompatible) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (incompatible(i, j)) pairs.emplace_back(i, j);
  double s = 0.0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << pairs.size()); ++m) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if ((m >> i) & 1u) edges.push_back(pairs[i]);
    if (components(n, edges, (std::uint64_t{1} << edges.size()) - 1) == 1) s += (edges.size() % 2 ? -1.0 : 1.0);
  }
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return s / f;
}

// ---------------------------------------------------------------------------
// Bernoulli P[0 <-> boundary of [-n,n]^2] by a row-by-row frontier recursion.

/// Linear-probing map from nonzero-ish 64-bit keys to probabilities.
class ProbTable {
 public:
  explicit ProbTable(std::size_t expected = 16) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    keys_.assign(cap, kEmpty);
    vals_.assign(cap, 0.0);
  }
  void add(std::uint64_t key, double v) {
    if (2 * (size_ + 1) > keys_.size()) grow();
    std::size_t i = slot(key);
    if (keys_[i] == kEmpty) {
      keys_[i] = key;
      ++size_;
    }
    vals_[i] += v;
  }
  std::size_t size() const { return size_; }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != kEmpty) f(keys_[i], vals_[i]);
  }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
  std::size_t slot(std::uint64_t key) const {
    std::uint64_t h = key * 0x9e3779b97f4a7c15ull;
    std::size_t i = static_cast<std::size_t>(h >> 20) & (keys_.size() - 1);
    while (keys_[i] != kEmpty && keys_[i] != key) i = (i + 1) & (keys_.size() - 1);
    return i;
  }
  void grow() {
    ProbTable bigger(keys_.size());
    for_each([&](std::uint64_t k, double v) { bigger.add(k, v); });
    *this = std::move(bigger);
  }
  std::vector<std::uint64_t> keys_;
  std::vector<double> vals_;
  std::size_t size_ = 0;
};

/// Vertices are added in row-major order. A state records, for the last
/// 2n+1 added vertices, a component label (0 = joined to the boundary), and
/// the origin's label (15 before the origin is added), packed 4 bits each.
/// States in which the origin joins the boundary are absorbed as successes;
/// states in which the origin's component leaves the frontier are dropped.
inline double bernoulli_box_crossing(int n, double p) {
  const int W = 2 * n + 1;
  if (W > 13) throw std::runtime_error("oracle: box too wide");
  constexpr int kUnseen = 15;
  struct Unpacked {
    std::array<int, 14> lab{};
    int origin = kUnseen;
  };
  auto unpack = [W](std::uint64_t key) {
    Unpacked u;
    for (int i = 0; i < W; ++i) u.lab[i] = static_cast<int>((key >> (4 * i)) & 15u);
    u.origin = static_cast<int>((key >> (4 * W)) & 15u);
    return u;
  };
  auto pack = [W](const Unpacked& u) {
    std::array<int, 32> re;
    re.fill(-1);
    re[0] = 0;
    int next = 1;
    std::uint64_t key = 0;
    for (int i = 0; i < W; ++i) {
      int& r = re[u.lab[i]];
      if (r < 0) r = next++;
      key |= static_cast<std::uint64_t>(r) << (4 * i);
    }
    const int o = u.origin == kUnseen ? kUnseen : re[u.origin];
    return key | static_cast<std::uint64_t>(o) << (4 * W);
  };
  // first row: every vertex is a boundary vertex, joined through label 0
  Unpacked first;
  ProbTable cur;
  cur.add(pack(first), 1.0);
  double success = 0.0;
  for (int y = -n + 1; y <= n; ++y)
    for (int x = -n; x <= n; ++x) {
      const int col = x + n;
      const bool boundary = y == n || x == -n || x == n;
      const bool is_origin = x == 0 && y == 0;
      ProbTable nxt(cur.size() * 2);
      cur.for_each([&](std::uint64_t key, double pr) {
        const Unpacked s = unpack(key);
        for (int up = 0; up < 2; ++up)
          for (int left = 0; left < 2; ++left) {
            if (left && x == -n) continue;
            double w = pr * (up ? p : 1.0 - p);
            if (x > -n) w *= left ? p : 1.0 - p;
            Unpacked t = s;
            int vlabel = boundary ? 0 : 16;  // fresh label
            if (is_origin) t.origin = vlabel;
            auto merge = [&](int a, int b) {
              if (a == b) return;
              const int keep = (a == 0 || b == 0) ? 0 : std::min(a, b);
              const int drop = keep == a ? b : a;
              for (int i = 0; i < W; ++i)
                if (t.lab[i] == drop) t.lab[i] = keep;
              if (vlabel == drop) vlabel = keep;
              if (t.origin == drop) t.origin = keep;
            };
            if (up) merge(t.lab[col], vlabel);
            if (left) merge(t.lab[col - 1], vlabel);
            // the vertex above leaves the frontier
            t.lab[col] = vlabel;
            if (t.origin == 0) {
              success += w;
              continue;
            }
            if (t.origin != kUnseen && std::find(t.lab.begin(), t.lab.begin() + W, t.origin) == t.lab.begin() + W)
              continue;
            nxt.add(pack(t), w);
          }
      });
      cur = std::move(nxt);
    }
  return success;
}

}  // namespace oracle
