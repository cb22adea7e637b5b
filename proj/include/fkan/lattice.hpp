#pragma once

// Graph construction and connectivity primitives: the torus T_N, its coarse
// torus T_N^L with canonical box tiling, boxes Lambda_n, and cluster counts
// under periodic, free, wired or arbitrary boundary conditions.

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fkan/config.hpp"
#include "fkan/error.hpp"
#include "fkan/union_find.hpp"

namespace fkan {

struct Edge {
  int u = 0;
  int v = 0;
  int axis = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple undirected graph, optionally embedded in Z^dim (period 0) or in
/// the torus (Z/period)^dim. Coordinates are stored row-major, dim per vertex.
struct Graph {
  int dim = 0;
  int period = 0;
  int num_vertices = 0;
  std::vector<int> coords;
  std::vector<Edge> edges;
  /// incidence[v] = list of (neighbour, edge index)
  std::vector<std::vector<std::pair<int, int>>> incidence;

  int num_edges() const { return static_cast<int>(edges.size()); }
  bool has_coords() const { return !coords.empty(); }
  int coord(int v, int axis) const { return coords[static_cast<std::size_t>(v) * dim + axis]; }

  void build_incidence() {
    incidence.assign(static_cast<std::size_t>(num_vertices), {});
    for (int e = 0; e < num_edges(); ++e) {
      incidence[edges[e].u].emplace_back(edges[e].v, e);
      incidence[edges[e].v].emplace_back(edges[e].u, e);
    }
  }
};

/// Abstract graph from an explicit edge list (no embedding).
inline Graph make_graph(int num_vertices, const std::vector<std::pair<int, int>>& edge_list) {
  Graph g;
  g.num_vertices = num_vertices;
  for (auto [u, v] : edge_list) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices || u == v)
      throw InvalidArgument("make_graph: bad edge");
    g.edges.push_back({u, v, 0});
  }
  g.build_incidence();
  return g;
}

enum class Boundary { periodic, free, wired };

inline std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::periodic: return "periodic";
    case Boundary::free: return "free";
    case Boundary::wired: return "wired";
  }
  return "?";
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "free") return Boundary::free;
  if (s == "wired") return Boundary::wired;
  throw InvalidArgument("unknown boundary condition: " + s);
}

/// A finite graph together with the vertex identifications induced by the
/// boundary condition: clusters are counted after gluing each pair in `glue`.
struct Region {
  Graph graph;
  Boundary boundary = Boundary::periodic;
  std::vector<std::pair<int, int>> glue;
  int origin = 0;

  /// Number of clusters of the all-closed configuration.
  int base_components() const {
    UnionFind uf(graph.num_vertices);
    for (auto [a, b] : glue) uf.unite(a, b);
    return uf.num_sets();
  }
};

inline Region free_region(Graph g, int origin = 0) {
  Region r;
  r.graph = std::move(g);
  r.boundary = Boundary::free;
  r.origin = origin;
  return r;
}

// ---------------------------------------------------------------------------
// Torus

inline constexpr long long kDefaultEdgeBudget = 1'000'000;

/// The torus T_N = (Z/NZ)^d with lexicographic vertex indexing (axis 0 most
/// significant) and edge index v*d + axis for the edge {v, v + u_axis}.
class TorusGraph {
 public:
  TorusGraph() = default;

  int d() const { return d_; }
  int N() const { return N_; }
  const Graph& graph() const { return graph_; }
  int num_vertices() const { return graph_.num_vertices; }
  int num_edges() const { return graph_.num_edges(); }

  int vertex(std::span<const int> x) const {
    int v = 0;
    for (int i = 0; i < d_; ++i) v = v * N_ + wrap(x[i]);
    return v;
  }
  std::vector<int> coords(int v) const {
    return {graph_.coords.begin() + static_cast<std::ptrdiff_t>(v) * d_,
            graph_.coords.begin() + static_cast<std::ptrdiff_t>(v + 1) * d_};
  }
  int coord(int v, int axis) const { return graph_.coord(v, axis); }
  int edge(int v, int axis) const { return v * d_ + axis; }

  int shift_vertex(int v, std::span<const int> offset) const {
    std::vector<int> x = coords(v);
    for (int i = 0; i < d_; ++i) x[i] += offset[i];
    return vertex(x);
  }
  int shift_edge(int e, std::span<const int> offset) const {
    return edge(shift_vertex(e / d_, offset), e % d_);
  }
  Config shift(const Config& omega, std::span<const int> offset) const {
    Config out(omega.size());
    for (int e = 0; e < num_edges(); ++e)
      if (omega[e]) out.set(shift_edge(e, offset));
    return out;
  }

  int wrap(int x) const { return ((x % N_) + N_) % N_; }

  Region region() const {
    Region r;
    r.graph = graph_;
    r.boundary = Boundary::periodic;
    return r;
  }

  friend TorusGraph build_torus(int d, int N, long long edge_budget);

 private:
  int d_ = 0;
  int N_ = 0;
  Graph graph_;
};

inline TorusGraph build_torus(int d, int N, long long edge_budget = kDefaultEdgeBudget) {
  if (d < 2) throw InvalidArgument("build_torus: dimension must be >= 2");
  if (N < 3) throw InvalidArgument("build_torus: N must be >= 3 (N = 2 creates parallel edges)");
  long long nv = 1;
  for (int i = 0; i < d; ++i) {
    nv *= N;
    if (nv * d > edge_budget) throw BudgetExceeded("build_torus: edge count exceeds budget");
  }
  TorusGraph t;
  t.d_ = d;
  t.N_ = N;
  Graph& g = t.graph_;
  g.dim = d;
  g.period = N;
  g.num_vertices = static_cast<int>(nv);
  g.coords.resize(static_cast<std::size_t>(nv) * d);
  for (int v = 0; v < nv; ++v) {
    int rest = v;
    for (int i = d - 1; i >= 0; --i) {
      g.coords[static_cast<std::size_t>(v) * d + i] = rest % N;
      rest /= N;
    }
  }
  g.edges.reserve(static_cast<std::size_t>(nv) * d);
  std::vector<int> x(d);
  for (int v = 0; v < nv; ++v) {
    for (int i = 0; i < d; ++i) x[i] = g.coords[static_cast<std::size_t>(v) * d + i];
    for (int a = 0; a < d; ++a) {
      x[a] += 1;
      g.edges.push_back({v, t.vertex(x), a});
      x[a] -= 1;
    }
  }
  g.build_incidence();
  return t;
}

// ---------------------------------------------------------------------------
// Coarse torus and canonical boxes

/// Bit set of coarse sites; the coarse torus is limited to 64 sites.
using SiteSet = std::uint64_t;

inline int site_count(SiteSet s) { return std::popcount(s); }

template <class F>
void for_each_site(SiteSet s, F&& f) {
  while (s) {
    const int i = std::countr_zero(s);
    f(i);
    s &= s - 1;
  }
}

inline std::vector<int> sites_of(SiteSet s) {
  std::vector<int> out;
  for_each_site(s, [&](int i) { out.push_back(i); });
  return out;
}

/// Vertices and edges of the canonical box of a coarse site: the vertices
/// y + [-L, L)^d and every edge {x, x + u_i} whose base point x lies there.
struct BoxRegion {
  int center = 0;
  int radius = 0;
  std::vector<int> vertices;
  std::vector<int> edges;
};

/// T_N^L = ((2L)Z)^d ∩ T_N with nearest-neighbour (distance 2L) and star
/// (L-infinity distance 2L) adjacency. Sites are indexed lexicographically by
/// their coarse coordinates.
class CoarseTorus {
 public:
  static constexpr int kMaxSites = 64;

  const TorusGraph& parent() const { return *parent_; }
  int L() const { return L_; }
  int side() const { return M_; }
  int d() const { return parent_->d(); }
  int num_sites() const { return static_cast<int>(site_vertex_.size()); }
  SiteSet all_sites() const { return num_sites() == 64 ? ~SiteSet{0} : (SiteSet{1} << num_sites()) - 1; }

  int site_vertex(int s) const { return site_vertex_[s]; }
  std::vector<int> site_coords(int s) const {
    std::vector<int> c(d());
    for (int i = d() - 1; i >= 0; --i) {
      c[i] = s % M_;
      s /= M_;
    }
    return c;
  }
  int site_index(std::span<const int> c) const {
    int s = 0;
    for (int i = 0; i < d(); ++i) s = s * M_ + ((c[i] % M_) + M_) % M_;
    return s;
  }

  /// Neighbour in each of the 2d lattice directions (with repetition when the
  /// coarse side is 2, and equal to s itself when the side is 1).
  const std::vector<int>& nn_directions(int s) const { return nn_dir_[s]; }
  int nn_degree(int s) const { return static_cast<int>(nn_dir_[s].size()); }
  int star_degree(int s) const { return static_cast<int>(star_dir_[s].size()); }
  /// Distinct nearest neighbours, self-adjacency suppressed.
  SiteSet neighbours(int s) const { return nn_mask_[s]; }
  SiteSet star_neighbours(int s) const { return star_mask_[s]; }
  bool adjacent(int a, int b) const { return (nn_mask_[a] >> b) & 1u; }

  /// Sites adjacent to some site of S, excluding S.
  SiteSet boundary(SiteSet S) const {
    SiteSet out = 0;
    for_each_site(S, [&](int i) { out |= nn_mask_[i]; });
    return out & ~S;
  }
  SiteSet closed_neighbourhood(SiteSet S) const { return S | boundary(S); }

  bool connected(SiteSet S) const {
    if (S == 0) return false;
    SiteSet reached = S & (~S + 1);
    SiteSet frontier = reached;
    while (frontier) {
      SiteSet next = 0;
      for_each_site(frontier, [&](int i) { next |= nn_mask_[i]; });
      next &= S & ~reached;
      reached |= next;
      frontier = next;
    }
    return reached == S;
  }

  /// Coarse site whose canonical box contains torus vertex v.
  int site_of_vertex(int v) const {
    int s = 0;
    for (int i = 0; i < d(); ++i) {
      const int x = parent_->coord(v, i);
      s = s * M_ + ((x + L_) / (2 * L_)) % M_;
    }
    return s;
  }
  int site_of_edge(int e) const { return edge_site_[e]; }
  const BoxRegion& box(int s) const { return boxes_[s]; }

  /// Coarse sites whose canonical boxes contain at least one of the edges.
  template <class Range>
  SiteSet coarse_support(const Range& edges) const {
    SiteSet out = 0;
    for (auto e : edges) out |= SiteSet{1} << edge_site_[e];
    return out;
  }

  SiteSet shift(SiteSet S, std::span<const int> offset) const {
    SiteSet out = 0;
    for_each_site(S, [&](int i) {
      auto c = site_coords(i);
      for (int a = 0; a < d(); ++a) c[a] += offset[a];
      out |= SiteSet{1} << site_index(c);
    });
    return out;
  }

  friend CoarseTorus build_coarse(const TorusGraph& parent, int L);

 private:
  const TorusGraph* parent_ = nullptr;
  int L_ = 0;
  int M_ = 0;
  std::vector<int> site_vertex_;
  std::vector<std::vector<int>> nn_dir_;
  std::vector<std::vector<int>> star_dir_;
  std::vector<SiteSet> nn_mask_;
  std::vector<SiteSet> star_mask_;
  std::vector<int> edge_site_;
  std::vector<BoxRegion> boxes_;
};

/// The coarse torus keeps a pointer to `parent`, which must outlive it.
inline CoarseTorus build_coarse(const TorusGraph& parent, int L) {
  if (L < 1) throw InvalidArgument("build_coarse: L must be >= 1");
  if (parent.N() % (2 * L) != 0) throw InvalidArgument("build_coarse: 2L must divide N");
  CoarseTorus ct;
  ct.parent_ = &parent;
  ct.L_ = L;
  ct.M_ = parent.N() / (2 * L);
  const int d = parent.d();
  long long count = 1;
  for (int i = 0; i < d; ++i) count *= ct.M_;
  if (count > CoarseTorus::kMaxSites) throw BudgetExceeded("build_coarse: more than 64 coarse sites");
  const int n = static_cast<int>(count);
  ct.site_vertex_.resize(n);
  ct.nn_dir_.resize(n);
  ct.star_dir_.resize(n);
  ct.nn_mask_.assign(n, 0);
  ct.star_mask_.assign(n, 0);
  for (int s = 0; s < n; ++s) {
    auto c = ct.site_coords(s);
    std::vector<int> x(d);
    for (int i = 0; i < d; ++i) x[i] = c[i] * 2 * L;
    ct.site_vertex_[s] = parent.vertex(x);
    for (int a = 0; a < d; ++a) {
      for (int sign : {+1, -1}) {
        auto nc = c;
        nc[a] += sign;
        const int t = ct.site_index(nc);
        ct.nn_dir_[s].push_back(t);
        if (t != s) ct.nn_mask_[s] |= SiteSet{1} << t;
      }
    }
    // star directions: offsets in {-1,0,1}^d minus the origin
    std::vector<int> off(d, -1);
    while (true) {
      if (std::any_of(off.begin(), off.end(), [](int o) { return o != 0; })) {
        auto nc = c;
        for (int a = 0; a < d; ++a) nc[a] += off[a];
        const int t = ct.site_index(nc);
        ct.star_dir_[s].push_back(t);
        if (t != s) ct.star_mask_[s] |= SiteSet{1} << t;
      }
      int a = 0;
      while (a < d && off[a] == 1) off[a++] = -1;
      if (a == d) break;
      ++off[a];
    }
  }
  ct.boxes_.resize(n);
  for (int s = 0; s < n; ++s) {
    ct.boxes_[s].center = ct.site_vertex_[s];
    ct.boxes_[s].radius = L;
  }
  for (int v = 0; v < parent.num_vertices(); ++v) ct.boxes_[ct.site_of_vertex(v)].vertices.push_back(v);
  ct.edge_site_.resize(static_cast<std::size_t>(parent.num_edges()));
  for (int e = 0; e < parent.num_edges(); ++e) {
    const int s = ct.site_of_vertex(parent.graph().edges[e].u);
    ct.edge_site_[e] = s;
    ct.boxes_[s].edges.push_back(e);
  }
  return ct;
}

// ---------------------------------------------------------------------------
// Boxes Lambda_n

/// The box [-n, n]^d of Z^d as a stand-alone graph. Free boundary leaves it
/// as is; wired boundary glues every vertex with a coordinate equal to +-n
/// (the outside of a box in Z^d is connected, so xi = 1 glues the whole
/// inner boundary into one cluster). The origin is the centre vertex.
inline Region make_box(int d, int n, Boundary boundary) {
  if (d < 1 || n < 0) throw InvalidArgument("make_box: bad geometry");
  if (boundary == Boundary::periodic) throw InvalidArgument("make_box: a box has free or wired boundary");
  const int side = 2 * n + 1;
  int nv = 1;
  for (int i = 0; i < d; ++i) nv *= side;
  Region r;
  r.boundary = boundary;
  Graph& g = r.graph;
  g.dim = d;
  g.period = 0;
  g.num_vertices = nv;
  g.coords.resize(static_cast<std::size_t>(nv) * d);
  for (int v = 0; v < nv; ++v) {
    int rest = v;
    for (int i = d - 1; i >= 0; --i) {
      g.coords[static_cast<std::size_t>(v) * d + i] = rest % side - n;
      rest /= side;
    }
  }
  auto index = [&](const std::vector<int>& x) {
    int v = 0;
    for (int i = 0; i < d; ++i) v = v * side + (x[i] + n);
    return v;
  };
  std::vector<int> x(d);
  for (int v = 0; v < nv; ++v) {
    for (int i = 0; i < d; ++i) x[i] = g.coord(v, i);
    for (int a = 0; a < d; ++a) {
      if (x[a] == n) continue;
      x[a] += 1;
      g.edges.push_back({v, index(x), a});
      x[a] -= 1;
    }
  }
  g.build_incidence();
  r.origin = index(std::vector<int>(d, 0));
  if (boundary == Boundary::wired) {
    int first = -1;
    for (int v = 0; v < nv; ++v) {
      bool on_boundary = false;
      for (int i = 0; i < d; ++i) on_boundary |= std::abs(g.coord(v, i)) == n;
      if (!on_boundary) continue;
      if (first < 0)
        first = v;
      else
        r.glue.emplace_back(first, v);
    }
  }
  return r;
}

/// Vertices of Lambda_n(center) inside the torus, i.e. L-infinity distance <= n.
inline std::vector<int> torus_box_vertices(const TorusGraph& t, int center, int n) {
  if (2 * n + 1 > t.N()) throw GeometryError("torus box does not fit: 2n+1 > N");
  std::vector<int> out;
  for (int v = 0; v < t.num_vertices(); ++v) {
    bool inside = true;
    for (int i = 0; i < t.d() && inside; ++i) {
      int delta = t.wrap(t.coord(v, i) - t.coord(center, i));
      if (delta > t.N() / 2) delta -= t.N();
      inside = std::abs(delta) <= n;
    }
    if (inside) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cluster counts

/// k(omega): number of connected components of the open subgraph on all vertices.
inline int cluster_count(const Graph& g, const Config& omega) {
  UnionFind uf(g.num_vertices);
  for (int e = 0; e < g.num_edges(); ++e)
    if (omega[e]) uf.unite(g.edges[e].u, g.edges[e].v);
  return uf.num_sets();
}

/// Cluster count after gluing according to the region's boundary condition.
inline int cluster_count(const Region& r, const Config& omega) {
  UnionFind uf(r.graph.num_vertices);
  for (auto [a, b] : r.glue) uf.unite(a, b);
  for (int e = 0; e < r.graph.num_edges(); ++e)
    if (omega[e]) uf.unite(r.graph.edges[e].u, r.graph.edges[e].v);
  return uf.num_sets();
}

/// k^xi_G(omega): clusters of omega on E(G) together with xi on the remaining
/// edges of the ambient graph, counted when they intersect V(G). E(G) is the
/// set of edges with both endpoints in V(G).
inline int cluster_count_bc(const Graph& ambient, std::span<const int> region_vertices, const Config& omega,
                            const Config& xi) {
  std::vector<char> inside(static_cast<std::size_t>(ambient.num_vertices), 0);
  for (int v : region_vertices) inside[v] = 1;
  UnionFind uf(ambient.num_vertices);
  for (int e = 0; e < ambient.num_edges(); ++e) {
    const auto& ed = ambient.edges[e];
    const bool internal = inside[ed.u] && inside[ed.v];
    if (internal ? omega[e] : xi[e]) uf.unite(ed.u, ed.v);
  }
  std::vector<char> seen(static_cast<std::size_t>(ambient.num_vertices), 0);
  int count = 0;
  for (int v : region_vertices) {
    const int root = uf.find(v);
    if (!seen[root]) {
      seen[root] = 1;
      ++count;
    }
  }
  return count;
}

/// Sub-region of an ambient graph with boundary condition xi: the induced
/// graph on `vertices` plus the gluing that xi creates through outside edges.
/// cluster_count(result, omega|E(G)) equals cluster_count_bc(...).
inline Region subregion(const Graph& ambient, std::span<const int> vertices, const Config& xi, Boundary tag) {
  std::vector<int> local(static_cast<std::size_t>(ambient.num_vertices), -1);
  Region r;
  r.boundary = tag;
  Graph& g = r.graph;
  g.dim = ambient.dim;
  g.period = 0;
  g.num_vertices = static_cast<int>(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    local[vertices[i]] = static_cast<int>(i);
    if (ambient.has_coords())
      for (int a = 0; a < ambient.dim; ++a) g.coords.push_back(ambient.coord(vertices[i], a));
  }
  UnionFind outside(ambient.num_vertices);
  for (int e = 0; e < ambient.num_edges(); ++e) {
    const auto& ed = ambient.edges[e];
    if (local[ed.u] >= 0 && local[ed.v] >= 0)
      g.edges.push_back({local[ed.u], local[ed.v], ed.axis});
    else if (xi[e])
      outside.unite(ed.u, ed.v);
  }
  g.build_incidence();
  std::vector<int> first(static_cast<std::size_t>(ambient.num_vertices), -1);
  for (int v : vertices) {
    const int root = outside.find(v);
    if (first[root] < 0)
      first[root] = local[v];
    else
      r.glue.emplace_back(first[root], local[v]);
  }
  return r;
}

/// Cluster label per vertex (smallest vertex index of the cluster).
inline std::vector<int> cluster_labels(const Graph& g, const Config& omega) {
  UnionFind uf(g.num_vertices);
  for (int e = 0; e < g.num_edges(); ++e)
    if (omega[e]) uf.unite(g.edges[e].u, g.edges[e].v);
  std::vector<int> label(static_cast<std::size_t>(g.num_vertices), -1);
  std::vector<int> root_label(static_cast<std::size_t>(g.num_vertices), -1);
  for (int v = 0; v < g.num_vertices; ++v) {
    const int r = uf.find(v);
    if (root_label[r] < 0) root_label[r] = v;
    label[v] = root_label[r];
  }
  return label;
}

}  // namespace fkan
