#pragma once

// Heat-bath Glauber dynamics for FK-percolation, monotone coupling from the
// past, cluster geometry, and Monte Carlo estimators for box events.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fkan/config.hpp"
#include "fkan/error.hpp"
#include "fkan/lattice.hpp"
#include "fkan/rng.hpp"
#include "fkan/union_find.hpp"

namespace fkan {

/// Probability that the heat-bath update opens an edge.
inline double open_probability(double p, double q, bool connected_off_edge) {
  return connected_off_edge ? p : p / (p + q * (1.0 - p));
}

/// Single-edge heat-bath dynamics on a region. Connectivity off the updated
/// edge is decided by BFS, where glued vertices count as connected.
class HeatBath {
 public:
  HeatBath(Region r, double p, double q) : r_(std::move(r)), p_(p), q_(q) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("HeatBath: p must lie in (0,1)");
    if (q < 1.0) throw InvalidArgument("HeatBath: q must be >= 1 for monotone dynamics");
    low_ = open_probability(p, q, false);
    const int V = r_.graph.num_vertices;
    glue_class_.assign(static_cast<std::size_t>(V), -1);
    if (!r_.glue.empty()) {
      UnionFind uf(V);
      for (auto [a, b] : r_.glue) uf.unite(a, b);
      std::vector<int> class_of_root(static_cast<std::size_t>(V), -1);
      for (int v = 0; v < V; ++v) {
        const int root = uf.find(v);
        if (uf.set_size(root) < 2) continue;
        if (class_of_root[root] < 0) {
          class_of_root[root] = static_cast<int>(classes_.size());
          classes_.emplace_back();
        }
        glue_class_[v] = class_of_root[root];
        classes_[class_of_root[root]].push_back(v);
      }
    }
    mark_.assign(static_cast<std::size_t>(V), 0);
    class_mark_.assign(classes_.size(), 0);
  }

  const Region& region() const { return r_; }
  double p() const { return p_; }
  double q() const { return q_; }

  /// Are the endpoints of e joined by open edges other than e (or by glue)?
  bool connected_off(const Config& omega, int e) {
    const auto& ed = r_.graph.edges[e];
    if (ed.u == ed.v) return true;
    if (++stamp_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      std::fill(class_mark_.begin(), class_mark_.end(), 0);
      stamp_ = 1;
    }
    queue_.clear();
    auto push = [&](int v) {
      if (mark_[v] == stamp_) return;
      mark_[v] = stamp_;
      queue_.push_back(v);
      const int c = glue_class_[v];
      if (c >= 0 && class_mark_[c] != stamp_) {
        class_mark_[c] = stamp_;
        for (int w : classes_[c])
          if (mark_[w] != stamp_) {
            mark_[w] = stamp_;
            queue_.push_back(w);
          }
      }
    };
    push(ed.u);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int v = queue_[head];
      if (v == ed.v) return true;
      for (auto [w, f] : r_.graph.incidence[v])
        if (f != e && omega[f]) push(w);
    }
    return false;
  }

  /// Resample edge e given the rest of omega, using the uniform draw u.
  void step(Config& omega, int e, double u) {
    if (u < low_) {
      omega.set(e, true);
    } else if (u >= p_) {
      omega.set(e, false);
    } else {
      omega.set(e, connected_off(omega, e));
    }
  }

 private:
  Region r_;
  double p_, q_, low_;
  std::vector<int> glue_class_;
  std::vector<std::vector<int>> classes_;
  std::vector<std::uint32_t> mark_, class_mark_;
  std::uint32_t stamp_ = 0;
  std::vector<int> queue_;
};

/// One heat-bath update of `edge` with uniform draw `u`.
inline void heat_bath_step(const Region& r, Config& omega, int edge, double u, double p, double q) {
  HeatBath hb(r, p, q);
  hb.step(omega, edge, u);
}

struct CftpOptions {
  std::uint64_t initial_horizon = 0;  // 0 = 4 |E|
  std::uint64_t max_horizon = std::uint64_t{1} << 28;
};

struct CftpResult {
  Config sample;
  std::uint64_t horizon = 0;
};

/// Exact sample by monotone coupling from the past with random single-edge
/// updates. The update at time -t uses counters 2t and 2t+1 of the
/// (seed, stream) generator, so doubling the horizon reuses all earlier draws.
inline CftpResult cftp_sample(HeatBath& hb, std::uint64_t seed, std::uint64_t stream = 0,
                              const CftpOptions& opt = {}) {
  const Region& r = hb.region();
  const auto E = static_cast<std::uint64_t>(r.graph.num_edges());
  const CounterRng rng(seed, stream);
  if (E == 0) return {Config(0), 0};
  std::uint64_t T = opt.initial_horizon ? opt.initial_horizon : 4 * E;
  while (true) {
    Config top(E, true), bottom(E, false);
    for (std::uint64_t t = T; t >= 1; --t) {
      const int e = static_cast<int>(rng.below(2 * t, E));
      const double u = rng.uniform(2 * t + 1);
      hb.step(top, e, u);
      hb.step(bottom, e, u);
    }
    if (top == bottom) return {std::move(top), T};
    if (T >= opt.max_horizon) throw CoalescenceCap("coupling from the past did not coalesce within the horizon cap");
    T *= 2;
  }
}

inline CftpResult cftp_sample(const Region& r, double p, double q, std::uint64_t seed, std::uint64_t stream = 0,
                              const CftpOptions& opt = {}) {
  HeatBath hb(r, p, q);
  return cftp_sample(hb, seed, stream, opt);
}

// ---------------------------------------------------------------------------
// Cluster geometry

inline constexpr int kInfiniteDiameter = INT_MAX;

struct ClusterInfo {
  std::vector<int> vertices;
  std::vector<int> lo, hi;  // unwrapped coordinate extent
  bool wraps = false;
  int diameter() const {
    if (wraps) return kInfiniteDiameter;
    int d = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) d = std::max(d, hi[i] - lo[i]);
    return d;
  }
  bool touches(int axis, int value) const { return lo[axis] <= value && value <= hi[axis]; }
};

struct ClusterGeometry {
  std::vector<int> label;  // cluster index per vertex, -1 outside the vertex mask
  std::vector<ClusterInfo> clusters;
};

/// Clusters of the open edges accepted by edge_mask (all when empty) on the
/// vertices accepted by vertex_mask, with L-infinity extents measured along
/// unwrapped paths. Each edge {u, u + e_axis} moves +1 along its axis, so a
/// cluster that winds around the torus is detected as wrapping. Gluing is
/// ignored. `local_coords`, when given, replaces the stored coordinates.
inline ClusterGeometry cluster_geometry(const Graph& g, const Config& omega, const std::vector<char>& edge_mask = {},
                                        const std::vector<char>& vertex_mask = {},
                                        const std::vector<int>& local_coords = {}) {
  const int V = g.num_vertices, d = std::max(1, g.dim);
  ClusterGeometry out;
  out.label.assign(static_cast<std::size_t>(V), -1);
  std::vector<int> pos(static_cast<std::size_t>(V) * d, 0);
  std::vector<int> queue;
  for (int s = 0; s < V; ++s) {
    if (out.label[s] >= 0 || (!vertex_mask.empty() && !vertex_mask[s])) continue;
    const int id = static_cast<int>(out.clusters.size());
    ClusterInfo info;
    for (int a = 0; a < d; ++a)
      pos[static_cast<std::size_t>(s) * d + a] =
          !local_coords.empty() ? local_coords[static_cast<std::size_t>(s) * d + a] : (g.has_coords() ? g.coord(s, a) : 0);
    info.lo.assign(pos.begin() + static_cast<std::ptrdiff_t>(s) * d, pos.begin() + static_cast<std::ptrdiff_t>(s + 1) * d);
    info.hi = info.lo;
    out.label[s] = id;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      info.vertices.push_back(v);
      for (auto [w, e] : g.incidence[v]) {
        if (!omega[e] || (!edge_mask.empty() && !edge_mask[e])) continue;
        if (!vertex_mask.empty() && !vertex_mask[w]) continue;
        const auto& ed = g.edges[e];
        const int step = (ed.u == v) ? +1 : -1;
        std::vector<int> np(pos.begin() + static_cast<std::ptrdiff_t>(v) * d,
                            pos.begin() + static_cast<std::ptrdiff_t>(v + 1) * d);
        if (g.dim > 0) np[ed.axis] += step;
        if (out.label[w] >= 0) {
          if (!std::equal(np.begin(), np.end(), pos.begin() + static_cast<std::ptrdiff_t>(w) * d)) info.wraps = true;
          continue;
        }
        out.label[w] = id;
        std::copy(np.begin(), np.end(), pos.begin() + static_cast<std::ptrdiff_t>(w) * d);
        for (int a = 0; a < d; ++a) {
          info.lo[a] = std::min(info.lo[a], np[a]);
          info.hi[a] = std::max(info.hi[a], np[a]);
        }
        queue.push_back(w);
      }
    }
    out.clusters.push_back(std::move(info));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boxes inside a region

/// Vertices within L-infinity distance n of `center`, with local coordinates
/// in [-n, n]^d, and the edges joining two box vertices that do not wrap.
/// `half_open` uses [-n, n)^d instead (the canonical coarse boxes).
struct BoxView {
  int n = 0;
  bool half_open = false;
  std::vector<char> vertex_mask;
  std::vector<char> edge_mask;
  std::vector<int> local;  // local coordinates, dim per vertex
  int lo() const { return -n; }
  int hi() const { return half_open ? n - 1 : n; }
};

inline BoxView make_box_view(const Graph& g, int center, int n, bool half_open = false) {
  if (!g.has_coords()) throw GeometryError("box events need an embedded graph");
  const int d = g.dim;
  if (g.period > 0 && (half_open ? 2 * n : 2 * n + 1) > g.period)
    throw GeometryError("box does not fit in the torus");
  BoxView b;
  b.n = n;
  b.half_open = half_open;
  const int V = g.num_vertices;
  b.vertex_mask.assign(static_cast<std::size_t>(V), 0);
  b.local.assign(static_cast<std::size_t>(V) * d, 0);
  for (int v = 0; v < V; ++v) {
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      int delta = g.coord(v, a) - g.coord(center, a);
      if (g.period > 0) {
        delta = ((delta % g.period) + g.period) % g.period;
        if (delta > b.hi()) delta -= g.period;
      }
      b.local[static_cast<std::size_t>(v) * d + a] = delta;
      inside = inside && delta >= b.lo() && delta <= b.hi();
    }
    b.vertex_mask[v] = inside;
  }
  b.edge_mask.assign(static_cast<std::size_t>(g.num_edges()), 0);
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edges[e];
    b.edge_mask[e] = b.vertex_mask[ed.u] && b.vertex_mask[ed.v] &&
                     b.local[static_cast<std::size_t>(ed.u) * d + ed.axis] < b.hi();
  }
  return b;
}

/// Some cluster of the box crosses it (meets both opposite faces in every
/// direction) and every other box cluster has diameter < threshold.
inline bool local_uniqueness(const Graph& g, const Config& omega, const BoxView& box, int threshold) {
  const auto geo = cluster_geometry(g, omega, box.edge_mask, box.vertex_mask, box.local);
  int crossing = 0;
  bool others_small = true;
  for (const auto& c : geo.clusters) {
    bool crosses = true;
    for (int a = 0; a < g.dim; ++a) crosses = crosses && c.lo[a] <= box.lo() && c.hi[a] >= box.hi();
    if (crosses)
      ++crossing;
    else if (c.diameter() >= threshold)
      others_small = false;
  }
  return crossing == 1 && others_small;
}

/// Some box cluster has diameter > threshold.
inline bool large_cluster(const Graph& g, const Config& omega, const BoxView& box, int threshold) {
  const auto geo = cluster_geometry(g, omega, box.edge_mask, box.vertex_mask, box.local);
  return std::any_of(geo.clusters.begin(), geo.clusters.end(), [&](auto& c) { return c.diameter() > threshold; });
}

/// Diameter of the origin's cluster over all open edges (infinite if it wraps).
inline int origin_cluster_diameter(const Graph& g, const Config& omega, int origin) {
  const auto geo = cluster_geometry(g, omega);
  return geo.clusters[geo.label[origin]].diameter();
}

inline int origin_cluster_size(const Graph& g, const Config& omega, int origin) {
  UnionFind uf(g.num_vertices);
  for (int e = 0; e < g.num_edges(); ++e)
    if (omega[e]) uf.unite(g.edges[e].u, g.edges[e].v);
  return uf.set_size(origin);
}

/// 0 <-> boundary of the box: the open cluster of the centre contains a
/// vertex with a local coordinate equal to +-n.
inline bool connects_to_boundary(const Graph& g, const Config& omega, const BoxView& box, int center) {
  const auto geo = cluster_geometry(g, omega, box.edge_mask, box.vertex_mask, box.local);
  const auto& c = geo.clusters[geo.label[center]];
  for (int a = 0; a < g.dim; ++a)
    if (c.lo[a] <= box.lo() || c.hi[a] >= box.hi()) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Estimates

enum class EventTag { local_uniqueness, large_cluster, small_origin_cluster, boundary_connection, origin_size };

inline std::string to_string(EventTag t) {
  switch (t) {
    case EventTag::local_uniqueness: return "U_n";
    case EventTag::large_cluster: return "A_n";
    case EventTag::small_origin_cluster: return "D_N";
    case EventTag::boundary_connection: return "0<->boundary";
    case EventTag::origin_size: return "|C_0|";
  }
  return "?";
}

inline EventTag parse_event_tag(const std::string& s) {
  if (s == "U" || s == "U_n") return EventTag::local_uniqueness;
  if (s == "A" || s == "A_n") return EventTag::large_cluster;
  if (s == "D" || s == "D_N") return EventTag::small_origin_cluster;
  if (s == "boundary" || s == "0<->boundary") return EventTag::boundary_connection;
  if (s == "size" || s == "|C_0|") return EventTag::origin_size;
  throw InvalidArgument("unknown event: " + s);
}

struct EventSpec {
  EventTag tag = EventTag::small_origin_cluster;
  int center = -1;  // default: the region's origin
  int n = 1;        // box radius for box events
  std::optional<int> threshold;  // diameter threshold; defaults follow the event definitions
};

inline int default_threshold(const EventSpec& s, const Region& r) {
  if (s.threshold) return *s.threshold;
  switch (s.tag) {
    case EventTag::local_uniqueness:
    case EventTag::large_cluster: return std::max(1, s.n / 100);
    case EventTag::small_origin_cluster: {
      const int N = r.graph.period > 0 ? r.graph.period : 2 * s.n + 1;
      return std::max(1, N / 5);
    }
    default: return 0;
  }
}

struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};

inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double zq = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(successes) / nn;
  const double den = 1.0 + zq * zq / nn;
  const double centre = (ph + zq * zq / (2 * nn)) / den;
  const double half = zq * std::sqrt(ph * (1 - ph) / nn + zq * zq / (4 * nn * nn)) / den;
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == n ? 1.0 : std::min(1.0, centre + half)};
}

struct EventEstimate {
  std::string event;
  int n = 0;
  double p = 0.0, q = 1.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  WilsonInterval wilson;
  std::map<int, std::uint64_t> histogram;  // for |C_0|: size -> count
};

/// Draws n_samples exact samples (sample i uses stream i) and calls
/// visit(i, omega). Samples are split across threads by index; the result is
/// independent of the thread count.
template <class Visit>
void for_each_sample(const Region& r, double p, double q, std::uint64_t n_samples, std::uint64_t seed, Visit&& visit,
                     int threads = 1, const CftpOptions& opt = {}) {
  if (threads <= 1) {
    HeatBath hb(r, p, q);
    for (std::uint64_t i = 0; i < n_samples; ++i) visit(i, cftp_sample(hb, seed, i, opt).sample);
    return;
  }
  std::vector<Config> samples(n_samples);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      HeatBath hb(r, p, q);
      for (std::uint64_t i = static_cast<std::uint64_t>(t); i < n_samples; i += static_cast<std::uint64_t>(threads))
        samples[i] = cftp_sample(hb, seed, i, opt).sample;
    });
  for (auto& th : pool) th.join();
  for (std::uint64_t i = 0; i < n_samples; ++i) visit(i, samples[i]);
}

inline EventEstimate estimate_event(const Region& r, double p, double q, const EventSpec& spec,
                                    std::uint64_t n_samples, std::uint64_t seed, int threads = 1) {
  const Graph& g = r.graph;
  const int center = spec.center >= 0 ? spec.center : r.origin;
  const int thr = default_threshold(spec, r);
  std::optional<BoxView> box;
  if (spec.tag == EventTag::local_uniqueness || spec.tag == EventTag::large_cluster ||
      spec.tag == EventTag::boundary_connection)
    box = make_box_view(g, center, spec.n);
  if (spec.tag == EventTag::small_origin_cluster && !g.has_coords())
    throw GeometryError("diameter events need an embedded graph");
  EventEstimate est;
  est.event = to_string(spec.tag);
  est.n = spec.n;
  est.p = p;
  est.q = q;
  est.n_samples = n_samples;
  est.seed = seed;
  std::uint64_t hits = 0;
  double sum = 0.0, sum2 = 0.0;
  for_each_sample(
      r, p, q, n_samples, seed,
      [&](std::uint64_t, const Config& omega) {
        double v = 0.0;
        switch (spec.tag) {
          case EventTag::local_uniqueness: v = local_uniqueness(g, omega, *box, thr); break;
          case EventTag::large_cluster: v = large_cluster(g, omega, *box, thr); break;
          case EventTag::small_origin_cluster: v = origin_cluster_diameter(g, omega, center) < thr; break;
          case EventTag::boundary_connection: v = connects_to_boundary(g, omega, *box, center); break;
          case EventTag::origin_size: {
            const int s = origin_cluster_size(g, omega, center);
            ++est.histogram[s];
            v = s;
            break;
          }
        }
        if (spec.tag != EventTag::origin_size && v != 0.0) ++hits;
        sum += v;
        sum2 += v * v;
      },
      threads);
  const double n = static_cast<double>(std::max<std::uint64_t>(1, n_samples));
  est.estimate = sum / n;
  const double var = std::max(0.0, sum2 / n - est.estimate * est.estimate);
  est.stderr_ = std::sqrt(var / n);
  if (spec.tag != EventTag::origin_size) est.wilson = wilson_interval(hits, n_samples);
  return est;
}

// ---------------------------------------------------------------------------
// Bad boxes

struct BadBoxField {
  std::vector<char> good;           // per coarse site
  std::vector<int> component_sizes;  // star-connected components of bad boxes, sorted
};

/// Labels each canonical box y + [-L, L)^d good when local uniqueness holds
/// inside it (diameter threshold `radius` for the other clusters), and
/// collects the star-connected components of bad boxes.
inline BadBoxField bad_box_field(const CoarseTorus& ct, const Config& omega, int radius) {
  const Graph& g = ct.parent().graph();
  BadBoxField f;
  const int n = ct.num_sites();
  f.good.assign(static_cast<std::size_t>(n), 0);
  SiteSet bad = 0;
  for (int s = 0; s < n; ++s) {
    const BoxView box = make_box_view(g, ct.site_vertex(s), ct.L(), true);
    f.good[s] = local_uniqueness(g, omega, box, radius);
    if (!f.good[s]) bad |= SiteSet{1} << s;
  }
  SiteSet left = bad;
  while (left) {
    SiteSet comp = left & (~left + 1), frontier = comp;
    while (frontier) {
      SiteSet next = 0;
      for_each_site(frontier, [&](int i) { next |= ct.star_neighbours(i); });
      next &= left & ~comp;
      comp |= next;
      frontier = next;
    }
    f.component_sizes.push_back(site_count(comp));
    left &= ~comp;
  }
  std::sort(f.component_sizes.begin(), f.component_sizes.end());
  return f;
}

// ---------------------------------------------------------------------------
// Fits

struct LogLinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::vector<int> xs;
};

/// Least-squares fit of log(count) against the key, over keys with count >= min_count.
inline LogLinearFit log_linear_fit(const std::map<int, std::uint64_t>& hist, std::uint64_t min_count = 1) {
  LogLinearFit fit;
  std::vector<double> x, y;
  for (auto [k, c] : hist)
    if (c >= min_count && c > 0) {
      x.push_back(k);
      y.push_back(std::log(static_cast<double>(c)));
      fit.xs.push_back(k);
    }
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  fit.slope = cov / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = vy > 0 ? cov * cov / (vx * vy) : 1.0;
  return fit;
}

}  // namespace fkan
