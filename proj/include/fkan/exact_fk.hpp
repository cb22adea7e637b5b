#pragma once

// Exact FK-percolation on small graphs: partition tables by exhaustive
// enumeration and complex expectations at p + z, computed both through the
// alpha_z tilt of the measure at p and by direct substitution of
// x = (p+z)/(1-p-z) into the polynomial weights.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fkan/complex_io.hpp"
#include "fkan/enumerate.hpp"
#include "fkan/error.hpp"
#include "fkan/lattice.hpp"
#include "fkan/local_function.hpp"

namespace fkan {

inline constexpr double kPoleTolerance = 1e-9;
inline constexpr double kZeroDenominatorTolerance = 1e-12;
inline constexpr double kTiltAgreement = 1e-10;

struct FKParams {
  double p = 0.5;
  double q = 1.0;
  cplx z = 0.0;
};

inline void check_pole(double p, cplx z) {
  if (std::abs(1.0 - p - z) < kPoleTolerance) throw PoleProximity("p + z is too close to 1");
}

/// alpha_z = (1 + z/p) / (1 - z/(1-p)), so that x_p * alpha_z = x_{p+z}.
inline cplx alpha(double p, cplx z) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("alpha: p must lie in (0,1)");
  check_pole(p, z);
  return (1.0 + z / p) / (1.0 - z / (1.0 - p));
}

/// x = w / (1 - w) for the (possibly complex) edge parameter w.
inline cplx edge_weight(cplx w) { return w / (1.0 - w); }

/// FNV-1a over the vertex count, the edge list and the boundary gluing.
inline std::uint64_t graph_hash(const Region& r) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(r.graph.num_vertices));
  for (const auto& e : r.graph.edges) {
    mix(static_cast<std::uint64_t>(e.u));
    mix(static_cast<std::uint64_t>(e.v));
    mix(static_cast<std::uint64_t>(e.axis));
  }
  for (auto [a, b] : r.glue) {
    mix(static_cast<std::uint64_t>(a));
    mix(static_cast<std::uint64_t>(b));
  }
  return h;
}

/// Joint counts N(a, m, k): configurations whose restriction to `support` is
/// the pattern a, with m open edges and k clusters. With an empty support
/// this is the plain partition table N(m, k). Counts are exact: the hard
/// enumeration cap keeps them below 2^36.
class PartitionTable {
 public:
  PartitionTable() = default;
  PartitionTable(std::vector<int> support, int num_edges, int num_vertices, Boundary b, std::uint64_t hash)
      : support_(std::move(support)), E_(num_edges), V_(num_vertices), boundary_(b), hash_(hash),
        counts_((std::size_t{1} << support_.size()) * static_cast<std::size_t>(E_ + 1) * (V_ + 1), 0) {}

  const std::vector<int>& support() const { return support_; }
  int num_edges() const { return E_; }
  int num_vertices() const { return V_; }
  Boundary boundary() const { return boundary_; }
  std::uint64_t hash() const { return hash_; }
  std::size_t patterns() const { return std::size_t{1} << support_.size(); }

  std::size_t index(std::uint64_t a, int m, int k) const {
    return (static_cast<std::size_t>(a) * (E_ + 1) + m) * (V_ + 1) + k;
  }
  std::uint64_t count(std::uint64_t a, int m, int k) const { return counts_[index(a, m, k)]; }
  std::uint64_t count(int m, int k) const {
    std::uint64_t s = 0;
    for (std::uint64_t a = 0; a < patterns(); ++a) s += count(a, m, k);
    return s;
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }
  std::vector<std::uint64_t>& raw() { return counts_; }
  const std::vector<std::uint64_t>& raw() const { return counts_; }

  /// Nonzero (m, k, count) triples of the marginal table, sorted by (m, k).
  std::vector<std::tuple<int, int, std::uint64_t>> entries() const {
    std::vector<std::tuple<int, int, std::uint64_t>> out;
    for (int m = 0; m <= E_; ++m)
      for (int k = 0; k <= V_; ++k)
        if (auto c = count(m, k)) out.emplace_back(m, k, c);
    return out;
  }

  /// Marginal table with an empty support.
  PartitionTable marginal() const {
    PartitionTable t({}, E_, V_, boundary_, hash_);
    for (int m = 0; m <= E_; ++m)
      for (int k = 0; k <= V_; ++k) t.counts_[t.index(0, m, k)] = count(m, k);
    return t;
  }

 private:
  std::vector<int> support_;
  int E_ = 0;
  int V_ = 0;
  Boundary boundary_ = Boundary::periodic;
  std::uint64_t hash_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Support edges are enumerated first, remaining edges in index order.
inline PartitionTable build_partition_table(const Region& r, std::span<const int> support = {},
                                            const EnumOptions& opt = {}) {
  const int E = r.graph.num_edges();
  const int V = r.graph.num_vertices;
  check_budget(E, opt);
  if (support.size() > static_cast<std::size_t>(kMaxLocalSupport)) throw BudgetExceeded("support too large");
  std::vector<char> pinned(static_cast<std::size_t>(E), 0);
  for (int e : support) {
    if (e < 0 || e >= E || pinned[e]) throw InvalidArgument("bad support edge");
    pinned[e] = 1;
  }
  PartitionTable table(std::vector<int>(support.begin(), support.end()), E, V, r.boundary, graph_hash(r));
  EnumerationPlan plan;
  const std::uint64_t S = static_cast<std::uint64_t>(E + 1) * (V + 1);
  for (std::size_t i = 0; i < support.size(); ++i) {
    plan.order.push_back(support[i]);
    plan.stride.push_back((std::uint64_t{1} << i) * S + static_cast<std::uint64_t>(V + 1));
  }
  for (int e = 0; e < E; ++e) {
    if (pinned[e]) continue;
    plan.order.push_back(e);
    plan.stride.push_back(static_cast<std::uint64_t>(V + 1));
  }
  plan.initial = static_cast<std::uint64_t>(r.base_components());
  plan.key_space = table.raw().size();
  table.raw() = enumerate_keys(r, plan, opt);
  return table;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Z(x, q) = sum N(m,k) x^m q^k at x = (p+z)/(1-p-z).
inline cplx evaluate_Z(const PartitionTable& t, double p, double q, cplx z) {
  check_pole(p, z);
  const cplx x = edge_weight(p + z);
  cplx total = 0.0;
  cplx xm = 1.0;
  for (int m = 0; m <= t.num_edges(); ++m, xm *= x) {
    double qk = 1.0;
    for (int k = 0; k <= t.num_vertices(); ++k, qk *= q)
      if (auto c = t.count(m, k)) total += static_cast<double>(c) * xm * qk;
  }
  return total;
}

struct ExpectationResult {
  cplx value;        // tilted route: phi_p[F alpha^|w|] / phi_p[alpha^|w|]
  cplx direct;       // direct substitution at p + z
  cplx tilt_mass;    // phi_p[alpha^|w|]
  double rel_diff = 0.0;
  bool agree = true;
};

namespace detail {

inline double relative_difference(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline ExpectationResult finish(cplx num_t, cplx den_t, double norm, cplx num_d, cplx den_d) {
  ExpectationResult r;
  r.tilt_mass = den_t / norm;
  if (std::abs(r.tilt_mass) < kZeroDenominatorTolerance)
    throw ZeroDenominator("phi_p[alpha_z^|omega|] vanishes: partition function zero at p + z");
  if (std::abs(den_d) == 0.0) throw ZeroDenominator("partition function vanishes at p + z");
  r.value = num_t / den_t;
  r.direct = num_d / den_d;
  r.rel_diff = relative_difference(r.value, r.direct);
  r.agree = r.rel_diff <= kTiltAgreement;
  return r;
}

}  // namespace detail

/// Expectation of F at p + z from a table whose support contains Supp(F).
inline ExpectationResult expectation_exact(const PartitionTable& t, const LocalFunction& F, const FKParams& prm) {
  check_pole(prm.p, prm.z);
  const auto Fv = F.lift(t.support());
  const double xp = prm.p / (1.0 - prm.p);
  const cplx al = alpha(prm.p, prm.z);
  const cplx xz = edge_weight(prm.p + prm.z);
  const int E = t.num_edges(), V = t.num_vertices();
  // per-(m,k) sums of N and of F*N
  std::vector<double> n_mk(static_cast<std::size_t>(E + 1) * (V + 1), 0.0), f_mk(n_mk.size(), 0.0);
  for (std::uint64_t a = 0; a < t.patterns(); ++a)
    for (int m = 0; m <= E; ++m)
      for (int k = 0; k <= V; ++k)
        if (auto c = t.count(a, m, k)) {
          const std::size_t i = static_cast<std::size_t>(m) * (V + 1) + k;
          n_mk[i] += static_cast<double>(c);
          f_mk[i] += static_cast<double>(c) * Fv[a];
        }
  cplx num_t = 0.0, den_t = 0.0, num_d = 0.0, den_d = 0.0;
  double norm = 0.0;
  double xpm = 1.0;
  cplx am = 1.0, xzm = 1.0;
  for (int m = 0; m <= E; ++m, xpm *= xp, am *= al, xzm *= xz) {
    double qk = 1.0;
    for (int k = 0; k <= V; ++k, qk *= prm.q) {
      const std::size_t i = static_cast<std::size_t>(m) * (V + 1) + k;
      if (n_mk[i] == 0.0) continue;
      const double base = xpm * qk;
      norm += n_mk[i] * base;
      den_t += n_mk[i] * base * am;
      num_t += f_mk[i] * base * am;
      den_d += n_mk[i] * qk * xzm;
      num_d += f_mk[i] * qk * xzm;
    }
  }
  return detail::finish(num_t, den_t, norm, num_d, den_d);
}

/// q = 1: the measure is Bernoulli product measure, independent of the
/// graph structure beyond the number of edges.
inline ExpectationResult expectation_bernoulli(int num_edges, const LocalFunction& F, double p, cplx z) {
  check_pole(p, z);
  const cplx al = alpha(p, z);
  const int s = static_cast<int>(F.support().size());
  const cplx open_t = p * al, closed_t = 1.0 - p;
  const cplx open_d = p + z, closed_d = 1.0 - p - z;
  cplx num_t = 0.0, num_d = 0.0;
  for (std::uint64_t a = 0; a < F.patterns(); ++a) {
    const double f = F(a);
    if (f == 0.0) continue;
    const int open = std::popcount(a);
    num_t += f * std::pow(open_t, open) * std::pow(closed_t, s - open);
    num_d += f * std::pow(open_d, open) * std::pow(closed_d, s - open);
  }
  const cplx mass = closed_t + open_t;  // phi_p[alpha^{w(e)}] for one edge
  ExpectationResult r;
  r.tilt_mass = std::pow(mass, num_edges);
  if (std::abs(r.tilt_mass) < kZeroDenominatorTolerance)
    throw ZeroDenominator("phi_p[alpha_z^|omega|] vanishes at p + z");
  r.value = num_t / std::pow(mass, s);
  r.direct = num_d;
  r.rel_diff = detail::relative_difference(r.value, r.direct);
  r.agree = r.rel_diff <= kTiltAgreement;
  return r;
}

/// Builds the table on demand; q = 1 takes the product-measure route.
inline ExpectationResult expectation_exact(const Region& r, const LocalFunction& F, const FKParams& prm,
                                           const EnumOptions& opt = {}) {
  for (int e : F.support())
    if (e < 0 || e >= r.graph.num_edges()) throw InvalidArgument("support edge outside the graph");
  if (prm.q == 1.0) return expectation_bernoulli(r.graph.num_edges(), F, prm.p, prm.z);
  return expectation_exact(build_partition_table(r, F.support(), opt), F, prm);
}

/// phi_p[alpha_z^|omega|] from a table.
inline cplx tilt_mass(const PartitionTable& t, double p, double q, cplx z) {
  const cplx al = alpha(p, z);
  const double xp = p / (1.0 - p);
  cplx num = 0.0;
  double norm = 0.0;
  double xpm = 1.0;
  cplx am = 1.0;
  for (int m = 0; m <= t.num_edges(); ++m, xpm *= xp, am *= al) {
    double qk = 1.0;
    for (int k = 0; k <= t.num_vertices(); ++k, qk *= q)
      if (auto c = t.count(m, k)) {
        norm += static_cast<double>(c) * xpm * qk;
        num += static_cast<double>(c) * xpm * qk * am;
      }
  }
  return num / norm;
}

/// phi_p[alpha_z^|omega|] = ((1-p)/(1-p-z))^E for Bernoulli percolation.
inline cplx tilt_mass_bernoulli(int num_edges, double p, cplx z) {
  check_pole(p, z);
  return std::pow((1.0 - p) / (1.0 - p - z), num_edges);
}

// ---------------------------------------------------------------------------
// Scans and fits

struct ScanPoint {
  cplx z;
  cplx value;
};

struct ScanReport {
  std::vector<ScanPoint> points;
  double min_abs = 0.0;
  cplx argmin = 0.0;
  double delta_hat = 0.0;  // largest ring radius up to which every ring stays above tolerance
  double tolerance = kZeroDenominatorTolerance;
};

/// Scans z over `rings` concentric circles of radius radius*j/rings with
/// `angles` equispaced points each. The first angle is 0, so the grid is
/// symmetric under conjugation whenever `angles` is even.
inline ScanReport zero_free_scan(const std::function<cplx(cplx)>& mass, double p, double radius, int rings,
                                 int angles, double tol = kZeroDenominatorTolerance) {
  if (!(radius < 1.0 - p)) throw InvalidArgument("zero_free_scan: radius must be < 1 - p");
  if (rings < 1 || angles < 1) throw InvalidArgument("zero_free_scan: empty grid");
  ScanReport rep;
  rep.tolerance = tol;
  rep.min_abs = std::numeric_limits<double>::infinity();
  bool still_clear = true;
  for (int j = 1; j <= rings; ++j) {
    const double r = radius * j / rings;
    double ring_min = std::numeric_limits<double>::infinity();
    for (int a = 0; a < angles; ++a) {
      const cplx z = std::polar(r, 2.0 * std::numbers::pi * a / angles);
      const cplx v = mass(z);
      rep.points.push_back({z, v});
      ring_min = std::min(ring_min, std::abs(v));
      if (std::abs(v) < rep.min_abs) {
        rep.min_abs = std::abs(v);
        rep.argmin = z;
      }
    }
    if (still_clear && ring_min > tol)
      rep.delta_hat = r;
    else
      still_clear = false;
  }
  return rep;
}

inline ScanReport zero_free_scan(const PartitionTable& t, double p, double q, double radius, int rings, int angles) {
  return zero_free_scan([&](cplx z) { return tilt_mass(t, p, q, z); }, p, radius, rings, angles);
}

struct RatioFitRow {
  double eps = 0.0;
  double c_hat = 0.0;      // max over the circle of log(|ratio|/2)_+ / |Delta|
  double c_raw = 0.0;      // max over the circle of log(|ratio|)_+ / |Delta|
  double max_ratio = 0.0;  // max |ratio| over the circle
  cplx argmax = 0.0;
};

struct RatioFit {
  std::vector<RatioFitRow> rows;  // in the order of the eps grid
  bool nonincreasing_as_eps_decreases = true;
  bool bound_holds = true;  // max_ratio <= 2 exp(c_hat |Delta|) on every row
};

/// |phi_{p+z}[F] / phi_p[F]| over `points` equispaced z with |z| = eps.
/// `expect` returns phi_{p+z}[F].
inline RatioFit ratio_bound_fit(const std::function<cplx(cplx)>& expect, int support_size, std::vector<double> eps_grid,
                                int points = 64) {
  if (support_size < 1) throw InvalidArgument("ratio_bound_fit: F needs a nonempty support");
  const double base = expect(0.0).real();
  if (!(base > 0.0)) throw InvalidArgument("ratio_bound_fit: phi_p[F] must be positive");
  RatioFit fit;
  for (double eps : eps_grid) {
    RatioFitRow row;
    row.eps = eps;
    for (int a = 0; a < points; ++a) {
      const cplx z = std::polar(eps, 2.0 * std::numbers::pi * a / points);
      const double ratio = std::abs(expect(z)) / base;
      if (ratio > row.max_ratio) {
        row.max_ratio = ratio;
        row.argmax = z;
      }
    }
    row.c_hat = std::max(0.0, std::log(row.max_ratio / 2.0)) / support_size;
    row.c_raw = std::max(0.0, std::log(row.max_ratio)) / support_size;
    fit.bound_holds = fit.bound_holds && row.max_ratio <= 2.0 * std::exp(row.c_hat * support_size) * (1 + 1e-12);
    fit.rows.push_back(row);
  }
  auto sorted = fit.rows;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1].c_hat > sorted[i].c_hat) fit.nonincreasing_as_eps_decreases = false;
  return fit;
}

inline RatioFit ratio_bound_fit(const PartitionTable& t, const LocalFunction& F, double p, double q,
                                std::vector<double> eps_grid, int points = 64) {
  if (!F.nonnegative() || F.identically_zero())
    throw InvalidArgument("ratio_bound_fit: F must be nonnegative and not identically zero");
  return ratio_bound_fit([&](cplx z) { return expectation_exact(t, F, {p, q, z}).value; },
                         static_cast<int>(F.support().size()), std::move(eps_grid), points);
}

/// |mean of phi_{p+z}[F] over a circle around z0 - phi_{p+z0}[F]|.
inline double mean_value_defect(const std::function<cplx(cplx)>& expect, cplx z0, double r, int points = 64) {
  cplx mean = 0.0;
  for (int a = 0; a < points; ++a) mean += expect(z0 + std::polar(r, 2.0 * std::numbers::pi * a / points));
  mean /= static_cast<double>(points);
  return std::abs(mean - expect(z0));
}

struct FiniteEnergyReport {
  double bound = 0.0;         // (min single-edge conditional probability)^|Delta|
  double min_cylinder = 0.0;  // smallest phi_p[cylinder] over all patterns
  bool pass = true;
};

/// Every cylinder event on the table support has probability at least
/// min(p/(p+q(1-p)), 1-p)^|Delta| (q >= 1).
inline FiniteEnergyReport finite_energy_check(const PartitionTable& t, double p, double q) {
  FiniteEnergyReport rep;
  const double c = std::min(p / (p + q * (1.0 - p)), 1.0 - p);
  rep.bound = std::pow(c, static_cast<double>(t.support().size()));
  rep.min_cylinder = 1.0;
  for (std::uint64_t a = 0; a < t.patterns(); ++a) {
    const double prob = expectation_exact(t, cylinder(t.support(), a), {p, q, 0.0}).value.real();
    rep.min_cylinder = std::min(rep.min_cylinder, prob);
  }
  rep.pass = rep.min_cylinder >= rep.bound * (1 - 1e-12);
  return rep;
}

// ---------------------------------------------------------------------------
// Box-resolved tables

/// Counts N(a, (m_x)_x, k) on a torus: support pattern a, the number m_x of
/// open edges in each canonical box of the coarse torus, and the cluster
/// count. Needed for identities that involve the box-local tilt f_{z,x}.
class BoxTable {
 public:
  const std::vector<int>& support() const { return support_; }
  int num_boxes() const { return static_cast<int>(box_edges_.size()); }
  int box_edges(int b) const { return box_edges_[b]; }
  int num_vertices() const { return V_; }
  std::size_t patterns() const { return std::size_t{1} << support_.size(); }
  std::size_t box_states() const { return box_states_; }
  std::uint64_t count(std::uint64_t a, std::size_t box_state, int k) const {
    return counts_[(a * box_states_ + box_state) * (V_ + 1) + k];
  }
  /// Open-edge count of box b in a mixed-radix box state.
  int box_open(std::size_t state, int b) const {
    return static_cast<int>((state / radix_[b]) % static_cast<std::size_t>(box_edges_[b] + 1));
  }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }

  /// Marginal (a, m, k) table.
  PartitionTable to_partition_table(int num_edges, Boundary b, std::uint64_t hash) const {
    PartitionTable t(support_, num_edges, V_, b, hash);
    for (std::uint64_t a = 0; a < patterns(); ++a)
      for (std::size_t s = 0; s < box_states_; ++s) {
        int m = 0;
        for (int x = 0; x < num_boxes(); ++x) m += box_open(s, x);
        for (int k = 0; k <= V_; ++k) t.raw()[t.index(a, m, k)] += count(a, s, k);
      }
    return t;
  }

  friend BoxTable build_box_table(const TorusGraph&, const CoarseTorus&, std::span<const int>, const EnumOptions&);

 private:
  std::vector<int> support_;
  std::vector<int> box_edges_;
  std::vector<std::size_t> radix_;
  std::size_t box_states_ = 1;
  int V_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Edges are visited support first, then box by box with the last box having
/// the smallest key stride.
inline BoxTable build_box_table(const TorusGraph& t, const CoarseTorus& ct, std::span<const int> support,
                                const EnumOptions& opt = {}) {
  const int E = t.num_edges();
  check_budget(E, opt);
  if (support.size() > 16) throw BudgetExceeded("box table support too large");
  BoxTable bt;
  bt.support_.assign(support.begin(), support.end());
  bt.V_ = t.num_vertices();
  const int nb = ct.num_sites();
  bt.box_edges_.resize(nb);
  bt.radix_.resize(nb);
  std::size_t r = 1;
  for (int b = nb - 1; b >= 0; --b) {
    bt.box_edges_[b] = static_cast<int>(ct.box(b).edges.size());
    bt.radix_[b] = r;
    r *= static_cast<std::size_t>(bt.box_edges_[b] + 1);
  }
  bt.box_states_ = r;
  const std::uint64_t K = static_cast<std::uint64_t>(bt.V_ + 1);
  const std::size_t space = bt.patterns() * bt.box_states_ * K;
  if (space > (std::size_t{1} << 28)) throw BudgetExceeded("box table key space too large");

  EnumerationPlan plan;
  std::vector<char> pinned(static_cast<std::size_t>(E), 0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const int e = support[i];
    if (e < 0 || e >= E || pinned[e]) throw InvalidArgument("bad support edge");
    pinned[e] = 1;
    plan.order.push_back(e);
    plan.stride.push_back(((std::uint64_t{1} << i) * bt.box_states_ + bt.radix_[ct.site_of_edge(e)]) * K);
  }
  for (int b = 0; b < nb; ++b)
    for (int e : ct.box(b).edges) {
      if (pinned[e]) continue;
      plan.order.push_back(e);
      plan.stride.push_back(bt.radix_[b] * K);
    }
  Region region = t.region();
  plan.initial = static_cast<std::uint64_t>(region.base_components());
  plan.key_space = space;
  bt.counts_ = enumerate_keys(region, plan, opt);
  return bt;
}

}  // namespace fkan
