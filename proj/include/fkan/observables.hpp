#pragma once

// Susceptibility (exact finite volume and the analytic series over clusters
// of the origin), the theta proxy, and Edwards-Sokal conversions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fkan/animals.hpp"
#include "fkan/complex_io.hpp"
#include "fkan/enumerate.hpp"
#include "fkan/error.hpp"
#include "fkan/exact_fk.hpp"
#include "fkan/lattice.hpp"
#include "fkan/sampler.hpp"

namespace fkan {

// ---------------------------------------------------------------------------
// Edwards-Sokal

inline double p_of_beta(double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  return 1.0 - std::exp(-beta);
}
inline double beta_of_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("p must lie in (0,1)");
  return -std::log1p(-p);
}
inline double potts_factor(double q) { return (q - 1.0) / q; }
/// Spontaneous magnetisation from the FK percolation probability.
inline double potts_magnetisation(double theta, double q) { return potts_factor(q) * theta; }
inline double potts_susceptibility(double chi_fk, double q) { return potts_factor(q) * chi_fk; }

// ---------------------------------------------------------------------------
// Exact finite-volume susceptibility

namespace detail {
struct OriginSizeDigit {
  static constexpr bool needs_uf = true;
  int origin;
  std::uint64_t stride;
  std::uint64_t operator()(const RollbackUnionFind& uf) const {
    return static_cast<std::uint64_t>(uf.set_size(origin)) * stride;
  }
};
}  // namespace detail

/// phi[|C_0|] by enumeration of all configurations of the region. Vertices
/// glued to the cluster by the boundary condition count toward its size.
inline double chi_exact(const Region& r, double p, double q, const EnumOptions& opt = {}) {
  const int E = r.graph.num_edges(), V = r.graph.num_vertices;
  check_budget(E, opt);
  EnumerationPlan plan;
  for (int e = 0; e < E; ++e) {
    plan.order.push_back(e);
    plan.stride.push_back(static_cast<std::uint64_t>(V + 1));
  }
  const std::uint64_t S = static_cast<std::uint64_t>(E + 1) * (V + 1);
  plan.initial = static_cast<std::uint64_t>(r.base_components());
  plan.key_space = static_cast<std::size_t>(S) * (V + 1);
  const auto counts = enumerate_keys(r, plan, opt, detail::OriginSizeDigit{r.origin, S});
  const double x = p / (1.0 - p);
  double num = 0.0, den = 0.0;
  for (int s = 1; s <= V; ++s)
    for (int m = 0; m <= E; ++m)
      for (int k = 0; k <= V; ++k) {
        const auto c = counts[(static_cast<std::size_t>(s) * (E + 1) + m) * (V + 1) + k];
        if (!c) continue;
        const double w = static_cast<double>(c) * std::pow(x, m) * std::pow(q, k);
        num += w * s;
        den += w;
      }
  return num / den;
}

// ---------------------------------------------------------------------------
// Cluster-of-the-origin probabilities

/// An animal placed in a torus: its vertex set, internal edges E(C) and
/// boundary edges (exactly one endpoint in C).
struct PlacedAnimal {
  std::vector<int> vertices;
  std::vector<int> internal;
  std::vector<int> boundary;
};

inline PlacedAnimal place_animal(const TorusGraph& t, const Animal& a) {
  PlacedAnimal pa;
  std::vector<char> in(static_cast<std::size_t>(t.num_vertices()), 0);
  for (const Cell& c : a.cells) {
    const int v = t.vertex(c);
    if (in[v]) throw GeometryError("animal overlaps itself in the torus");
    in[v] = 1;
    pa.vertices.push_back(v);
  }
  for (int e = 0; e < t.num_edges(); ++e) {
    const auto& ed = t.graph().edges[e];
    const int inside = in[ed.u] + in[ed.v];
    if (inside == 2)
      pa.internal.push_back(e);
    else if (inside == 1)
      pa.boundary.push_back(e);
  }
  return pa;
}

/// Number of connected spanning subgraphs of the animal's internal graph by edge count.
inline std::vector<std::uint64_t> connected_spanning_counts(const TorusGraph& t, const PlacedAnimal& pa) {
  const int m = static_cast<int>(pa.internal.size());
  if (m > 24) throw BudgetExceeded("animal has too many internal edges");
  std::vector<int> local(static_cast<std::size_t>(t.num_vertices()), -1);
  for (std::size_t i = 0; i < pa.vertices.size(); ++i) local[pa.vertices[i]] = static_cast<int>(i);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(m) + 1, 0);
  const int n = static_cast<int>(pa.vertices.size());
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    UnionFind uf(n);
    for (int i = 0; i < m; ++i)
      if ((s >> i) & 1u) {
        const auto& ed = t.graph().edges[pa.internal[i]];
        uf.unite(local[ed.u], local[ed.v]);
      }
    if (uf.num_sets() == 1) ++counts[std::popcount(s)];
  }
  return counts;
}

namespace detail {
struct ExactClusterDigit {
  static constexpr bool needs_uf = true;
  int origin;
  int size;
  const std::vector<int>* vertices;
  std::uint64_t stride;
  std::uint64_t operator()(const RollbackUnionFind& uf) const {
    if (uf.set_size(origin) != size) return 0;
    const int root = uf.find(origin);
    for (int v : *vertices)
      if (uf.find(v) != root) return 0;
    return stride;
  }
};
}  // namespace detail

/// phi_{p+z}[1{C_0 = C}] on the torus, by both the tilted and the direct
/// route. q = 1 uses the product structure (internal edges form a connected
/// spanning subgraph, boundary edges closed); q > 1 enumerates the torus.
inline ExpectationResult cluster_event_probability(const TorusGraph& t, const Animal& a, double p, double q, cplx z,
                                                   const EnumOptions& opt = {}) {
  check_pole(p, z);
  const PlacedAnimal pa = place_animal(t, a);
  if (q == 1.0) {
    const auto r = connected_spanning_counts(t, pa);
    const int mi = static_cast<int>(pa.internal.size()), mb = static_cast<int>(pa.boundary.size());
    const cplx al = alpha(p, z);
    const cplx mass = 1.0 - p + p * al;
    cplx tilted = 0.0, direct = 0.0;
    for (int j = 0; j <= mi; ++j) {
      if (!r[j]) continue;
      tilted += static_cast<double>(r[j]) * std::pow(p * al, j) * std::pow(1.0 - p, mi - j + mb);
      direct += static_cast<double>(r[j]) * std::pow(p + z, j) * std::pow(1.0 - p - z, mi - j + mb);
    }
    ExpectationResult res;
    res.tilt_mass = std::pow(mass, t.num_edges());
    if (std::abs(res.tilt_mass) < kZeroDenominatorTolerance) throw ZeroDenominator("tilt mass vanishes");
    res.value = tilted / std::pow(mass, mi + mb);
    res.direct = direct;
    res.rel_diff = detail::relative_difference(res.value, res.direct);
    res.agree = res.rel_diff <= kTiltAgreement;
    return res;
  }
  const Region region = t.region();
  const int E = t.num_edges(), V = t.num_vertices();
  check_budget(E, opt);
  EnumerationPlan plan;
  for (int e = 0; e < E; ++e) {
    plan.order.push_back(e);
    plan.stride.push_back(static_cast<std::uint64_t>(V + 1));
  }
  const std::uint64_t S = static_cast<std::uint64_t>(E + 1) * (V + 1);
  plan.initial = static_cast<std::uint64_t>(V);
  plan.key_space = static_cast<std::size_t>(2 * S);
  const auto counts = enumerate_keys(
      region, plan, opt, detail::ExactClusterDigit{pa.vertices.front(), a.size(), &pa.vertices, S});
  // the event plays the role of a one-edge pattern bit
  PartitionTable ev(std::vector<int>{0}, E, V, Boundary::periodic, graph_hash(region));
  ev.raw() = counts;
  return expectation_exact(ev, LocalFunction::tabulate({0}, [](std::uint64_t b) { return double(b & 1u); }), {p, q, z});
}

struct SeriesTerm {
  int n = 0;
  std::size_t animals = 0;
  cplx value;              // n * sum_C phi_{p+z}[C_0 = C]
  double abs_sum = 0.0;    // n * sum_C |phi_{p+z}[C_0 = C]|
  double prob_p = 0.0;     // phi_p[|C_0| = n]
  double bound = 0.0;      // n e^{2 d c n} phi_p[|C_0| = n]
  double max_fv_diff = 0.0;  // largest |difference| between the two enclosing tori
  bool fv_flag = false;    // max_fv_diff > 1e-6
  bool tilt_agree = true;
};

struct SeriesReport {
  std::vector<SeriesTerm> terms;
  cplx partial_sum;
  double c_hat = 0.0;      // constant used in the bounds
  bool bound_holds = true;  // abs_sum <= bound for every n
  bool fv_flag = false;
};

struct SeriesOptions {
  std::optional<double> c_hat;  // fitted from the data when absent
  int torus_side = 0;           // 0 = per-animal tori diam+3 and diam+5; otherwise a fixed side
  EnumOptions enumeration;
};

/// Truncated series sum_{n <= n_max} n sum_{C ∋ 0, |C| = n} phi_{p+z}[1{C_0 = C}].
/// Without a fixed side, each term is evaluated on tori of side diam(C)+3 and
/// diam(C)+5 and the pair is compared as a finite-volume diagnostic. The
/// fitted constant is the smallest c with |ratio_C| <= e^{c |E(C) ∪ ∂C|} for
/// every animal, so that every term obeys its envelope.
inline SeriesReport chi_series(int d, double p, double q, cplx z, int n_max, const SeriesOptions& opt = {}) {
  const auto animals = enumerate_site_animals(d, n_max, true);
  SeriesReport rep;
  rep.terms.resize(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) rep.terms[n - 1].n = n;
  std::vector<std::pair<int, double>> log_ratio;  // (|supp|, log|ratio|) per animal
  std::map<int, TorusGraph> tori;
  auto torus = [&](int side) -> const TorusGraph& {
    auto it = tori.find(side);
    if (it == tori.end()) it = tori.emplace(side, build_torus(d, side)).first;
    return it->second;
  };
  for (const Animal& a : animals) {
    const int diam = linf_diameter(a.cells);
    SeriesTerm& term = rep.terms[a.size() - 1];
    ++term.animals;
    int side1 = diam + 3, side2 = diam + 5;
    if (opt.torus_side > 0) {
      if (diam + 2 > opt.torus_side) throw GeometryError("animal does not fit the fixed torus");
      side1 = side2 = opt.torus_side;
    }
    const auto r1 = cluster_event_probability(torus(side1), a, p, q, z, opt.enumeration);
    const auto r0 = cluster_event_probability(torus(side1), a, p, q, 0.0, opt.enumeration);
    if (side2 != side1) {
      const auto r2 = cluster_event_probability(torus(side2), a, p, q, z, opt.enumeration);
      term.max_fv_diff = std::max(term.max_fv_diff, std::abs(r1.value - r2.value));
    }
    term.value += static_cast<double>(a.size()) * r1.value;
    term.abs_sum += a.size() * std::abs(r1.value);
    term.prob_p += r0.value.real();
    term.tilt_agree = term.tilt_agree && r1.agree;
    const PlacedAnimal pa = place_animal(torus(side1), a);
    const int supp = static_cast<int>(pa.internal.size() + pa.boundary.size());
    if (r0.value.real() > 0.0) log_ratio.emplace_back(supp, std::log(std::abs(r1.value) / r0.value.real()));
  }
  if (opt.c_hat) {
    rep.c_hat = *opt.c_hat;
  } else {
    for (auto [s, lr] : log_ratio) rep.c_hat = std::max(rep.c_hat, std::max(0.0, lr) / s);
  }
  for (auto& term : rep.terms) {
    term.bound = term.n * std::exp(2.0 * d * rep.c_hat * term.n) * term.prob_p;
    term.fv_flag = term.max_fv_diff > 1e-6;
    rep.fv_flag = rep.fv_flag || term.fv_flag;
    rep.bound_holds = rep.bound_holds && term.abs_sum <= term.bound * (1 + 1e-12);
    rep.partial_sum += term.value;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Theta proxy

/// Monte Carlo estimate of phi^1_{Lambda_n}[0 <-> boundary of Lambda_n] by
/// exact sampling in the wired box.
inline EventEstimate theta_proxy(int d, int n, double p, double q, std::uint64_t samples, std::uint64_t seed,
                                 int threads = 1) {
  const Region box = make_box(d, n, Boundary::wired);
  EventSpec spec;
  spec.tag = EventTag::boundary_connection;
  spec.n = n;
  return estimate_event(box, p, q, spec, samples, seed, threads);
}

}  // namespace fkan
