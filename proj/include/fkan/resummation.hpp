#pragma once

// The +-1 expansion of the tilt alpha_z^|omega| over coarse boxes, the
// activities w_z and family weights G_z built from a dependency encoding, and
// exact checks of the resulting polymer representation of phi_{p+z}[F].

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fkan/cluster_expansion.hpp"
#include "fkan/complex_io.hpp"
#include "fkan/error.hpp"
#include "fkan/exact_fk.hpp"
#include "fkan/lattice.hpp"
#include "fkan/local_function.hpp"
#include "fkan/polymer.hpp"

namespace fkan {

inline constexpr double kZeroXiTolerance = 1e-12;

/// f_{z,x}(omega) = prod over edges e of the canonical box of x of alpha_z^{omega(e)}, minus 1.
inline cplx f_value(const CoarseTorus& ct, int x, const Config& omega, double p, cplx z) {
  int open = 0;
  for (int e : ct.box(x).edges) open += omega[e];
  return std::pow(alpha(p, z), open) - 1.0;
}

/// Coarse sites whose boxes meet the support of F.
inline SiteSet coarse_support(const CoarseTorus& ct, const LocalFunction& F) {
  return ct.coarse_support(F.support());
}

/// A coupling of omega with clusters C_x of coarse sites. Implementations
/// answer the exact expectations the polymer representation needs.
class DependencyEncoding {
 public:
  virtual ~DependencyEncoding() = default;
  virtual const CoarseTorus& coarse() const = 0;
  virtual double p() const = 0;

  /// E[F(omega) prod_{x in A} f_{z,x}(omega) 1{C_{A ∪ cover} = target}];
  /// F = nullptr stands for F = 1. C_∅ = ∅.
  virtual cplx joint(const LocalFunction* F, SiteSet A, SiteSet cover, SiteSet target, cplx z) const = 0;

  /// E[|F| 1{C_cover = target}].
  virtual double indicator_mass(const LocalFunction* F, SiteSet cover, SiteSet target) const = 0;

  /// Law of C_A as (cluster, probability) pairs.
  virtual std::vector<std::pair<SiteSet, double>> cluster_law(SiteSet A) const = 0;

  /// P[edge e open].
  virtual double edge_marginal(int e) const = 0;

  /// P[|C_A| >= n]
  double tail(SiteSet A, int n) const {
    double s = 0.0;
    for (auto [c, pr] : cluster_law(A))
      if (site_count(c) >= n) s += pr;
    return s;
  }
};

/// Bernoulli(p) edges with C_x = {x}: the q = 1 reference encoding, for which
/// decoupling holds by independence.
class BernoulliEncoding final : public DependencyEncoding {
 public:
  BernoulliEncoding(const CoarseTorus& ct, double p) : ct_(&ct), p_(p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("BernoulliEncoding: p must lie in (0,1)");
  }

  const CoarseTorus& coarse() const override { return *ct_; }
  double p() const override { return p_; }
  double edge_marginal(int) const override { return p_; }

  std::vector<std::pair<SiteSet, double>> cluster_law(SiteSet A) const override { return {{A, 1.0}}; }

  /// E[f_{z,x}] = ((1-p)/(1-p-z))^{|box|} - 1
  cplx mean_f(int x, cplx z) const {
    return std::pow(tilt_mass_bernoulli(1, p_, z), static_cast<int>(ct_->box(x).edges.size())) - 1.0;
  }

  cplx joint(const LocalFunction* F, SiteSet A, SiteSet cover, SiteSet target, cplx z) const override {
    if ((A | cover) != target) return 0.0;
    return product_expectation(F, A, z);
  }

  double indicator_mass(const LocalFunction* F, SiteSet cover, SiteSet target) const override {
    if (cover != target) return 0.0;
    if (!F) return 1.0;
    double s = 0.0;
    const int n = static_cast<int>(F->support().size());
    for (std::uint64_t a = 0; a < F->patterns(); ++a) {
      const int open = std::popcount(a);
      s += std::abs((*F)(a)) * std::pow(p_, open) * std::pow(1.0 - p_, n - open);
    }
    return s;
  }

  /// E[F prod_{x in A} f_{z,x}] under the product measure. Boxes of A that
  /// avoid Supp(F) factor out; for the others the support pattern is summed
  /// explicitly and the remaining box edges contribute (1-p+p alpha)^{count}.
  cplx product_expectation(const LocalFunction* F, SiteSet A, cplx z) const {
    const cplx al = alpha(p_, z);
    const cplx g = 1.0 - p_ + p_ * al;
    const SiteSet touched = F ? ct_->coarse_support(F->support()) : SiteSet{0};
    cplx far = 1.0;
    for_each_site(A & ~touched, [&](int x) { far *= mean_f(x, z); });
    if (!F) return far;
    const auto& sup = F->support();
    const int n = static_cast<int>(sup.size());
    std::vector<int> near_sites = sites_of(A & touched);
    std::vector<int> rest(near_sites.size());
    for (std::size_t i = 0; i < near_sites.size(); ++i) {
      int inside = 0;
      for (int e : sup) inside += ct_->site_of_edge(e) == near_sites[i];
      rest[i] = static_cast<int>(ct_->box(near_sites[i]).edges.size()) - inside;
    }
    cplx near = 0.0;
    for (std::uint64_t a = 0; a < F->patterns(); ++a) {
      const double fa = (*F)(a);
      if (fa == 0.0) continue;
      const int open = std::popcount(a);
      cplx term = fa * std::pow(p_, open) * std::pow(1.0 - p_, n - open);
      for (std::size_t i = 0; i < near_sites.size(); ++i) {
        int open_in_box = 0;
        for (int j = 0; j < n; ++j)
          if (((a >> j) & 1u) && ct_->site_of_edge(sup[j]) == near_sites[i]) ++open_in_box;
        term *= std::pow(al, open_in_box) * std::pow(g, rest[i]) - 1.0;
      }
      near += term;
    }
    return far * near;
  }

 private:
  const CoarseTorus* ct_;
  double p_;
};

/// w_z(gamma) = sum over A ⊆ gamma of E[prod_{x in A} f_{z,x} 1{C_A = gamma}].
inline cplx activity_w(const DependencyEncoding& enc, const Polymer& g, cplx z) {
  cplx s = 0.0;
  for (SiteSet A = g.sites;; A = (A - 1) & g.sites) {
    s += enc.joint(nullptr, A, 0, g.sites, z);
    if (A == 0) break;
  }
  return s;
}

inline Activity activity_w(const DependencyEncoding& enc, const std::vector<Polymer>& polymers, cplx z) {
  Activity a;
  a.tag = "w_z";
  for (const auto& g : polymers) a.w.push_back(activity_w(enc, g, z));
  return a;
}

/// G_z = sum over A ⊆ Tr of E[F prod_{x in A} f_{z,x} 1{C_{A ∪ Delta} = Tr}],
/// with Delta the coarse support of F.
inline cplx weight_G(const DependencyEncoding& enc, SiteSet trace, const LocalFunction& F, cplx z) {
  const SiteSet delta = coarse_support(enc.coarse(), F);
  if ((delta & ~trace) != 0) return 0.0;
  cplx s = 0.0;
  for (SiteSet A = trace;; A = (A - 1) & trace) {
    s += enc.joint(&F, A, delta, trace, z);
    if (A == 0) break;
  }
  return s;
}

/// The comparison weight with every f replaced by its bound alpha_eps^{|box|} - 1.
inline double weight_G_dominating(const DependencyEncoding& enc, SiteSet trace, const LocalFunction& F, double eps) {
  const CoarseTorus& ct = enc.coarse();
  const SiteSet delta = coarse_support(ct, F);
  if ((delta & ~trace) != 0) return 0.0;
  const double al = alpha(enc.p(), eps).real();
  double s = 0.0;
  for (SiteSet A = trace;; A = (A - 1) & trace) {
    double prod = 1.0;
    for_each_site(A, [&](int x) { prod *= std::pow(al, static_cast<double>(ct.box(x).edges.size())) - 1.0; });
    s += prod * enc.indicator_mass(&F, A | delta, trace);
    if (A == 0) break;
  }
  return s;
}

struct ResummationReport {
  cplx lhs;
  cplx rhs;
  double abs_residual = 0.0;
  double rel_residual = 0.0;  // |lhs - rhs| / (1 + |lhs|)
  std::uint64_t n_families = 0;
  cplx xi;
  bool zero_xi = false;
};

struct ResummationOptions {
  FamilyMode mode = FamilyMode::independent;
  TraceExclusion exclusion = TraceExclusion::compatible;
};

/// Polymer representation of phi_{p+z}[F] on the torus:
///   sum over families in F ∩ I(Delta) of G_z(family) Xi(w^{family}) / Xi(w)
/// against the exact value `lhs` computed by exact-fk.
inline ResummationReport resummation_rhs(const DependencyEncoding& enc, const LocalFunction& F, cplx z, cplx lhs,
                                         const ResummationOptions& opt = {}) {
  const CoarseTorus& ct = enc.coarse();
  const auto polymers = enumerate_polymers(ct, ct.num_sites(), ct.num_sites());
  const Activity w = activity_w(enc, polymers, z);
  ResummationReport rep;
  rep.lhs = lhs;
  rep.xi = exact_Xi(polymers, ct, w, opt.mode);
  if (std::abs(rep.xi) < kZeroXiTolerance) {
    rep.zero_xi = true;
    throw ZeroXi("polymer partition function vanishes");
  }
  const SiteSet delta = coarse_support(ct, F);
  FamilyConstraint c;
  c.must_intersect = delta;
  cplx rhs = 0.0;
  rep.n_families = for_each_family(polymers, ct, opt.mode, c, [&](const PolymerFamily& fam) {
    const cplx G = weight_G(enc, fam.trace, F, z);
    if (G == 0.0) return;
    const SiteSet excluded = excluded_sites(ct, fam.trace, opt.mode, opt.exclusion);
    rhs += G * exact_Xi(polymers, ct, exclude(polymers, w, excluded), opt.mode) / rep.xi;
  });
  rep.rhs = rhs;
  rep.abs_residual = std::abs(rep.lhs - rep.rhs);
  rep.rel_residual = rep.abs_residual / (1.0 + std::abs(rep.lhs));
  return rep;
}

/// q = 1 end-to-end check with the Bernoulli encoding; the left side is the
/// exact Bernoulli expectation at p + z.
inline ResummationReport verify_resummation_identity(const BernoulliEncoding& enc, const LocalFunction& F, cplx z,
                                                     const ResummationOptions& opt = {}) {
  const int E = enc.coarse().parent().num_edges();
  const cplx lhs = expectation_bernoulli(E, F, enc.p(), z).value;
  return resummation_rhs(enc, F, z, lhs, opt);
}

struct PlusMinusOneReport {
  cplx lhs;  // phi_p[F alpha_z^|omega|]
  cplx rhs;  // phi_p[F sum_A prod_{x in A} f_{z,x}]
  double rel_residual = 0.0;
};

/// Encoding-free +-1 expansion on a box-resolved table, valid for any q.
inline PlusMinusOneReport verify_pm_one_expansion(const BoxTable& bt, const LocalFunction& F, double p, double q,
                                                  cplx z) {
  const auto Fv = F.lift(bt.support());
  const cplx al = alpha(p, z);
  const double xp = p / (1.0 - p);
  const int nb = bt.num_boxes();
  if (nb > 16) throw BudgetExceeded("verify_pm_one_expansion: too many boxes");
  int max_box = 0;
  for (int b = 0; b < nb; ++b) max_box = std::max(max_box, bt.box_edges(b));
  std::vector<cplx> alpha_pow(static_cast<std::size_t>(max_box) + 1, 1.0);
  for (int j = 1; j <= max_box; ++j) alpha_pow[j] = alpha_pow[j - 1] * al;
  std::vector<double> q_pow(static_cast<std::size_t>(bt.num_vertices()) + 1, 1.0);
  for (int k = 1; k <= bt.num_vertices(); ++k) q_pow[k] = q_pow[k - 1] * q;

  cplx lhs = 0.0, rhs = 0.0;
  double norm = 0.0;
  std::vector<int> m(nb);
  for (std::size_t s = 0; s < bt.box_states(); ++s) {
    int total = 0;
    for (int b = 0; b < nb; ++b) total += (m[b] = bt.box_open(s, b));
    cplx tilt = 1.0;
    for (int b = 0; b < nb; ++b) tilt *= alpha_pow[m[b]];
    cplx expanded = 0.0;
    for (std::uint32_t A = 0; A < (1u << nb); ++A) {
      cplx prod = 1.0;
      for (int b = 0; b < nb; ++b)
        if ((A >> b) & 1u) prod *= alpha_pow[m[b]] - 1.0;
      expanded += prod;
    }
    const double xm = std::pow(xp, total);
    for (std::uint64_t a = 0; a < bt.patterns(); ++a)
      for (int k = 0; k <= bt.num_vertices(); ++k) {
        const auto c = bt.count(a, s, k);
        if (!c) continue;
        const double base = static_cast<double>(c) * xm * q_pow[k];
        norm += base;
        lhs += base * Fv[a] * tilt;
        rhs += base * Fv[a] * expanded;
      }
  }
  PlusMinusOneReport rep;
  rep.lhs = lhs / norm;
  rep.rhs = rhs / norm;
  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.rel_residual = scale == 0.0 ? 0.0 : std::abs(rep.lhs - rep.rhs) / scale;
  return rep;
}

struct WeightDecayRow {
  double eps = 0.0;
  std::vector<double> max_w_by_size;  // index = |gamma|
  double C = 0.0;                     // max |w_z| e^{|gamma|(2+c)} over sizes and the circle
};

struct WeightDecayReport {
  std::vector<WeightDecayRow> rows;
  double decay_rate = 0.0;  // minus the slope of log max|w| against |gamma| at the largest eps
  bool C_monotone = true;   // C nonincreasing as eps decreases
};

inline WeightDecayReport verify_weight_decay(const DependencyEncoding& enc, const std::vector<Polymer>& polymers,
                                             std::vector<double> eps_grid, int max_size, double c_hat,
                                             int points = 16) {
  WeightDecayReport rep;
  for (double eps : eps_grid) {
    WeightDecayRow row;
    row.eps = eps;
    row.max_w_by_size.assign(static_cast<std::size_t>(max_size) + 1, 0.0);
    for (int a = 0; a < points; ++a) {
      const cplx z = std::polar(eps, 2.0 * std::numbers::pi * a / points);
      for (const auto& g : polymers) {
        if (g.size() > max_size) continue;
        const double w = std::abs(activity_w(enc, g, z));
        row.max_w_by_size[g.size()] = std::max(row.max_w_by_size[g.size()], w);
        row.C = std::max(row.C, w * std::exp(g.size() * (2.0 + c_hat)));
      }
    }
    rep.rows.push_back(std::move(row));
  }
  auto sorted = rep.rows;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1].C > sorted[i].C) rep.C_monotone = false;
  if (!sorted.empty()) {
    const auto& top = sorted.back().max_w_by_size;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int s = 1; s < static_cast<int>(top.size()); ++s) {
      if (top[s] <= 0.0) continue;
      const double y = std::log(top[s]);
      sx += s;
      sy += y;
      sxx += double(s) * s;
      sxy += s * y;
      ++n;
    }
    if (n >= 2) rep.decay_rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

struct GSummabilityReport {
  double weighted_sum = 0.0;  // max over the circle of sum |G_z| e^{-c |Tr|}
  double phi_p_F = 0.0;
  std::uint64_t n_families = 0;
  bool dominated = true;  // |G_z| <= G^1 for every family and sampled z
  double worst_domination_ratio = 0.0;
};

inline GSummabilityReport verify_G_summability(const DependencyEncoding& enc, const LocalFunction& F, double eps,
                                               double c_eps, FamilyMode mode = FamilyMode::independent,
                                               int points = 16) {
  const CoarseTorus& ct = enc.coarse();
  const auto polymers = enumerate_polymers(ct, ct.num_sites(), ct.num_sites());
  FamilyConstraint c;
  c.must_intersect = coarse_support(ct, F);
  const auto families = enumerate_families(polymers, ct, mode, c);
  GSummabilityReport rep;
  rep.n_families = families.size();
  rep.phi_p_F = enc.indicator_mass(&F, 0, 0);  // E[|F|] since C_∅ = ∅
  std::vector<double> dom(families.size());
  for (std::size_t i = 0; i < families.size(); ++i) dom[i] = weight_G_dominating(enc, families[i].trace, F, eps);
  for (int a = 0; a < points; ++a) {
    const cplx z = std::polar(eps, 2.0 * std::numbers::pi * a / points);
    double s = 0.0;
    for (std::size_t i = 0; i < families.size(); ++i) {
      const double G = std::abs(weight_G(enc, families[i].trace, F, z));
      s += G * std::exp(-c_eps * site_count(families[i].trace));
      if (dom[i] > 0.0) rep.worst_domination_ratio = std::max(rep.worst_domination_ratio, G / dom[i]);
      if (G > dom[i] * (1 + 1e-12) + 1e-300) rep.dominated = false;
    }
    rep.weighted_sum = std::max(rep.weighted_sum, s);
  }
  return rep;
}

}  // namespace fkan
