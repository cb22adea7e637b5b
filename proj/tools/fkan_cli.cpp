// fkan: command-line driver for exact FK tables, polymer expansions and
// exact sampling. Exit codes: 0 ok, 1 usage, 2 budget refusal, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fkan.hpp"

using namespace fkan;

namespace {

struct Geometry {
  int d = 2;
  int N = 3;
  int L = 1;
  int box = -1;
  std::string boundary = "periodic";
  int budget = kDefaultEnumerationBudget;
  int threads = 1;
};

struct Params {
  double p = 0.5;
  double q = 1.0;
  std::string z = "0";
};

struct Output {
  std::string path = "-";
  std::string format;
};

void add_geometry(CLI::App* sub, Geometry& g, bool with_box = true) {
  sub->add_option("--d", g.d, "dimension")->check(CLI::Range(1, 8));
  sub->add_option("--N", g.N, "torus side")->check(CLI::PositiveNumber);
  if (with_box) {
    sub->add_option("--box", g.box, "use the box [-n,n]^d instead of the torus");
    sub->add_option("--boundary", g.boundary, "periodic | free | wired")
        ->check(CLI::IsMember({"periodic", "free", "wired"}));
  }
  sub->add_option("--budget", g.budget, "enumeration edge budget")->check(CLI::PositiveNumber);
  sub->add_option("--threads", g.threads, "worker threads")->check(CLI::NonNegativeNumber);
}

void add_params(CLI::App* sub, Params& p, bool with_z) {
  sub->add_option("--p", p.p, "edge parameter");
  sub->add_option("--q", p.q, "cluster weight");
  if (with_z) sub->add_option("--z", p.z, "complex perturbation a+bi");
}

void add_output(CLI::App* sub, Output& o, const std::string& default_format) {
  o.format = default_format;
  sub->add_option("--out", o.path, "output file ('-' for stdout)");
  sub->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

Region region_of(const Geometry& g) {
  if (g.box >= 0) return make_box(g.d, g.box, parse_boundary(g.boundary == "periodic" ? "free" : g.boundary));
  if (g.boundary != "periodic") throw InvalidArgument("free and wired boundaries need --box");
  return build_torus(g.d, g.N).region();
}

EnumOptions enum_options(const Geometry& g) {
  EnumOptions o;
  o.edge_budget = g.budget;
  o.threads = g.threads;
  return o;
}

/// Echo of every option of the subcommand, given or defaulted.
json config_echo(const CLI::App* sub) {
  json echo;
  echo["command"] = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (r.size() == 1)
        echo[name] = r.front();
      else
        echo[name] = r;
    } else if (!opt->get_default_str().empty()) {
      echo[name] = opt->get_default_str();
    }
  }
  return echo;
}

json header(const CLI::App* sub) { return json{{"tool_version", kToolVersion}, {"config_echo", config_echo(sub)}}; }

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidArgument("cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(const Output& o, const CLI::App* sub, json body) {
  json out = header(sub);
  for (auto& [k, v] : body.items()) out[k] = v;
  Sink s(o.path);
  s.os() << out.dump(2) << '\n';
}

void emit_csv_header(std::ostream& os, const CLI::App* sub) { os << "# " << header(sub).dump() << '\n'; }

/// Splices `key=value` lines of the --config file into argv after the
/// subcommand name. Options given explicitly on the command line win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : rest) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (!given) extra.push_back(flag + "=" + value);
  }
  std::size_t at = rest.empty() ? 0 : 1;
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return rest;
}

CoarseTorus coarse_for(const TorusGraph& t, int L) { return build_coarse(t, L); }

Activity synthetic_activity(const std::vector<Polymer>& polymers, const std::string& base) {
  return power_activity(polymers, parse_complex(base));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computation and verification engine for FK-percolation analyticity"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_help_all_flag("--help-all", "help for every subcommand");
  app.add_option("--config", "flat key=value file of option defaults");

  Geometry geo;
  Params prm;
  std::map<const CLI::App*, Output> outputs;
  std::string event = "edge:0";
  std::vector<int> support;
  double radius = 0.1;
  int rings = 10, angles = 32, points = 64;
  std::vector<double> eps_grid{0.02, 0.05, 0.1};
  int max_size = 4, n_max = 5;
  std::string activity = "0.01";
  std::string mode = "independent", exclusion = "compatible", relation;
  std::string tuple_path;
  int coarse_side = 0;
  std::uint64_t seed = 1, samples = 1000;
  std::string event_tag = "D_N", histogram_path;
  int radius_n = 1;
  int threshold = -1;
  double c_hat = -1.0;
  int torus_side = 0;
  double beta = -1.0, theta = -1.0, chi = -1.0;

  auto* partition = app.add_subcommand("partition", "exact partition table Z(m, k) of a torus or box");
  add_geometry(partition, geo);
  partition->add_option("--support", support, "edges whose pattern is resolved")->delimiter(',');
  add_output(partition, outputs[partition], "json");

  auto* expect = app.add_subcommand("expect", "phi_{p+z}[F] by the tilted and direct routes");
  add_geometry(expect, geo);
  add_params(expect, prm, true);
  expect->add_option("--event", event, "local function, e.g. edge:0, all-open:0,1, parity:0,3");
  add_output(expect, outputs[expect], "json");

  auto* zscan = app.add_subcommand("zscan", "|phi_p[alpha_z^|w|]| over a polar grid");
  add_geometry(zscan, geo);
  add_params(zscan, prm, false);
  zscan->add_option("--radius", radius, "largest |z|");
  zscan->add_option("--rings", rings)->check(CLI::PositiveNumber);
  zscan->add_option("--angles", angles)->check(CLI::PositiveNumber);
  add_output(zscan, outputs[zscan], "csv");

  auto* ratio = app.add_subcommand("ratio-fit", "fit of the constant in |phi_{p+z}[F]| <= 2 e^{c|Supp F|} phi_p[F]");
  add_geometry(ratio, geo);
  add_params(ratio, prm, false);
  ratio->add_option("--event", event, "nonnegative local function");
  ratio->add_option("--eps", eps_grid, "radii")->delimiter(',');
  ratio->add_option("--points", points)->check(CLI::PositiveNumber);
  add_output(ratio, outputs[ratio], "json");

  auto* polymers_cmd = app.add_subcommand("polymers", "connected site sets of the coarse torus");
  add_geometry(polymers_cmd, geo, false);
  polymers_cmd->add_option("--L", geo.L, "coarse box half-side")->check(CLI::PositiveNumber);
  polymers_cmd->add_option("--max-size", max_size)->check(CLI::PositiveNumber);
  add_output(polymers_cmd, outputs[polymers_cmd], "json");

  auto* ursell_cmd = app.add_subcommand("ursell", "Ursell function of a polymer tuple");
  ursell_cmd->add_option("--tuple", tuple_path, "JSON array of polymers (site coordinate lists)")->required();
  ursell_cmd->add_option("--relation", relation, "intersect | touch (default intersect)")
      ->check(CLI::IsMember({"intersect", "touch"}));
  ursell_cmd->add_option("--M", coarse_side, "coarse torus side for touch");
  add_output(ursell_cmd, outputs[ursell_cmd], "json");

  auto add_polymer_model = [&](CLI::App* sub) {
    add_geometry(sub, geo, false);
    sub->add_option("--L", geo.L, "coarse box half-side")->check(CLI::PositiveNumber);
    sub->add_option("--max-size", max_size)->check(CLI::PositiveNumber);
    sub->add_option("--activity", activity, "w(gamma) = activity^|gamma|");
    sub->add_option("--mode", mode)->check(CLI::IsMember({"independent", "disjoint"}));
    sub->add_option("--n-max", n_max)->check(CLI::Range(1, kUrsellHardCap));
    add_output(sub, outputs[sub], "json");
  };
  auto* xi = app.add_subcommand("xi", "exact polymer partition function and its truncated cluster expansion");
  add_polymer_model(xi);
  auto* kp = app.add_subcommand("kp-check", "Kotecky-Preiss criterion and cluster-expansion bounds");
  add_polymer_model(kp);

  auto* resum = app.add_subcommand("resum-verify", "polymer resummation against the exact expectation");
  add_geometry(resum, geo, false);
  resum->add_option("--L", geo.L, "coarse box half-side")->check(CLI::PositiveNumber);
  add_params(resum, prm, true);
  resum->add_option("--event", event, "local function");
  resum->add_option("--mode", mode)->check(CLI::IsMember({"independent", "disjoint"}));
  resum->add_option("--exclusion", exclusion, "compatible | intersecting")
      ->check(CLI::IsMember({"compatible", "intersecting"}));
  add_output(resum, outputs[resum], "json");

  auto* sample = app.add_subcommand("sample", "exact samples by coupling from the past");
  add_geometry(sample, geo);
  add_params(sample, prm, false);
  sample->add_option("--seed", seed);
  sample->add_option("--samples", samples)->check(CLI::PositiveNumber);
  add_output(sample, outputs[sample], "json");

  auto* events = app.add_subcommand("events", "Monte Carlo event probabilities from exact samples");
  add_geometry(events, geo);
  add_params(events, prm, false);
  events->add_option("--event", event_tag, "U_n | A_n | D_N | boundary | size");
  events->add_option("--n", radius_n, "box radius");
  events->add_option("--threshold", threshold, "diameter threshold");
  events->add_option("--seed", seed);
  events->add_option("--samples", samples)->check(CLI::PositiveNumber);
  events->add_option("--histogram", histogram_path, "CSV of |C_0| counts (event size)");
  add_output(events, outputs[events], "json");

  auto* series = app.add_subcommand("chi-series", "truncated susceptibility series over clusters of the origin");
  series->add_option("--d", geo.d)->check(CLI::Range(2, 8));
  add_params(series, prm, true);
  series->add_option("--n-max", n_max)->check(CLI::PositiveNumber);
  series->add_option("--c-hat", c_hat, "envelope constant (fitted when negative)");
  series->add_option("--torus-side", torus_side, "fixed torus side (0 = per-animal tori)");
  series->add_option("--budget", geo.budget)->check(CLI::PositiveNumber);
  add_output(series, outputs[series], "csv");

  auto* convert = app.add_subcommand("convert", "Edwards-Sokal conversions");
  convert->add_option("--beta", beta, "inverse temperature");
  convert->add_option("--p", prm.p, "edge parameter (used when --beta is absent)");
  convert->add_option("--q", prm.q);
  convert->add_option("--theta", theta, "FK percolation probability");
  convert->add_option("--chi", chi, "FK susceptibility");
  add_output(convert, outputs[convert], "json");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const Output& out = outputs[sub];
  try {
    if (sub == partition) {
      const Region r = region_of(geo);
      const auto t = build_partition_table(r, {}, enum_options(geo));
      json body = partition_table_json(t);
      if (!support.empty()) {
        const auto ts = build_partition_table(r, support, enum_options(geo));
        json pat = json::array();
        for (std::uint64_t a = 0; a < ts.patterns(); ++a) {
          json rows = json::array();
          for (int m = 0; m <= ts.num_edges(); ++m)
            for (int k = 0; k <= ts.num_vertices(); ++k)
              if (auto c = ts.count(a, m, k)) rows.push_back({m, k, std::to_string(c)});
          pat.push_back(json{{"pattern", a}, {"counts", rows}});
        }
        body["support"] = support;
        body["by_pattern"] = std::move(pat);
      }
      emit_json(out, sub, std::move(body));
    } else if (sub == expect) {
      const Region r = region_of(geo);
      const LocalFunction F = parse_local_function(event);
      const auto res = expectation_exact(r, F, {prm.p, prm.q, parse_complex(prm.z)}, enum_options(geo));
      json body = expectation_json(res);
      body["expectation"] = format_complex(res.value);
      emit_json(out, sub, std::move(body));
    } else if (sub == zscan) {
      const Region r = region_of(geo);
      ScanReport rep;
      if (prm.q == 1.0) {
        const int E = r.graph.num_edges();
        rep = zero_free_scan([&](cplx z) { return tilt_mass_bernoulli(E, prm.p, z); }, prm.p, radius, rings, angles);
      } else {
        rep = zero_free_scan(build_partition_table(r, {}, enum_options(geo)), prm.p, prm.q, radius, rings, angles);
      }
      if (out.format == "csv") {
        Sink s(out.path);
        emit_csv_header(s.os(), sub);
        write_scan_csv(s.os(), rep);
      } else {
        json pts = json::array();
        for (const auto& pt : rep.points) pts.push_back({{"z", complex_json(pt.z)}, {"value", complex_json(pt.value)}});
        emit_json(out, sub,
                  json{{"min_abs", rep.min_abs}, {"argmin", complex_json(rep.argmin)}, {"delta_hat", rep.delta_hat},
                       {"points", pts}});
      }
    } else if (sub == ratio) {
      const Region r = region_of(geo);
      const LocalFunction F = parse_local_function(event);
      RatioFit fit;
      if (prm.q == 1.0) {
        if (!F.nonnegative() || F.identically_zero()) throw InvalidArgument("F must be nonnegative and nonzero");
        const int E = r.graph.num_edges();
        fit = ratio_bound_fit([&](cplx z) { return expectation_bernoulli(E, F, prm.p, z).value; },
                              static_cast<int>(F.support().size()), eps_grid, points);
      } else {
        fit = ratio_bound_fit(build_partition_table(r, F.support(), enum_options(geo)), F, prm.p, prm.q, eps_grid,
                              points);
      }
      json rows = json::array();
      for (const auto& row : fit.rows)
        rows.push_back(json{{"eps", row.eps},
                            {"c_hat", row.c_hat},
                            {"c_raw", row.c_raw},
                            {"max_ratio", row.max_ratio},
                            {"argmax", complex_json(row.argmax)}});
      emit_json(out, sub,
                json{{"rows", rows},
                     {"nonincreasing_as_eps_decreases", fit.nonincreasing_as_eps_decreases},
                     {"bound_holds", fit.bound_holds}});
    } else if (sub == polymers_cmd) {
      const TorusGraph t = build_torus(geo.d, geo.N);
      const CoarseTorus ct = coarse_for(t, geo.L);
      const auto polys = enumerate_polymers(ct, std::min(max_size, ct.num_sites()), std::max(max_size, kDefaultPolymerCap));
      emit_json(out, sub, json{{"coarse_side", ct.side()}, {"count", polys.size()}, {"polymers", polymers_json(ct, polys)}});
    } else if (sub == ursell_cmd) {
      std::ifstream in(tuple_path);
      if (!in) throw InvalidArgument("cannot open " + tuple_path);
      const json fixture = json::parse(in);
      const auto coords = polymer_coords_from_json(fixture);
      std::string rel = relation;
      if (rel.empty()) rel = fixture.is_object() ? fixture.value("relation", "intersect") : "intersect";
      if (coarse_side == 0 && fixture.is_object()) coarse_side = fixture.value("M", 0);
      int d = 0, side = 2;
      for (const auto& poly : coords)
        for (const auto& c : poly) {
          d = std::max(d, static_cast<int>(c.size()));
          for (int x : c) side = std::max(side, x + 1);
        }
      if (coarse_side > 0) side = coarse_side;
      // a coarse torus of side `side` with L = 1 sits on T_{2 side}
      const TorusGraph t = build_torus(std::max(d, 2), 2 * side);
      const CoarseTorus ct = coarse_for(t, 1);
      if (d < 2) throw InvalidArgument("site coordinates need at least two components");
      std::vector<SiteSet> tuple;
      for (const auto& g : polymers_from_coords(ct, coords)) tuple.push_back(g.sites);
      const Rational phi =
          ursell(tuple, &ct, rel == "touch" ? Incompatibility::touch : Incompatibility::intersect, kUrsellHardCap);
      emit_json(out, sub, json{{"n", tuple.size()}, {"relation", rel}, {"phi", phi.to_string()}, {"value", phi.to_double()}});
    } else if (sub == xi || sub == kp) {
      const TorusGraph t = build_torus(geo.d, geo.N);
      const CoarseTorus ct = coarse_for(t, geo.L);
      const auto polys = enumerate_polymers(ct, std::min(max_size, ct.num_sites()), std::max(max_size, kDefaultPolymerCap));
      const Activity a = synthetic_activity(polys, activity);
      const FamilyMode fm = parse_family_mode(mode);
      const auto sums = truncated_log_Xi(polys, ct, a, fm, n_max);
      if (sub == xi) {
        const cplx X = exact_Xi(polys, ct, a, fm);
        if (std::abs(X) < kZeroXiTolerance) throw ZeroXi("polymer partition function vanishes");
        json orders = json::array();
        cplx partial = 0.0;
        for (int n = 1; n <= n_max; ++n) {
          partial += sums.per_order[n];
          orders.push_back(json{{"n", n},
                                {"term", complex_json(sums.per_order[n])},
                                {"abs_error", std::abs(std::exp(partial) - X)}});
        }
        emit_json(out, sub,
                  json{{"polymers", polys.size()}, {"xi", complex_json(X)}, {"log_xi", complex_json(std::log(X))},
                       {"truncated", complex_json(sums.total())}, {"per_order", orders}});
      } else {
        const Incompatibility rel = relation_for(fm);
        const auto rep = kp_criterion_check(polys, &ct, a, rel);
        const double c = fit_animal_constant(geo.d, default_animal_cap(geo.d));
        const auto vol = volume_bound_check(polys, ct, a, rel, n_max, c);
        json body = kp_json(rep, &sums);
        body["volume_bound"] = json{{"sum_abs", vol.sum_abs}, {"C", vol.C}, {"bound", vol.bound},
                                    {"hypothesis", vol.hypothesis}, {"pass", vol.pass}};
        body["c_hat"] = c;
        emit_json(out, sub, std::move(body));
      }
    } else if (sub == resum) {
      const TorusGraph t = build_torus(geo.d, geo.N);
      const CoarseTorus ct = coarse_for(t, geo.L);
      const LocalFunction F = parse_local_function(event);
      const cplx z = parse_complex(prm.z);
      if (prm.q == 1.0) {
        BernoulliEncoding enc(ct, prm.p);
        ResummationOptions o;
        o.mode = parse_family_mode(mode);
        o.exclusion = exclusion == "compatible" ? TraceExclusion::compatible : TraceExclusion::intersecting;
        emit_json(out, sub, resummation_json(verify_resummation_identity(enc, F, z, o)));
      } else {
        const auto bt = build_box_table(t, ct, F.support(), enum_options(geo));
        const auto rep = verify_pm_one_expansion(bt, F, prm.p, prm.q, z);
        emit_json(out, sub,
                  json{{"identity", "plus-minus-one"}, {"lhs", complex_json(rep.lhs)}, {"rhs", complex_json(rep.rhs)},
                       {"rel_residual", rep.rel_residual}});
      }
    } else if (sub == sample) {
      const Region r = region_of(geo);
      json arr = json::array();
      json horizons = json::array();
      HeatBath hb(r, prm.p, prm.q);
      for (std::uint64_t i = 0; i < samples; ++i) {
        const auto res = cftp_sample(hb, seed, i);
        arr.push_back(res.sample.to_string());
        horizons.push_back(res.horizon);
      }
      emit_json(out, sub, json{{"num_edges", r.graph.num_edges()}, {"samples", arr}, {"horizons", horizons}});
    } else if (sub == events) {
      const Region r = region_of(geo);
      EventSpec spec;
      spec.tag = parse_event_tag(event_tag);
      spec.n = radius_n;
      if (threshold >= 0) spec.threshold = threshold;
      const auto est = estimate_event(r, prm.p, prm.q, spec, samples, seed, std::max(1, geo.threads));
      if (!histogram_path.empty()) {
        Sink s(histogram_path);
        emit_csv_header(s.os(), sub);
        write_histogram_csv(s.os(), est.histogram);
      }
      json body = estimate_json(est);
      if (spec.tag == EventTag::origin_size) {
        const auto fit = log_linear_fit(est.histogram);
        body["log_linear_fit"] = json{{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
      }
      emit_json(out, sub, std::move(body));
    } else if (sub == series) {
      SeriesOptions o;
      if (c_hat >= 0.0) o.c_hat = c_hat;
      o.torus_side = torus_side;
      o.enumeration.edge_budget = geo.budget;
      o.enumeration.threads = 1;
      const auto rep = chi_series(geo.d, prm.p, prm.q, parse_complex(prm.z), n_max, o);
      if (out.format == "csv") {
        Sink s(out.path);
        emit_csv_header(s.os(), sub);
        write_series_csv(s.os(), rep);
      } else {
        json terms = json::array();
        for (const auto& tm : rep.terms)
          terms.push_back(json{{"n", tm.n},
                               {"animals", tm.animals},
                               {"term", complex_json(tm.value)},
                               {"abs_sum", tm.abs_sum},
                               {"prob", tm.prob_p},
                               {"abs_bound", tm.bound},
                               {"fv_flag", tm.fv_flag}});
        emit_json(out, sub,
                  json{{"partial_sum", complex_json(rep.partial_sum)}, {"c_hat", rep.c_hat},
                       {"bound_holds", rep.bound_holds}, {"fv_flag", rep.fv_flag}, {"terms", terms}});
      }
    } else if (sub == convert) {
      const double p = beta > 0.0 ? p_of_beta(beta) : prm.p;
      json body{{"p", p}, {"beta", beta_of_p(p)}, {"q", prm.q}, {"factor", potts_factor(prm.q)}};
      if (theta >= 0.0) body["magnetisation"] = potts_magnetisation(theta, prm.q);
      if (chi >= 0.0) body["chi_potts"] = potts_susceptibility(chi, prm.q);
      emit_json(out, sub, std::move(body));
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
