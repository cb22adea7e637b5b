#pragma once

// JSON and CSV encodings of graphs, partition tables, polymer lists and reports.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkan/cluster_expansion.hpp"
#include "fkan/complex_io.hpp"
#include "fkan/error.hpp"
#include "fkan/exact_fk.hpp"
#include "fkan/lattice.hpp"
#include "fkan/observables.hpp"
#include "fkan/polymer.hpp"
#include "fkan/resummation.hpp"
#include "fkan/sampler.hpp"

namespace fkan {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

inline json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  return {j.at("re").get<double>(), j.at("im").get<double>()};
}

// ---------------------------------------------------------------------------
// Graphs

inline json graph_json(const Graph& g, std::optional<int> L = std::nullopt) {
  json j;
  j["d"] = g.dim;
  j["N"] = g.period;
  if (L) j["L"] = *L;
  j["num_vertices"] = g.num_vertices;
  json edges = json::array();
  for (const Edge& e : g.edges) edges.push_back({e.u, e.v, e.axis});
  j["edges"] = std::move(edges);
  return j;
}

/// Reads {d, N, edges}. A description without edges is rebuilt as the torus T_N.
inline Graph graph_from_json(const json& j) {
  const int d = j.value("d", 0), N = j.value("N", 0);
  if (!j.contains("edges")) return build_torus(d, N).graph();
  if (d >= 2 && N >= 3) {
    Graph g = build_torus(d, N).graph();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.size() > 2 ? e.at(2).get<int>() : 0});
    if (edges == g.edges) return g;
  }
  int nv = j.value("num_vertices", 0);
  std::vector<std::pair<int, int>> list;
  for (const auto& e : j.at("edges")) {
    list.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    nv = std::max({nv, list.back().first + 1, list.back().second + 1});
  }
  Graph g = make_graph(nv, list);
  std::size_t i = 0;
  for (const auto& e : j.at("edges")) g.edges[i++].axis = e.size() > 2 ? e.at(2).get<int>() : 0;
  return g;
}

// ---------------------------------------------------------------------------
// Partition tables

inline json partition_table_json(const PartitionTable& t) {
  json j;
  j["graph_hash"] = std::to_string(t.hash());
  j["boundary"] = to_string(t.boundary());
  j["num_edges"] = t.num_edges();
  j["num_vertices"] = t.num_vertices();
  json counts = json::array();
  for (auto [m, k, c] : t.entries()) counts.push_back({m, k, std::to_string(c)});
  j["counts"] = std::move(counts);
  return j;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("not an unsigned integer: " + s);
  return v;
}

inline PartitionTable partition_table_from_json(const json& j) {
  const int E = j.at("num_edges").get<int>(), V = j.at("num_vertices").get<int>();
  PartitionTable t({}, E, V, parse_boundary(j.at("boundary").get<std::string>()),
                   parse_u64(j.at("graph_hash").get<std::string>()));
  for (const auto& row : j.at("counts")) {
    const int m = row.at(0).get<int>(), k = row.at(1).get<int>();
    if (m < 0 || m > E || k < 0 || k > V) throw InvalidArgument("partition table entry out of range");
    t.raw()[t.index(0, m, k)] = parse_u64(row.at(2).get<std::string>());
  }
  return t;
}

// ---------------------------------------------------------------------------
// Polymers: arrays of site coordinate lists

inline json polymers_json(const CoarseTorus& ct, const std::vector<Polymer>& polymers) {
  json arr = json::array();
  for (const Polymer& g : polymers) {
    json sites = json::array();
    for_each_site(g.sites, [&](int s) { sites.push_back(ct.site_coords(s)); });
    arr.push_back(std::move(sites));
  }
  return arr;
}

/// Site coordinates of each polymer, as written in the file. Accepts a bare
/// array or an object with a "polymers" array.
inline std::vector<std::vector<std::vector<int>>> polymer_coords_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("polymers") : j;
  std::vector<std::vector<std::vector<int>>> out;
  for (const auto& poly : arr) {
    auto& sites = out.emplace_back();
    for (const auto& c : poly) sites.push_back(c.get<std::vector<int>>());
    if (sites.empty()) throw InvalidArgument("empty polymer in fixture");
  }
  return out;
}

inline std::vector<Polymer> polymers_from_coords(const CoarseTorus& ct,
                                                 const std::vector<std::vector<std::vector<int>>>& coords) {
  std::vector<Polymer> out;
  for (const auto& poly : coords) {
    Polymer g;
    for (const auto& c : poly) {
      if (static_cast<int>(c.size()) != ct.d()) throw InvalidArgument("site coordinate has the wrong dimension");
      g.sites |= SiteSet{1} << ct.site_index(c);
    }
    out.push_back(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline json expectation_json(const ExpectationResult& r) {
  return json{{"value", complex_json(r.value)},
              {"direct", complex_json(r.direct)},
              {"tilt_mass", complex_json(r.tilt_mass)},
              {"rel_diff", r.rel_diff},
              {"agree", r.agree}};
}

inline json resummation_json(const ResummationReport& r) {
  return json{{"lhs", complex_json(r.lhs)},         {"rhs", complex_json(r.rhs)},
              {"abs_residual", r.abs_residual},     {"rel_residual", r.rel_residual},
              {"n_families", r.n_families},         {"zero_xi", r.zero_xi}};
}

inline json estimate_json(const EventEstimate& e) {
  return json{{"event", e.event},         {"n", e.n},       {"p", e.p},         {"q", e.q},
              {"estimate", e.estimate},   {"stderr", e.stderr_}, {"n_samples", e.n_samples},
              {"seed", e.seed},           {"wilson", {e.wilson.lo, e.wilson.hi}}};
}

inline json kp_json(const KPReport& r, const ClusterSums* sums = nullptr) {
  json j{{"criterion", "kotecky-preiss"}, {"pass", r.pass}, {"worst_margin", r.worst_margin}};
  json orders = json::array();
  if (sums)
    for (std::size_t n = 1; n < sums->per_order.size(); ++n) orders.push_back(complex_json(sums->per_order[n]));
  j["per_order"] = std::move(orders);
  return j;
}

inline void write_scan_csv(std::ostream& os, const ScanReport& r) {
  os << "re_z,im_z,re_val,im_val,abs_val\n";
  for (const auto& pt : r.points)
    os << format_double(pt.z.real()) << ',' << format_double(pt.z.imag()) << ',' << format_double(pt.value.real())
       << ',' << format_double(pt.value.imag()) << ',' << format_double(std::abs(pt.value)) << '\n';
}

inline void write_histogram_csv(std::ostream& os, const std::map<int, std::uint64_t>& hist) {
  os << "size,count\n";
  for (auto [k, c] : hist) os << k << ',' << c << '\n';
}

inline void write_series_csv(std::ostream& os, const SeriesReport& r) {
  os << "n,re_term,im_term,abs_bound,fv_flag\n";
  for (const auto& t : r.terms)
    os << t.n << ',' << format_double(t.value.real()) << ',' << format_double(t.value.imag()) << ','
       << format_double(t.bound) << ',' << (t.fv_flag ? 1 : 0) << '\n';
}

}  // namespace fkan
