#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fkan/config.hpp"
#include "fkan/error.hpp"

namespace fkan {

inline constexpr int kMaxLocalSupport = 20;

/// Real function of a configuration that only reads the edges in `support`.
/// Values are tabulated over the 2^|support| restrictions; bit i of a pattern
/// is the state of support[i].
class LocalFunction {
 public:
  LocalFunction() = default;

  static LocalFunction tabulate(std::vector<int> support, const std::function<double(std::uint64_t)>& f,
                                std::string name = "F") {
    if (static_cast<int>(support.size()) > kMaxLocalSupport) throw BudgetExceeded("local function support too large");
    std::vector<int> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("local function support has repeated edges");
    LocalFunction F;
    F.support_ = std::move(support);
    F.name_ = std::move(name);
    F.values_.resize(std::size_t{1} << F.support_.size());
    for (std::uint64_t a = 0; a < F.values_.size(); ++a) F.values_[a] = f(a);
    return F;
  }

  const std::vector<int>& support() const { return support_; }
  const std::string& name() const { return name_; }
  std::size_t patterns() const { return values_.size(); }
  double operator()(std::uint64_t pattern) const { return values_[pattern]; }
  double evaluate(const Config& omega) const { return values_[omega.restrict_to(support_)]; }

  bool nonnegative() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
  }
  bool identically_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }
  double sup_norm() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
  }

  /// Value as a function of a pattern over a larger support that contains
  /// this one (`outer[i]` is the edge for bit i of the outer pattern).
  std::vector<double> lift(std::span<const int> outer) const {
    std::vector<int> pos(support_.size(), -1);
    for (std::size_t i = 0; i < support_.size(); ++i)
      for (std::size_t j = 0; j < outer.size(); ++j)
        if (outer[j] == support_[i]) pos[i] = static_cast<int>(j);
    if (std::find(pos.begin(), pos.end(), -1) != pos.end())
      throw InvalidArgument("local function support is not contained in the table support");
    std::vector<double> out(std::size_t{1} << outer.size());
    for (std::uint64_t a = 0; a < out.size(); ++a) {
      std::uint64_t b = 0;
      for (std::size_t i = 0; i < pos.size(); ++i)
        if ((a >> pos[i]) & 1u) b |= std::uint64_t{1} << i;
      out[a] = values_[b];
    }
    return out;
  }

 private:
  std::vector<int> support_;
  std::vector<double> values_;
  std::string name_;
};

inline LocalFunction constant_function(double c) {
  return LocalFunction::tabulate({}, [c](std::uint64_t) { return c; }, "const");
}

/// 1{e open}
inline LocalFunction edge_open(int e) {
  return LocalFunction::tabulate({e}, [](std::uint64_t a) { return static_cast<double>(a & 1u); },
                                 "edge:" + std::to_string(e));
}

/// Indicator that omega restricted to the support equals `pattern`.
inline LocalFunction cylinder(std::vector<int> support, std::uint64_t pattern) {
  return LocalFunction::tabulate(std::move(support), [pattern](std::uint64_t a) { return a == pattern ? 1.0 : 0.0; },
                                 "cylinder");
}

inline LocalFunction all_open(std::vector<int> support) {
  const std::uint64_t full = (std::uint64_t{1} << support.size()) - 1;
  return LocalFunction::tabulate(std::move(support), [full](std::uint64_t a) { return a == full ? 1.0 : 0.0; },
                                 "all-open");
}

inline LocalFunction any_open(std::vector<int> support) {
  return LocalFunction::tabulate(std::move(support), [](std::uint64_t a) { return a != 0 ? 1.0 : 0.0; }, "any-open");
}

inline LocalFunction open_count(std::vector<int> support) {
  return LocalFunction::tabulate(std::move(support),
                                 [](std::uint64_t a) { return static_cast<double>(std::popcount(a)); }, "open-count");
}

/// (-1)^{number of open edges}; not nonnegative.
inline LocalFunction parity(std::vector<int> support) {
  return LocalFunction::tabulate(std::move(support),
                                 [](std::uint64_t a) { return std::popcount(a) % 2 == 0 ? 1.0 : -1.0; }, "parity");
}

/// Parses "edge:E", "all-open:E,E,...", "any-open:...", "open-count:...",
/// "parity:..." and "cylinder:E,E,...:PATTERN" (bit i of PATTERN = edge i open).
inline LocalFunction parse_local_function(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidArgument("local function needs the form kind:edges, got " + spec);
  const std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  std::uint64_t pattern = 0;
  if (kind == "cylinder") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw InvalidArgument("cylinder needs edges and a pattern");
    pattern = std::stoull(rest.substr(c2 + 1));
    rest = rest.substr(0, c2);
  }
  std::vector<int> edges;
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    int e = -1;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), e);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || e < 0)
      throw InvalidArgument("bad edge index '" + tok + "' in " + spec);
    edges.push_back(e);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (kind == "edge") {
    if (edges.size() != 1) throw InvalidArgument("edge: takes exactly one edge");
    return edge_open(edges[0]);
  }
  if (kind == "all-open") return all_open(edges);
  if (kind == "any-open") return any_open(edges);
  if (kind == "open-count") return open_count(edges);
  if (kind == "parity") return parity(edges);
  if (kind == "cylinder") return cylinder(edges, pattern);
  throw InvalidArgument("unknown local function kind: " + kind);
}

}  // namespace fkan
