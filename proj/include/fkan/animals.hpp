#pragma once

// Site animals of Z^d (connected finite vertex sets), via Redelmeier's
// algorithm for fixed animals followed by translation to every anchor.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fkan/error.hpp"

namespace fkan {

using Cell = std::vector<int>;

struct Animal {
  std::vector<Cell> cells;  // sorted lexicographically
  int size() const { return static_cast<int>(cells.size()); }
  friend bool operator<(const Animal& a, const Animal& b) {
    if (a.cells.size() != b.cells.size()) return a.cells.size() < b.cells.size();
    return a.cells < b.cells;
  }
  friend bool operator==(const Animal&, const Animal&) = default;
};

inline int default_animal_cap(int d) { return d <= 2 ? 8 : (d == 3 ? 6 : 4); }

namespace detail {

class Redelmeier {
 public:
  Redelmeier(int d, int max_n) : d_(d), n_(max_n), side_(2 * max_n + 1) {
    long long total = 1;
    for (int i = 0; i < d; ++i) total *= side_;
    if (total > (1LL << 26)) throw BudgetExceeded("animal enumeration grid too large");
    seen_.assign(static_cast<std::size_t>(total), 0);
    stride_.resize(d);
    long long s = 1;
    for (int i = d - 1; i >= 0; --i) {
      stride_[i] = static_cast<int>(s);
      s *= side_;
    }
    origin_ = 0;
    for (int i = 0; i < d; ++i) origin_ += n_ * stride_[i];
  }

  /// Calls out(cells) once per fixed animal of each size 1..max_n; cells are
  /// encoded grid indices with the lexicographically smallest cell at the origin.
  template <class Out>
  void run(Out&& out) {
    std::vector<int> untried{origin_};
    seen_[origin_] = 1;
    std::vector<int> animal;
    recurse(untried, animal, out);
  }

  Cell decode(int code) const {
    Cell c(d_);
    for (int i = 0; i < d_; ++i) {
      c[i] = code / stride_[i] - n_;
      code %= stride_[i];
    }
    return c;
  }

 private:
  // A cell is admissible when it is lexicographically >= the origin, so
  // every fixed animal is generated from its smallest cell exactly once.
  bool admissible(int code) const {
    for (int i = 0; i < d_; ++i) {
      const int c = (code / stride_[i]) % side_ - n_;
      if (c != 0) return c > 0;
    }
    return true;
  }

  template <class Out>
  void recurse(std::vector<int> untried, std::vector<int>& animal, Out& out) {
    while (!untried.empty()) {
      const int c = untried.back();
      untried.pop_back();
      animal.push_back(c);
      out(animal);
      if (static_cast<int>(animal.size()) < n_) {
        std::vector<int> added;
        std::vector<int> next = untried;
        for (int i = 0; i < d_; ++i) {
          for (int sign : {+1, -1}) {
            const int coord = (c / stride_[i]) % side_ + sign;
            if (coord < 0 || coord >= side_) continue;
            const int nb = c + sign * stride_[i];
            if (seen_[nb] || !admissible(nb)) continue;
            seen_[nb] = 1;
            added.push_back(nb);
            next.push_back(nb);
          }
        }
        recurse(std::move(next), animal, out);
        for (int nb : added) seen_[nb] = 0;
      }
      animal.pop_back();
    }
  }

  int d_;
  int n_;
  int side_;
  int origin_;
  std::vector<int> stride_;
  std::vector<char> seen_;
};

}  // namespace detail

/// Number of fixed animals (up to translation) of each size 0..max_n.
inline std::vector<std::uint64_t> count_fixed_animals(int d, int max_n) {
  if (d < 1 || max_n < 0) throw InvalidArgument("count_fixed_animals: bad arguments");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_n) + 1, 0);
  if (max_n == 0) return counts;
  detail::Redelmeier r(d, max_n);
  r.run([&](const std::vector<int>& a) { ++counts[a.size()]; });
  return counts;
}

/// All connected vertex sets of size 1..max_n. With `anchored` each set
/// contains the origin (every translate of every fixed animal through the
/// origin); otherwise one representative per translation class, with its
/// smallest cell at the origin. Sorted by size, then lexicographically.
inline std::vector<Animal> enumerate_site_animals(int d, int max_n, bool anchored, int cap = -1) {
  if (cap < 0) cap = default_animal_cap(d);
  if (max_n > cap) throw BudgetExceeded("enumerate_site_animals: max_n exceeds cap");
  if (d < 1 || max_n < 1) return {};
  detail::Redelmeier r(d, max_n);
  std::vector<Animal> out;
  r.run([&](const std::vector<int>& codes) {
    Animal a;
    for (int code : codes) a.cells.push_back(r.decode(code));
    std::sort(a.cells.begin(), a.cells.end());
    if (!anchored) {
      out.push_back(std::move(a));
      return;
    }
    for (const Cell& anchor : a.cells) {
      Animal t;
      t.cells.reserve(a.cells.size());
      for (const Cell& c : a.cells) {
        Cell shifted(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) shifted[i] = c[i] - anchor[i];
        t.cells.push_back(std::move(shifted));
      }
      std::sort(t.cells.begin(), t.cells.end());
      out.push_back(std::move(t));
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

/// Anchored animal counts a_n = n * (fixed count), for n = 0..max_n.
inline std::vector<std::uint64_t> anchored_animal_counts(int d, int max_n) {
  auto fixed = count_fixed_animals(d, max_n);
  for (std::size_t n = 0; n < fixed.size(); ++n) fixed[n] *= n;
  return fixed;
}

/// Empirical animal growth constant: max over 1 <= n <= max_n of log(a_n)/n,
/// so that a_n <= exp(c n) on the enumerated range.
inline double fit_animal_constant(int d, int max_n) {
  const auto a = anchored_animal_counts(d, max_n);
  double c = 0.0;
  for (int n = 1; n <= max_n; ++n) c = std::max(c, std::log(static_cast<double>(a[n])) / n);
  return c;
}

/// L-infinity diameter of a cell set.
inline int linf_diameter(const std::vector<Cell>& cells) {
  if (cells.empty()) return 0;
  int diam = 0;
  for (std::size_t i = 0; i < cells[0].size(); ++i) {
    int lo = cells[0][i], hi = cells[0][i];
    for (const Cell& c : cells) {
      lo = std::min(lo, c[i]);
      hi = std::max(hi, c[i]);
    }
    diam = std::max(diam, hi - lo);
  }
  return diam;
}

}  // namespace fkan
