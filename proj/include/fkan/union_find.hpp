#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace fkan {

/// Disjoint sets with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n = 0) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1), sets_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    return true;
  }

  int set_size(int x) { return size_[find(x)]; }
  int num_sets() const { return sets_; }
  int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int sets_;
};

/// Union-find without path compression, so that the last union can be undone.
/// Used by the depth-first configuration enumerator.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(int n = 0) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
    history_.reserve(static_cast<std::size_t>(n));
  }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  /// Returns true when two distinct sets were merged; only then may rollback() be called.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }

  void rollback() {
    const int b = history_.back();
    history_.pop_back();
    const int a = parent_[b];
    size_[a] -= size_[b];
    parent_[b] = b;
  }

  int set_size(int x) const { return size_[find(x)]; }
  std::size_t depth() const { return history_.size(); }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
};

}  // namespace fkan
