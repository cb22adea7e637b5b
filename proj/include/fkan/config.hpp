#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fkan {

/// Percolation configuration: one bit per edge index of the parent graph.
class Config {
 public:
  Config() = default;
  explicit Config(std::size_t num_edges, bool open = false)
      : size_(num_edges), words_((num_edges + 63) / 64, open ? ~std::uint64_t{0} : 0) {
    trim();
  }

  static Config from_bits(std::size_t num_edges, std::uint64_t bits) {
    Config c(num_edges);
    if (!c.words_.empty()) c.words_[0] = bits;
    c.trim();
    return c;
  }

  std::size_t size() const { return size_; }

  bool operator[](std::size_t e) const { return (words_[e >> 6] >> (e & 63)) & 1u; }
  bool test(std::size_t e) const { return (*this)[e]; }

  void set(std::size_t e, bool open = true) {
    const std::uint64_t mask = std::uint64_t{1} << (e & 63);
    if (open)
      words_[e >> 6] |= mask;
    else
      words_[e >> 6] &= ~mask;
  }
  void flip(std::size_t e) { words_[e >> 6] ^= std::uint64_t{1} << (e & 63); }

  /// |omega|, the number of open edges.
  std::size_t open_count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  /// Edgewise order omega <= omega'.
  bool leq(const Config& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  /// Bits of the given edges packed into an integer (bit i = edge support[i]).
  template <class Range>
  std::uint64_t restrict_to(const Range& support) const {
    std::uint64_t bits = 0;
    std::size_t i = 0;
    for (auto e : support) {
      if (test(static_cast<std::size_t>(e))) bits |= std::uint64_t{1} << i;
      ++i;
    }
    return bits;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t e = 0; e < size_; ++e)
      if (test(e)) s[e] = '1';
    return s;
  }

  friend bool operator==(const Config&, const Config&) = default;

 private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace fkan
