#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "fkan/error.hpp"

namespace fkan {

/// Exact rational with 64-bit numerator and positive denominator, kept in
/// lowest terms. Ample for Ursell coefficients up to n = 6.
class Rational {
 public:
  constexpr Rational(std::int64_t n = 0, std::int64_t d = 1) : num_(n), den_(d) {
    if (d == 0) throw InvalidArgument("Rational: zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  Rational abs() const { return {num_ < 0 ? -num_ : num_, den_}; }

  friend Rational operator+(Rational a, Rational b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return {a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_};
  }
  friend Rational operator-(Rational a) { return {-a.num_, a.den_}; }
  friend Rational operator-(Rational a, Rational b) { return a + (-b); }
  friend Rational operator*(Rational a, Rational b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_), g2 = std::gcd(b.num_, a.den_);
    return {(a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1)), (a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1))};
  }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw InvalidArgument("Rational: division by zero");
    return a * Rational(b.den_, b.num_);
  }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend auto operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace fkan
