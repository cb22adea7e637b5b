#pragma once

// Canonical text form of complex numbers: "a+bi" / "a-bi", with shortest
// round-trip decimal for each part.

#include <charconv>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <system_error>

#include "fkan/error.hpp"

namespace fkan {

using cplx = std::complex<double>;

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(cplx z) {
  std::string s = format_double(z.real());
  const double im = z.imag();
  if (std::signbit(im))
    s += "-" + format_double(-im);
  else
    s += "+" + format_double(im);
  return s + "i";
}

namespace detail {
inline bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}
}  // namespace detail

/// Accepts "a+bi", "a-bi", "a", "bi", "i", "-i" (whitespace not allowed).
inline cplx parse_complex(std::string_view s) {
  if (s.empty()) throw InvalidArgument("empty complex number");
  double re = 0.0, im = 0.0;
  if (s.back() != 'i') {
    if (!detail::parse_real(s, re)) throw InvalidArgument("bad complex number: " + std::string(s));
    return {re, 0.0};
  }
  std::string_view body = s.substr(0, s.size() - 1);
  // split at the last sign that is not the leading one and not part of an exponent
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  std::string_view re_part = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  std::string_view im_part = split == std::string_view::npos ? body : body.substr(split);
  if (!re_part.empty() && !detail::parse_real(re_part, re))
    throw InvalidArgument("bad complex number: " + std::string(s));
  if (im_part.empty() || im_part == "+")
    im = 1.0;
  else if (im_part == "-")
    im = -1.0;
  else if (!detail::parse_real(im_part, im))
    throw InvalidArgument("bad complex number: " + std::string(s));
  return {re, im};
}

}  // namespace fkan
