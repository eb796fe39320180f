#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

#include "ccc/errors.hpp"

namespace ccc {

/// Exact rational number. Expression templates are off so that `auto` and
/// generic code over the probability type behave like ordinary values.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) fail(ErrorCode::ParseError, "zero denominator");
  return Rational(num) / Rational(den);
}

namespace detail {
inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return false;
  }
  return true;
}
}  // namespace detail

/// Parses "p/q" or "p" (optionally with a leading '-'). Anything else, floats
/// included, is rejected.
inline Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"}
                                                         : body.substr(slash + 1);
  if (!detail::all_digits(num) || !detail::all_digits(den)) {
    fail(ErrorCode::ParseError, "not an exact rational: '" + std::string(text) + "'");
  }
  using Int = boost::multiprecision::mpz_int;
  Int n(std::string{num});
  Int d(std::string{den});
  if (d == 0) fail(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
  Rational r(n, d);
  return negative ? Rational(-r) : r;
}

inline std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ccc
