#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "imprand/errors.hpp"

namespace imprand {

/// Exact rational arithmetic. Used wherever inputs are rational so that
/// coherence identities and backward induction hold bit-exactly.
using Rational = boost::multiprecision::cpp_rational;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar S>
inline constexpr bool is_exact_v = std::same_as<S, Rational>;

inline double to_double(double x) noexcept { return x; }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Every finite binary64 value is a dyadic rational, so this is exact.
inline Rational to_rational(double x) {
  if (!std::isfinite(x)) throw domain_error("cannot convert a non-finite value to a rational");
  return Rational(x);
}
inline Rational to_rational(const Rational& q) { return q; }

template <Scalar S>
S scalar_from(const Rational& q) {
  if constexpr (is_exact_v<S>) {
    return q;
  } else {
    return to_double(q);
  }
}

// Shortest decimal that round-trips to the same binary64.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_scalar(double x) { return format_double(x); }

inline std::string format_scalar(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Base-10 digits to an integer. Leading zeros are dropped first, since
// cpp_int reads a leading 0 as an octal prefix.
inline boost::multiprecision::cpp_int decimal_int(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return 0;
  return boost::multiprecision::cpp_int(std::string(digits.substr(first)));
}

}  // namespace detail

/// Parses "a/b", an integer, or a plain decimal ("0.25", "-1.5e-3") into an
/// exact rational. Decimal literals are read as the exact decimal value.
inline Rational parse_rational(std::string_view text) {
  using boost::multiprecision::cpp_int;
  if (text.empty()) throw parse_error("empty number", 0);
  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!detail::all_digits(num)) throw parse_error("malformed numerator in '" + std::string(text) + "'", 0);
    const std::size_t sign = text.size() - body.size();
    if (!detail::all_digits(den))
      throw parse_error("malformed denominator in '" + std::string(text) + "'", sign + slash + 1);
    cpp_int d = detail::decimal_int(den);
    if (d == 0) throw parse_error("zero denominator in '" + std::string(text) + "'", sign + slash + 1);
    Rational q(detail::decimal_int(num), d);
    return negative ? Rational(-q) : q;
  }
  std::string_view mantissa = body;
  long exponent = 0;
  if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = body.substr(0, e);
    auto exp_text = body.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!detail::all_digits(exp_text) || exp_text.size() > 4)
      throw parse_error("malformed exponent in '" + std::string(text) + "'", e + 1);
    std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    auto int_part = mantissa.substr(0, dot);
    auto frac_part = mantissa.substr(dot + 1);
    if ((!int_part.empty() && !detail::all_digits(int_part)) || (!frac_part.empty() && !detail::all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty()))
      throw parse_error("malformed decimal '" + std::string(text) + "'", 0);
    digits = std::string(int_part) + std::string(frac_part);
    frac_digits = static_cast<long>(frac_part.size());
  } else {
    if (!detail::all_digits(mantissa)) throw parse_error("malformed number '" + std::string(text) + "'", 0);
    digits = std::string(mantissa);
  }
  cpp_int value = detail::decimal_int(digits);
  long scale = exponent - frac_digits;
  cpp_int ten_pow = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(scale)));
  Rational q = scale >= 0 ? Rational(value * ten_pow) : Rational(value, ten_pow);
  return negative ? Rational(-q) : q;
}

// ln of a positive rational, accurate to binary64 even when numerator and
// denominator are far outside the double range.
inline double log_of(const Rational& q) {
  using boost::multiprecision::cpp_int;
  if (q <= 0) throw domain_error("log of a non-positive rational");
  auto log_int = [](const cpp_int& v) {
    std::size_t bits = msb(v) + 1;
    if (bits <= 1000) return std::log(v.convert_to<double>());
    std::size_t shift = bits - 64;
    cpp_int top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  };
  return log_int(numerator(q)) - log_int(denominator(q));
}

}  // namespace imprand
