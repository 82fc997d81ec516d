#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "linfembed/errors.hpp"

namespace linfembed {

// Exact arithmetic mode. Expression templates are disabled so Rat behaves
// like a plain value type in generic code.
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static const char* mode_name() { return "rational"; }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static const char* mode_name() { return "float"; }
};

inline Rat abs_of(const Rat& x) { return x < 0 ? Rat(-x) : x; }
inline double abs_of(double x) { return std::fabs(x); }

template <class S>
const S& max_of(const S& a, const S& b) { return a < b ? b : a; }
template <class S>
const S& min_of(const S& a, const S& b) { return b < a ? b : a; }

template <class S>
S from_ratio(long long num, long long den) {
  return S(num) / S(den);
}

// 2^k as a scalar, k >= 0.
template <class S>
S pow2(int k) {
  S r{1};
  for (int i = 0; i < k; ++i) r += r;
  return r;
}

// The unique n >= 0 with 2^n <= x < 2^{n+1}. Requires x >= 1; powers of two
// are compared exactly in both modes.
template <class S>
int shell_of(const S& x) {
  S p{1};
  S q = p + p;
  int n = 0;
  while (q <= x) {
    p = q;
    q = p + p;
    ++n;
  }
  return n;
}

// Non-strict comparisons backing every certified inequality. Rational mode
// is exact; float mode allows relative slack 1e-9.
template <class S>
struct check_policy;

template <>
struct check_policy<Rat> {
  static bool le(const Rat& a, const Rat& b) { return a <= b; }
  static bool ge(const Rat& a, const Rat& b) { return a >= b; }
  static bool eq(const Rat& a, const Rat& b) { return a == b; }
};

template <>
struct check_policy<double> {
  static constexpr double slack = 1e-9;
  static bool le(double a, double b) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return a <= b + slack * scale;
  }
  static bool ge(double a, double b) { return le(b, a); }
  static bool eq(double a, double b) { return le(a, b) && le(b, a); }
};

inline std::string to_string_scalar(const Rat& x) {
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline std::string to_string_scalar(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_integer_token(std::string_view s) {
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Exact decimal -> rational: "1.25" -> 5/4, "2e3" -> 2000.
inline std::optional<Rat> decimal_to_rat(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  long long frac_digits = 0;
  long long exponent = 0;
  size_t i = 0;
  bool seen_digit = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    digits += s[i];
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      digits += s[i];
      ++frac_digits;
      seen_digit = true;
    }
  }
  if (!seen_digit) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::string_view tail = s.substr(i);
    if (!is_integer_token(tail)) return std::nullopt;
    auto res = std::from_chars(tail.data() + (tail.front() == '+' ? 1 : 0),
                               tail.data() + tail.size(), exponent);
    if (res.ec != std::errc()) return std::nullopt;
    i = s.size();
  }
  if (i != s.size()) return std::nullopt;
  Rat value(BigInt(digits.empty() ? "0" : digits));
  long long shift = exponent - frac_digits;
  if (shift > 4096 || shift < -4096) return std::nullopt;
  Rat ten(10);
  for (long long k = 0; k < shift; ++k) value *= ten;
  for (long long k = 0; k < -shift; ++k) value /= ten;
  return neg ? Rat(-value) : value;
}

}  // namespace detail

// Accepts "p/q" fractions and plain decimals (exactly, in rational mode).
template <class S>
std::optional<S> parse_scalar(std::string_view text);

template <>
inline std::optional<Rat> parse_scalar<Rat>(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (s.empty()) return std::nullopt;
  size_t slash = s.find('/');
  if (slash != std::string_view::npos) {
    std::string_view p = detail::trim(s.substr(0, slash));
    std::string_view q = detail::trim(s.substr(slash + 1));
    if (!detail::is_integer_token(p) || !detail::is_integer_token(q)) return std::nullopt;
    BigInt num{std::string(p)};
    BigInt den{std::string(q)};
    if (den == 0) return std::nullopt;
    return Rat(num) / Rat(den);
  }
  return detail::decimal_to_rat(s);
}

template <>
inline std::optional<double> parse_scalar<double>(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (s.empty()) return std::nullopt;
  size_t slash = s.find('/');
  if (slash != std::string_view::npos) {
    auto p = parse_scalar<double>(s.substr(0, slash));
    auto q = parse_scalar<double>(s.substr(slash + 1));
    if (!p || !q || *q == 0.0) return std::nullopt;
    return *p / *q;
  }
  std::string buf{s};
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

inline double to_double(const Rat& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

}  // namespace linfembed
