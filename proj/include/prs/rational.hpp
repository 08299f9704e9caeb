#pragma once

// Exact arithmetic used by the model and analysis layers, plus rigorous
// comparisons involving Euler's constant.

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "prs/errors.hpp"

namespace prs {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline std::string to_string(const Rational& q) { return q.str(); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational pow2(long exponent) {
  BigInt one = 1;
  if (exponent >= 0) return Rational(BigInt(one << static_cast<unsigned>(exponent)));
  return Rational(one, BigInt(one << static_cast<unsigned>(-exponent)));
}

inline Rational rational_pow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= base;
  return result;
}

// Parses "a", "a/b", and (only when allow_decimal) "12.5" / "1e-3"-free
// plain decimals. Decimals are read as the exact decimal fraction they spell.
inline Rational parse_rational(std::string_view text, bool allow_decimal = false) {
  auto fail = [&](const char* why) {
    throw InputError("invalid rational '" + std::string(text) + "': " + why);
  };
  auto parse_int = [&](std::string_view s, bool allow_sign) -> BigInt {
    if (s.empty()) fail("empty integer");
    std::size_t i = 0;
    bool negative = false;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) {
      negative = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) fail("missing digits");
    for (std::size_t j = i; j < s.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(s[j]))) fail("non-digit character");
    BigInt v(std::string(s.substr(i)));
    return negative ? BigInt(-v) : v;
  };

  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) fail("empty");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_int(text.substr(0, slash), true);
    BigInt den = parse_int(text.substr(slash + 1), false);
    if (den == 0) fail("zero denominator");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    if (!allow_decimal) fail("decimals are not accepted here, write a/b");
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
    if (whole.empty() && frac.empty()) fail("missing digits");
    BigInt w = whole.empty() ? BigInt(0) : parse_int(whole, false);
    BigInt f = frac.empty() ? BigInt(0) : parse_int(frac, false);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational q = Rational(w) + Rational(f, scale);
    return negative ? Rational(-q) : q;
  }
  return Rational(parse_int(text, true));
}

// Rational enclosure lo < e < hi from the truncated series sum 1/k!.
struct EInterval {
  Rational lo;
  Rational hi;
};

inline EInterval e_interval(unsigned terms) {
  Rational sum = 0;
  BigInt factorial = 1;
  for (unsigned k = 0; k <= terms; ++k) {
    if (k > 0) factorial *= k;
    sum += Rational(BigInt(1), factorial);
  }
  // Tail sum_{k>N} 1/k! < 1/(N! N).
  return {sum, sum + Rational(BigInt(1), BigInt(factorial * terms))};
}

// Decides g(e) <= rhs for g nondecreasing in e, refining the enclosure of e
// until the verdict is certain. Equality cannot occur for nonconstant g with
// rational coefficients since e is transcendental.
inline bool certified_leq_in_e(const std::function<Rational(const Rational&)>& g, const Rational& rhs) {
  for (unsigned terms = 20; terms <= 640; terms *= 2) {
    EInterval e = e_interval(terms);
    if (g(e.hi) <= rhs) return true;
    if (g(e.lo) > rhs) return false;
  }
  throw EnumerationLimit("could not separate expression in e from its bound");
}

inline constexpr double kE = 2.718281828459045235360287471352662498;

}  // namespace prs
