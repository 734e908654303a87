#pragma once

// Exact integer/rational scalars (GMP-backed) and their text forms.
// Text forms accepted: "p", "p/q", decimal "12.375" (exact), dyadic "m*2^e".

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>

#include "latlab/errors.hpp"

namespace latlab {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

inline Int rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }
inline Int int_abs(const Int& n) { return n < 0 ? Int(-n) : n; }

inline int rat_sign(const Rat& q) { return q < 0 ? -1 : (q > 0 ? 1 : 0); }

// floor(p/q) as an integer, exact.
inline Int rat_floor(const Rat& q) {
  Int n = rat_num(q), d = rat_den(q);
  Int quo = n / d;
  if (n % d != 0 && n < 0) quo -= 1;
  return quo;
}

inline Int rat_ceil(const Rat& q) { return -rat_floor(Rat(-q)); }

inline Rat rat_pow(const Rat& q, long e) {
  if (e < 0) {
    if (q == 0) throw ZeroDivision("rat_pow: 0 to a negative power");
    return Rat(1) / rat_pow(q, -e);
  }
  Rat acc = 1, base = q;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

inline Int int_pow(Int base, unsigned long e) {
  Int acc = 1;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

// 2^e as a rational, e may be negative.
inline Rat rat_2pow(long e) {
  if (e >= 0) return Rat(Int(1) << static_cast<unsigned>(e));
  return Rat(1, Int(1) << static_cast<unsigned>(-e));
}

// Nearest dyadic m/2^k; ties resolve downward (deterministic).
inline Rat rat_round_dyadic(const Rat& q, unsigned k) {
  Rat scaled = q * rat_2pow(static_cast<long>(k));
  Int m = rat_floor(scaled + Rat(1, 2));
  if (Rat(m) == scaled + Rat(1, 2)) m -= 1;
  return Rat(m) * rat_2pow(-static_cast<long>(k));
}

namespace detail {

inline bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Parses one rational token. Whitespace is the caller's problem.
inline Rat parse_rat(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw ParseError("empty rational literal");
  bool neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  std::string body = s.substr(i);
  if (body.empty()) throw ParseError("bare sign is not a rational: '" + text + "'");

  auto fail = [&]() -> Rat { throw ParseError("bad rational literal: '" + text + "'"); };

  Rat value;
  if (auto star = body.find("*2^"); star != std::string::npos) {
    // dyadic m*2^e
    std::string m = body.substr(0, star), e = body.substr(star + 3);
    bool eneg = false;
    if (!e.empty() && (e[0] == '+' || e[0] == '-')) {
      eneg = e[0] == '-';
      e = e.substr(1);
    }
    if (!detail::all_digits(m) || !detail::all_digits(e)) return fail();
    long ee = std::strtol(e.c_str(), nullptr, 10);
    value = Rat(Int(m)) * rat_2pow(eneg ? -ee : ee);
  } else if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string n = body.substr(0, slash), d = body.substr(slash + 1);
    if (!detail::all_digits(n) || !detail::all_digits(d)) return fail();
    Int den(d);
    if (den == 0) throw ZeroDivision("rational literal with zero denominator: '" + text + "'");
    value = Rat(Int(n), den);
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (fp.empty()) fp = "0";
    if (!detail::all_digits(ip) || !detail::all_digits(fp)) return fail();
    Int scale = int_pow(Int(10), static_cast<unsigned long>(fp.size()));
    value = Rat(Int(ip) * scale + Int(fp), scale);
  } else {
    if (!detail::all_digits(body)) return fail();
    value = Rat(Int(body));
  }
  return neg ? Rat(-value) : value;
}

inline std::string rat_to_string(const Rat& q) {
  Int n = rat_num(q), d = rat_den(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

// Writes q as "m*2^e" when the denominator is a power of two; empty otherwise.
inline std::optional<std::string> rat_to_dyadic_string(const Rat& q) {
  Int d = rat_den(q);
  long e = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++e;
  }
  if (d != 1) return std::nullopt;
  return rat_num(q).str() + "*2^-" + std::to_string(e);
}

}  // namespace latlab
