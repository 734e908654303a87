#pragma once

// Dense univariate polynomials over the rationals: exact arithmetic, Sturm
// chains with certified real root isolation, resultants. Coefficient vectors are
// little-endian (index = power) with no trailing zeros; the zero polynomial is {}.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "latlab/errors.hpp"
#include "latlab/interval.hpp"
#include "latlab/rational.hpp"

namespace latlab {

using PolyQ = std::vector<Rat>;

inline void poly_trim(PolyQ& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const PolyQ& p) { return static_cast<int>(p.size()) - 1; }

inline bool poly_is_zero(const PolyQ& p) { return p.empty(); }

inline PolyQ poly_add(const PolyQ& a, const PolyQ& b) {
  PolyQ r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  poly_trim(r);
  return r;
}

inline PolyQ poly_neg(PolyQ a) {
  for (auto& c : a) c = -c;
  return a;
}

inline PolyQ poly_sub(const PolyQ& a, const PolyQ& b) { return poly_add(a, poly_neg(b)); }

inline PolyQ poly_mul(const PolyQ& a, const PolyQ& b) {
  if (a.empty() || b.empty()) return {};
  PolyQ r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_trim(r);
  return r;
}

inline PolyQ poly_scale(PolyQ a, const Rat& s) {
  for (auto& c : a) c *= s;
  poly_trim(a);
  return a;
}

// Quotient and remainder over the rational field.
inline std::pair<PolyQ, PolyQ> poly_divmod(const PolyQ& a, const PolyQ& b) {
  if (poly_is_zero(b)) throw ZeroDivision("polynomial division by zero");
  PolyQ rem = a, quo;
  int db = poly_degree(b);
  if (poly_degree(a) >= db) quo.assign(a.size() - b.size() + 1, Rat(0));
  while (poly_degree(rem) >= db) {
    int dr = poly_degree(rem);
    Rat f = rem.back() / b.back();
    quo[dr - db] = f;
    for (int i = 0; i <= db; ++i) rem[dr - db + i] -= f * b[i];
    poly_trim(rem);
  }
  return {quo, rem};
}

inline PolyQ poly_derivative(const PolyQ& p) {
  if (p.size() <= 1) return {};
  PolyQ r(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * Rat(static_cast<long>(i));
  return r;
}

inline Rat poly_eval(const PolyQ& p, const Rat& x) {
  Rat acc(0);
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline Interval poly_eval_iv(const PolyQ& p, const Interval& x) {
  Interval acc = Interval::zero(x.precision_bits());
  for (size_t i = p.size(); i-- > 0;)
    acc = acc * x + Interval::from_rat(p[i], x.precision_bits());
  return acc;
}

inline PolyQ poly_monic(PolyQ p) {
  if (p.empty()) return p;
  Rat lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline PolyQ poly_gcd(PolyQ a, PolyQ b) {
  while (!poly_is_zero(b)) {
    PolyQ r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(std::move(a));
}

inline bool poly_is_squarefree(const PolyQ& p) {
  if (poly_degree(p) <= 1) return true;
  return poly_degree(poly_gcd(p, poly_derivative(p))) == 0;
}

// Sturm chain of a squarefree polynomial; for general input pass p/gcd(p,p').
inline std::vector<PolyQ> sturm_chain(const PolyQ& p) {
  std::vector<PolyQ> chain;
  if (poly_is_zero(p)) return chain;
  chain.push_back(p);
  PolyQ d = poly_derivative(p);
  if (!poly_is_zero(d)) chain.push_back(d);
  while (chain.size() >= 2 && poly_degree(chain.back()) > 0) {
    PolyQ r = poly_divmod(chain[chain.size() - 2], chain.back()).second;
    if (poly_is_zero(r)) break;
    chain.push_back(poly_neg(std::move(r)));
  }
  return chain;
}

namespace detail {

inline int variations_from_signs(const std::vector<int>& s) {
  int v = 0, prev = 0;
  for (int x : s) {
    if (x == 0) continue;
    if (prev != 0 && x != prev) ++v;
    prev = x;
  }
  return v;
}

}  // namespace detail

inline int sturm_variations_at(const std::vector<PolyQ>& chain, const Rat& x) {
  std::vector<int> signs;
  signs.reserve(chain.size());
  for (const auto& f : chain) signs.push_back(rat_sign(poly_eval(f, x)));
  return detail::variations_from_signs(signs);
}

inline int sturm_variations_at_neg_inf(const std::vector<PolyQ>& chain) {
  std::vector<int> signs;
  for (const auto& f : chain) {
    int s = rat_sign(f.empty() ? Rat(0) : f.back());
    if (poly_degree(f) % 2 != 0) s = -s;
    signs.push_back(s);
  }
  return detail::variations_from_signs(signs);
}

inline int sturm_variations_at_pos_inf(const std::vector<PolyQ>& chain) {
  std::vector<int> signs;
  for (const auto& f : chain) signs.push_back(rat_sign(f.empty() ? Rat(0) : f.back()));
  return detail::variations_from_signs(signs);
}

// Number of distinct real roots in the half-open interval (a, b].
inline int sturm_count_half_open(const std::vector<PolyQ>& chain, const Rat& a, const Rat& b) {
  return sturm_variations_at(chain, a) - sturm_variations_at(chain, b);
}

inline int count_real_roots(const PolyQ& p) {
  PolyQ sf = p;
  if (!poly_is_squarefree(p)) sf = poly_divmod(p, poly_gcd(p, poly_derivative(p))).first;
  auto chain = sturm_chain(sf);
  if (chain.empty()) throw DomainViolation("root count of the zero polynomial");
  return sturm_variations_at_neg_inf(chain) - sturm_variations_at_pos_inf(chain);
}

// All real roots live strictly inside (-B, B).
inline Rat poly_cauchy_bound(const PolyQ& p) {
  if (poly_degree(p) < 1) return Rat(1);
  Rat m(0);
  for (size_t i = 0; i + 1 < p.size(); ++i) m = std::max(m, rat_abs(p[i] / p.back()));
  return m + 1;
}

struct RootBracket {
  Rat lo, hi;     // root lies in (lo, hi], or exactly at hi when exact
  bool exact = false;
};

// Isolating brackets for the distinct real roots of a squarefree p, ascending,
// each refined by Sturm-count bisection until hi - lo <= 2^-prec_bits.
inline std::vector<RootBracket> isolate_real_roots(const PolyQ& p, unsigned prec_bits) {
  if (poly_degree(p) < 1) return {};
  if (!poly_is_squarefree(p)) throw NotSquarefree("root isolation requires squarefree input");
  auto chain = sturm_chain(p);
  Rat B = poly_cauchy_bound(p);
  Rat width_target = rat_2pow(-static_cast<long>(prec_bits));

  struct Seg {
    Rat a, b;
    int count;
  };
  std::vector<Seg> todo{{-B, B, sturm_count_half_open(chain, -B, B)}};
  std::vector<RootBracket> out;
  while (!todo.empty()) {
    Seg s = todo.back();
    todo.pop_back();
    if (s.count == 0) continue;
    if (s.count == 1) {
      Rat a = s.a, b = s.b;
      bool exact = false;
      while (b - a > width_target) {
        if (poly_eval(p, b) == 0) {
          exact = true;
          a = b;
          break;
        }
        Rat m = (a + b) / 2;
        if (sturm_count_half_open(chain, a, m) == 1)
          b = m;
        else
          a = m;
      }
      if (!exact && poly_eval(p, b) == 0) {
        exact = true;
        a = b;
      }
      out.push_back({a, b, exact});
      continue;
    }
    Rat m = (s.a + s.b) / 2;
    int left = sturm_count_half_open(chain, s.a, m);
    todo.push_back({s.a, m, left});
    todo.push_back({m, s.b, s.count - left});
  }
  std::sort(out.begin(), out.end(), [](const RootBracket& x, const RootBracket& y) {
    return x.hi < y.hi;
  });
  return out;
}

// Certified enclosures of all real roots of squarefree p, ascending.
inline std::vector<Interval> real_roots(const PolyQ& p, unsigned prec_bits) {
  std::vector<Interval> out;
  for (const auto& b : isolate_real_roots(p, prec_bits))
    out.push_back(Interval::from_rat_endpoints(b.lo, b.hi, prec_bits + 32));
  return out;
}

// Resultant via the Sylvester matrix and exact Gaussian elimination.
inline Rat resultant(const PolyQ& a, const PolyQ& b) {
  int m = poly_degree(a), n = poly_degree(b);
  if (m < 0 || n < 0) return Rat(0);
  if (m == 0 && n == 0) return Rat(1);
  if (m == 0) return rat_pow(a[0], n);
  if (n == 0) return rat_pow(b[0], m);
  int N = m + n;
  std::vector<std::vector<Rat>> M(N, std::vector<Rat>(N, Rat(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) M[i][i + j] = a[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) M[n + i][i + j] = b[n - j];
  Rat det(1);
  for (int c = 0; c < N; ++c) {
    int piv = -1;
    for (int r = c; r < N; ++r)
      if (M[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != c) {
      std::swap(M[piv], M[c]);
      det = -det;
    }
    det *= M[c][c];
    for (int r = c + 1; r < N; ++r) {
      if (M[r][c] == 0) continue;
      Rat f = M[r][c] / M[c][c];
      for (int k = c; k < N; ++k) M[r][k] -= f * M[c][k];
    }
  }
  return det;
}

inline Rat poly_discriminant(const PolyQ& p) {
  int d = poly_degree(p);
  if (d < 1) throw DomainViolation("discriminant needs degree >= 1");
  Rat r = resultant(p, poly_derivative(p)) / p.back();
  if (((d * (d - 1)) / 2) % 2 != 0) r = -r;
  return r;
}

// Parses "x^3 - 3x + 1" style text (one variable, integer exponents, rational or
// decimal coefficients, '*' optional between a coefficient and the variable).
inline PolyQ poly_parse(const std::string& text, char var = 'x') {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty polynomial");

  PolyQ acc;
  size_t i = 0;
  bool first = true;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw ParseError("expected '+' or '-' in polynomial: '" + text + "'");
    }
    first = false;
    if (i >= s.size()) throw ParseError("dangling sign in polynomial: '" + text + "'");

    // coefficient (optional when the term starts with the variable)
    size_t cs = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == '/'))
      ++i;
    Rat coeff(1);
    bool have_coeff = i > cs;
    if (have_coeff) coeff = parse_rat(s.substr(cs, i - cs));
    if (i < s.size() && s[i] == '*') {
      if (!have_coeff) throw ParseError("stray '*' in polynomial: '" + text + "'");
      ++i;
      if (i >= s.size() || s[i] != var)
        throw ParseError("expected variable after '*' in polynomial: '" + text + "'");
    }

    long expo = 0;
    if (i < s.size() && s[i] == var) {
      ++i;
      expo = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        size_t es = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == es) throw ParseError("missing exponent in polynomial: '" + text + "'");
        expo = std::strtol(s.substr(es, i - es).c_str(), nullptr, 10);
      }
    } else if (!have_coeff) {
      throw ParseError("unreadable term in polynomial: '" + text + "'");
    }

    if (acc.size() < static_cast<size_t>(expo + 1)) acc.resize(expo + 1, Rat(0));
    acc[expo] += Rat(sign) * coeff;
  }
  poly_trim(acc);
  return acc;
}

inline std::string poly_to_string(const PolyQ& p, char var = 'x') {
  if (poly_is_zero(p)) return "0";
  std::string out;
  for (size_t i = p.size(); i-- > 0;) {
    if (p[i] == 0) continue;
    Rat c = p[i];
    bool neg = c < 0;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    Rat a = rat_abs(c);
    if (i == 0) {
      out += rat_to_string(a);
    } else {
      if (a != 1) out += rat_to_string(a) + "*";
      out += var;
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out;
}

}  // namespace latlab
