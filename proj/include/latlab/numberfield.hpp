#pragma once

// Number fields Q[x]/(p) with a designated real embedding. Elements are rational
// coordinate vectors on the power basis; the embedded scalar kind (NfReal) pairs
// an element with the index of a real root of p and supports exact sign decisions.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latlab/errors.hpp"
#include "latlab/interval.hpp"
#include "latlab/poly.hpp"
#include "latlab/rational.hpp"

namespace latlab {

class MinimalPolynomial;
using MinPolyPtr = std::shared_ptr<const MinimalPolynomial>;

class MinimalPolynomial {
 public:
  // Monic, integer coefficients, squarefree. Irreducibility is verified exactly up
  // to degree 3 (monic rational-root test); degree >= 4 needs the caller to assert
  // it, and the assertion is recorded so outputs can echo it.
  static MinPolyPtr make(std::vector<Int> coeffs, bool assert_irreducible = false) {
    return MinPolyPtr(new MinimalPolynomial(std::move(coeffs), assert_irreducible));
  }

  static MinPolyPtr from_string(const std::string& text, bool assert_irreducible = false,
                                char var = 'x') {
    PolyQ p = poly_parse(text, var);
    std::vector<Int> c;
    for (const auto& q : p) {
      if (rat_den(q) != 1)
        throw ParseError("minimal polynomial needs integer coefficients: '" + text + "'");
      c.push_back(rat_num(q));
    }
    return make(std::move(c), assert_irreducible);
  }

  unsigned degree() const { return static_cast<unsigned>(coeffs_.size()) - 1; }
  const std::vector<Int>& coeffs() const { return coeffs_; }
  bool irreducible_verified() const { return irreducible_verified_; }
  bool irreducibility_asserted() const { return irreducibility_asserted_; }

  PolyQ to_polyq() const {
    PolyQ p;
    for (const auto& c : coeffs_) p.emplace_back(c);
    return p;
  }

  std::string to_string(char var = 'x') const { return poly_to_string(to_polyq(), var); }

  bool same_as(const MinimalPolynomial& o) const { return coeffs_ == o.coeffs_; }

  int real_root_count() const {
    std::lock_guard<std::mutex> g(mu_);
    ensure_brackets(16);
    return static_cast<int>(brackets_.size());
  }

  bool totally_real() const { return real_root_count() == static_cast<int>(degree()); }

  // Ascending real roots, each enclosure of width <= 2^-prec_bits.
  std::vector<Interval> roots(unsigned prec_bits) const {
    std::lock_guard<std::mutex> g(mu_);
    ensure_brackets(prec_bits);
    std::vector<Interval> out;
    for (const auto& b : brackets_) {
      if (b.exact)
        out.push_back(Interval::from_rat(b.hi, prec_bits + 32));
      else
        out.push_back(Interval::from_rat_endpoints(b.lo, b.hi, prec_bits + 32));
    }
    return out;
  }

  Rat discriminant() const { return poly_discriminant(to_polyq()); }

 private:
  MinimalPolynomial(std::vector<Int> coeffs, bool assert_irreducible) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2) throw DomainViolation("minimal polynomial needs degree >= 1");
    if (coeffs_.back() != 1) throw DomainViolation("minimal polynomial must be monic");
    PolyQ p = to_polyq();
    if (!poly_is_squarefree(p))
      throw NotSquarefree("minimal polynomial has a repeated factor: " + to_string());
    unsigned d = degree();
    if (d == 1) {
      irreducible_verified_ = true;
    } else if (d <= 3) {
      if (has_integer_root()) {
        throw NotIrreducibleVerified("minimal polynomial has a rational root: " + to_string());
      }
      irreducible_verified_ = true;
    } else {
      if (!assert_irreducible)
        throw NotIrreducibleVerified(
            "irreducibility is only verified automatically up to degree 3; pass the "
            "assertion flag for " +
            to_string());
      irreducibility_asserted_ = true;
    }
  }

  // Monic with integer coefficients: any rational root is an integer divisor of the
  // constant term.
  bool has_integer_root() const {
    Int a0 = coeffs_[0];
    PolyQ p = to_polyq();
    if (a0 == 0) return true;
    Int a = int_abs(a0);
    for (Int div = 1; div * div <= a; ++div) {
      if (a % div != 0) continue;
      Int co = a / div;
      if (poly_eval(p, Rat(div)) == 0 || poly_eval(p, Rat(-div)) == 0) return true;
      if (poly_eval(p, Rat(co)) == 0 || poly_eval(p, Rat(-co)) == 0) return true;
    }
    return false;
  }

  void ensure_brackets(unsigned prec_bits) const {
    if (have_brackets_ && bracket_prec_ >= prec_bits) return;
    brackets_ = isolate_real_roots(to_polyq(), prec_bits);
    bracket_prec_ = prec_bits;
    have_brackets_ = true;
  }

  std::vector<Int> coeffs_;
  bool irreducible_verified_ = false;
  bool irreducibility_asserted_ = false;
  mutable std::mutex mu_;
  mutable bool have_brackets_ = false;
  mutable unsigned bracket_prec_ = 0;
  mutable std::vector<RootBracket> brackets_;
};

inline bool same_field(const MinPolyPtr& a, const MinPolyPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same_as(*b);
}

class NfElem {
 public:
  NfElem() = default;

  NfElem(MinPolyPtr field, std::vector<Rat> coords) : field_(std::move(field)) {
    if (!field_) throw InternalError("number field element without a field");
    c_ = std::move(coords);
    c_.resize(field_->degree(), Rat(0));
  }

  static NfElem from_rat(MinPolyPtr field, const Rat& q) {
    std::vector<Rat> c(field->degree(), Rat(0));
    c[0] = q;
    return NfElem(std::move(field), std::move(c));
  }

  static NfElem theta(MinPolyPtr field) {
    std::vector<Rat> c(field->degree(), Rat(0));
    if (c.size() < 2) throw DomainViolation("degree-1 field has no generator above Q");
    c[1] = 1;
    return NfElem(std::move(field), std::move(c));
  }

  static NfElem from_poly(MinPolyPtr field, const PolyQ& q) {
    PolyQ r = poly_divmod(q, field->to_polyq()).second;
    std::vector<Rat> c(r.begin(), r.end());
    return NfElem(std::move(field), std::move(c));
  }

  const MinPolyPtr& field() const { return field_; }
  const std::vector<Rat>& coords() const { return c_; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (q != 0) return false;
    return true;
  }

  bool is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return false;
    return true;
  }

  Rat rational_value() const {
    if (!is_rational()) throw DomainViolation("element is not rational");
    return c_.empty() ? Rat(0) : c_[0];
  }

  PolyQ to_polyq() const {
    PolyQ p(c_.begin(), c_.end());
    poly_trim(p);
    return p;
  }

  friend NfElem operator+(const NfElem& a, const NfElem& b) {
    a.check_same(b);
    std::vector<Rat> c(a.c_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] + b.c_[i];
    return NfElem(a.field_, std::move(c));
  }

  friend NfElem operator-(const NfElem& a, const NfElem& b) {
    a.check_same(b);
    std::vector<Rat> c(a.c_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] - b.c_[i];
    return NfElem(a.field_, std::move(c));
  }

  friend NfElem operator-(const NfElem& a) {
    std::vector<Rat> c(a.c_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = -a.c_[i];
    return NfElem(a.field_, std::move(c));
  }

  friend NfElem operator*(const NfElem& a, const NfElem& b) {
    a.check_same(b);
    return from_poly(a.field_, poly_mul(a.to_polyq(), b.to_polyq()));
  }

  friend NfElem operator*(const NfElem& a, const Rat& s) {
    std::vector<Rat> c(a.c_);
    for (auto& q : c) q *= s;
    return NfElem(a.field_, std::move(c));
  }

  friend NfElem operator*(const Rat& s, const NfElem& a) { return a * s; }

  NfElem inverse() const {
    if (is_zero()) throw ZeroDivision("inverse of zero field element");
    // extended Euclid in Q[x]: s*q + t*p = g
    PolyQ r0 = field_->to_polyq(), r1 = to_polyq();
    PolyQ s0 = {}, s1 = {Rat(1)};
    while (!poly_is_zero(r1)) {
      auto [q, r2] = poly_divmod(r0, r1);
      PolyQ s2 = poly_sub(s0, poly_mul(q, s1));
      r0 = std::move(r1);
      r1 = std::move(r2);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    if (poly_degree(r0) != 0)
      throw NotIrreducibleVerified(
          "minimal polynomial is reducible (nontrivial factor found during inversion): " +
          poly_to_string(r0));
    return from_poly(field_, poly_scale(s0, Rat(1) / r0[0]));
  }

  friend NfElem operator/(const NfElem& a, const NfElem& b) { return a * b.inverse(); }

  friend bool operator==(const NfElem& a, const NfElem& b) {
    return same_field(a.field_, b.field_) && a.c_ == b.c_;
  }

  std::string to_string(char var = 't') const { return poly_to_string(to_polyq(), var); }

 private:
  void check_same(const NfElem& o) const {
    if (!same_field(field_, o.field_))
      throw DomainViolation("field elements from different number fields");
  }

  MinPolyPtr field_;
  std::vector<Rat> c_;
};

namespace detail {

inline Rat small_rat_det(std::vector<std::vector<Rat>> m) {
  size_t n = m.size();
  Rat det(1);
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return Rat(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rat f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

}  // namespace detail

// Field norm as the determinant of multiplication by e on the power basis.
inline Rat nf_norm(const NfElem& e) {
  unsigned d = e.field()->degree();
  std::vector<std::vector<Rat>> m(d);
  NfElem acc = e;
  NfElem th = d >= 2 ? NfElem::theta(e.field()) : NfElem::from_rat(e.field(), Rat(1));
  for (unsigned j = 0; j < d; ++j) {
    m[j] = acc.coords();
    if (j + 1 < d) acc = acc * th;
  }
  return detail::small_rat_det(std::move(m));
}

// Same norm through the resultant; independent route used for cross-checks.
inline Rat nf_norm_resultant(const NfElem& e) {
  if (e.is_zero()) return Rat(0);
  return resultant(e.field()->to_polyq(), e.to_polyq());
}

// A field element pinned to one real embedding (0-based index into the ascending
// real roots). This is the exact scalar kind for lattices with irrational entries.
class NfReal {
 public:
  NfReal() = default;
  NfReal(NfElem x, int root) : x_(std::move(x)), root_(root) {
    int n = x_.field()->real_root_count();
    if (root_ < 0 || root_ >= n)
      throw DomainViolation("real embedding index " + std::to_string(root_) + " out of range (" +
                            std::to_string(n) + " real roots)");
  }

  static NfReal from_rat(MinPolyPtr field, const Rat& q, int root) {
    return NfReal(NfElem::from_rat(std::move(field), q), root);
  }

  const NfElem& elem() const { return x_; }
  int root_index() const { return root_; }
  const MinPolyPtr& field() const { return x_.field(); }

  bool is_zero() const { return x_.is_zero(); }

  Interval to_interval(unsigned prec_bits) const {
    Interval th = x_.field()->roots(prec_bits + 32)[root_];
    Interval acc = Interval::zero(prec_bits + 32);
    const auto& c = x_.coords();
    for (size_t i = c.size(); i-- > 0;)
      acc = acc * th + Interval::from_rat(c[i], prec_bits + 32);
    return acc.with_precision(prec_bits);
  }

  // Exact: -1, 0, +1. Terminates because a nonzero element has nonzero norm
  // (checked explicitly, which also catches falsely asserted irreducibility).
  int exact_sign() const {
    if (x_.is_zero()) return 0;
    for (unsigned prec = 64; prec <= (1u << 20); prec *= 2) {
      Interval v = to_interval(prec);
      if (auto s = v.certified_sign(); s.has_value() && *s != 0) return *s;
      if (prec == 4096 && nf_norm_resultant(x_) == 0)
        throw NotIrreducibleVerified(
            "element is a zero divisor; the asserted minimal polynomial is reducible");
    }
    throw PrecisionExhausted("sign of field element undecided at precision cap", 1u << 20);
  }

  friend NfReal operator+(const NfReal& a, const NfReal& b) {
    a.check_same(b);
    return NfReal(a.x_ + b.x_, a.root_);
  }
  friend NfReal operator-(const NfReal& a, const NfReal& b) {
    a.check_same(b);
    return NfReal(a.x_ - b.x_, a.root_);
  }
  friend NfReal operator-(const NfReal& a) { return NfReal(-a.x_, a.root_); }
  friend NfReal operator*(const NfReal& a, const NfReal& b) {
    a.check_same(b);
    return NfReal(a.x_ * b.x_, a.root_);
  }
  friend NfReal operator/(const NfReal& a, const NfReal& b) {
    a.check_same(b);
    return NfReal(a.x_ / b.x_, a.root_);
  }
  friend NfReal operator*(const NfReal& a, const Rat& s) { return NfReal(a.x_ * s, a.root_); }
  friend NfReal operator*(const Rat& s, const NfReal& a) { return a * s; }

  friend bool operator==(const NfReal& a, const NfReal& b) {
    return a.root_ == b.root_ && a.x_ == b.x_;
  }

  // Exact order comparison in the chosen embedding.
  friend int cmp(const NfReal& a, const NfReal& b) { return (a - b).exact_sign(); }

  // Exact comparison of absolute values (sign of a^2 - b^2).
  friend int abs_cmp(const NfReal& a, const NfReal& b) {
    a.check_same(b);
    return NfReal(a.x_ * a.x_ - b.x_ * b.x_, a.root_).exact_sign();
  }

  std::string to_string() const { return x_.to_string(); }

 private:
  void check_same(const NfReal& o) const {
    if (root_ != o.root_ || !same_field(x_.field(), o.x_.field()))
      throw DomainViolation("mixed embeddings in field-real arithmetic");
  }

  NfElem x_;
  int root_ = -1;
};

}  // namespace latlab
