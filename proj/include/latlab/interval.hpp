#pragma once

// Ball arithmetic on MPFR endpoint pairs. Every operation rounds outward, so any
// real number in the operand intervals maps into the result interval. Precision is
// per-object; binary operations compute at the max of the operand precisions.

#include <mpfr.h>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "latlab/errors.hpp"
#include "latlab/rational.hpp"

namespace latlab {

inline constexpr unsigned kDefaultPrec = 128;

enum class Ordering { Less, Overlapping, Greater };

inline const char* ordering_name(Ordering o) {
  switch (o) {
    case Ordering::Less: return "Less";
    case Ordering::Overlapping: return "Overlapping";
    case Ordering::Greater: return "Greater";
  }
  return "?";
}

class Interval {
 public:
  explicit Interval(unsigned prec = kDefaultPrec) : prec_(clamp_prec(prec)) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }

  Interval(const Interval& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }

  Interval(Interval&& o) noexcept : prec_(o.prec_) {
    mpfr_init2(lo_, MPFR_PREC_MIN);
    mpfr_init2(hi_, MPFR_PREC_MIN);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }

  Interval& operator=(const Interval& o) {
    if (this != &o) {
      prec_ = o.prec_;
      mpfr_set_prec(lo_, prec_);
      mpfr_set_prec(hi_, prec_);
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }

  Interval& operator=(Interval&& o) noexcept {
    if (this != &o) {
      prec_ = o.prec_;
      mpfr_swap(lo_, o.lo_);
      mpfr_swap(hi_, o.hi_);
    }
    return *this;
  }

  ~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static Interval from_long(long v, unsigned prec = kDefaultPrec) {
    Interval r(prec);
    mpfr_set_si(r.lo_, v, MPFR_RNDD);
    mpfr_set_si(r.hi_, v, MPFR_RNDU);
    return r;
  }

  static Interval from_double(double v, unsigned prec = kDefaultPrec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
  }

  static Interval from_int(const Int& v, unsigned prec = kDefaultPrec) {
    Interval r(prec);
    mpfr_set_z(r.lo_, v.backend().data(), MPFR_RNDD);
    mpfr_set_z(r.hi_, v.backend().data(), MPFR_RNDU);
    return r;
  }

  static Interval from_rat(const Rat& v, unsigned prec = kDefaultPrec) {
    Interval r(prec);
    mpfr_set_q(r.lo_, v.backend().data(), MPFR_RNDD);
    mpfr_set_q(r.hi_, v.backend().data(), MPFR_RNDU);
    return r;
  }

  static Interval from_rat_endpoints(const Rat& lo, const Rat& hi, unsigned prec = kDefaultPrec) {
    if (lo > hi) throw InternalError("interval endpoints out of order");
    Interval r(prec);
    mpfr_set_q(r.lo_, lo.backend().data(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.backend().data(), MPFR_RNDU);
    return r;
  }

  // Decimal string, read outward; "0.3" yields an enclosure of 3/10.
  static Interval from_decimal(const std::string& s, unsigned prec = kDefaultPrec) {
    Interval r(prec);
    if (mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD) != 0)
      throw ParseError("bad numeric literal: '" + s + "'");
    mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU);
    return r;
  }

  static Interval zero(unsigned prec = kDefaultPrec) { return Interval(prec); }
  static Interval one(unsigned prec = kDefaultPrec) { return from_long(1, prec); }

  unsigned precision_bits() const { return prec_; }

  // Returns a copy widened/narrowed to prec bits (narrowing stays outward).
  Interval with_precision(unsigned prec) const {
    Interval r(prec);
    mpfr_set(r.lo_, lo_, MPFR_RNDD);
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  Interval midpoint() const {
    Interval r(prec_);
    mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
    mpfr_div_2si(r.lo_, r.lo_, 1, MPFR_RNDN);
    mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
    return r;
  }

  // Upper bound on the distance from midpoint() to either endpoint.
  Interval radius() const {
    Interval m = midpoint();
    Interval r(prec_);
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_sub(t, hi_, m.lo_, MPFR_RNDU);
    mpfr_sub(r.hi_, m.lo_, lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_set(r.lo_, r.hi_, MPFR_RNDN);
    mpfr_clear(t);
    return r;
  }

  double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_d() const {
    Interval m = midpoint();
    return mpfr_get_d(m.lo_, MPFR_RNDN);
  }
  double width_d() const {
    mpfr_t t;
    mpfr_init2(t, 64);
    mpfr_sub(t, hi_, lo_, MPFR_RNDU);
    double w = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return w;
  }

  bool is_point() const { return mpfr_equal_p(lo_, hi_); }
  bool is_zero_point() const { return mpfr_zero_p(lo_) && mpfr_zero_p(hi_); }
  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
  bool is_positive() const { return mpfr_sgn(lo_) > 0; }
  bool is_negative() const { return mpfr_sgn(hi_) < 0; }
  bool is_nonnegative() const { return mpfr_sgn(lo_) >= 0; }
  bool is_finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }

  // +1 / -1 when the sign is certain, 0 for the exact zero point, nullopt otherwise.
  std::optional<int> certified_sign() const {
    if (is_positive()) return 1;
    if (is_negative()) return -1;
    if (is_zero_point()) return 0;
    return std::nullopt;
  }

  bool contains_rat(const Rat& q) const {
    return mpfr_cmp_q(lo_, q.backend().data()) <= 0 && mpfr_cmp_q(hi_, q.backend().data()) >= 0;
  }
  bool cert_le_rat(const Rat& q) const { return mpfr_cmp_q(hi_, q.backend().data()) <= 0; }
  bool cert_lt_rat(const Rat& q) const { return mpfr_cmp_q(hi_, q.backend().data()) < 0; }
  bool cert_ge_rat(const Rat& q) const { return mpfr_cmp_q(lo_, q.backend().data()) >= 0; }
  bool cert_gt_rat(const Rat& q) const { return mpfr_cmp_q(lo_, q.backend().data()) > 0; }

  Int floor_of_hi() const {
    require_finite("floor_of_hi");
    Int z;
    mpfr_get_z(z.backend().data(), hi_, MPFR_RNDD);
    return z;
  }
  Int ceil_of_lo() const {
    require_finite("ceil_of_lo");
    Int z;
    mpfr_get_z(z.backend().data(), lo_, MPFR_RNDU);
    return z;
  }

  // Exact dyadic text of an endpoint, "m*2^e"; replayable bit for bit.
  std::string lo_dyadic() const { return dyadic_of(lo_); }
  std::string hi_dyadic() const { return dyadic_of(hi_); }

  Rat lo_rat() const { return rat_of(lo_); }
  Rat hi_rat() const { return rat_of(hi_); }

  std::string to_string(int digits = 8) const {
    if (is_point()) return fmt(lo_, digits, MPFR_RNDN);
    return "[" + fmt(lo_, digits, MPFR_RNDD) + ", " + fmt(hi_, digits, MPFR_RNDU) + "]";
  }

  // Fixed-significand scientific form of the midpoint; deterministic for CSV output.
  std::string mid_string(int digits = 12) const {
    Interval m = midpoint();
    return fmt(m.lo_, digits, MPFR_RNDN);
  }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }

  friend Interval operator-(const Interval& a) {
    Interval r(a.prec_);
    mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    return r;
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_t t;
    mpfr_init2(t, r.prec_);
    mpfr_mul(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_mul(t, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, a.hi_, b.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, a.hi_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    mpfr_mul(t, a.lo_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, a.hi_, b.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, a.hi_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
  }

  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw ZeroDivision("interval division by an interval containing 0");
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_t t;
    mpfr_init2(t, r.prec_);
    mpfr_div(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_div(t, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, a.hi_, b.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, a.hi_, b.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(r.hi_, a.lo_, b.lo_, MPFR_RNDU);
    mpfr_div(t, a.lo_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, a.hi_, b.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, a.hi_, b.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
  }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  // Exact scaling by 2^e.
  Interval ldexp2(long e) const {
    Interval r(prec_);
    mpfr_mul_2si(r.lo_, lo_, e, MPFR_RNDD);
    mpfr_mul_2si(r.hi_, hi_, e, MPFR_RNDU);
    return r;
  }

  friend Interval abs_i(const Interval& a) {
    Interval r(a.prec_);
    if (a.is_nonnegative()) return a;
    if (mpfr_sgn(a.hi_) <= 0) return -a;
    mpfr_set_zero(r.lo_, 1);
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  // Largest absolute value attained on the interval (point interval).
  friend Interval mag_i(const Interval& a) {
    Interval t = abs_i(a);
    Interval r(a.prec_);
    mpfr_set(r.lo_, t.hi_, MPFR_RNDD);
    mpfr_set(r.hi_, t.hi_, MPFR_RNDU);
    return r;
  }

  friend Interval sqrt_i(const Interval& a) {
    if (!a.is_nonnegative()) throw DomainViolation("sqrt of interval with negative part");
    Interval r(a.prec_);
    mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  // As sqrt_i but tolerates a slightly negative lower endpoint (clamped to 0);
  // for quadratic-form remainders whose outward rounding can dip below zero.
  friend Interval sqrt_clamp(const Interval& a) {
    if (mpfr_sgn(a.hi_) < 0) throw DomainViolation("sqrt_clamp of certainly negative interval");
    Interval r(a.prec_);
    if (mpfr_sgn(a.lo_) <= 0)
      mpfr_set_zero(r.lo_, 1);
    else
      mpfr_sqrt(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqrt(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  friend Interval log_i(const Interval& a) {
    if (!a.is_positive()) throw DomainViolation("log of interval not certainly positive");
    Interval r(a.prec_);
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  friend Interval exp_i(const Interval& a) {
    Interval r(a.prec_);
    mpfr_exp(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, a.hi_, MPFR_RNDU);
    return r;
  }

  // a^e for certainly positive a and arbitrary real exponent interval.
  friend Interval pow_i(const Interval& a, const Interval& e) { return exp_i(e * log_i(a)); }

  friend Interval pow_si(const Interval& a, long n) {
    if (n == 0) return one(a.prec_);
    if (n < 0) return one(a.prec_) / pow_si(a, -n);
    Interval r(a.prec_);
    bool even = (n % 2 == 0);
    if (a.is_nonnegative()) {
      mpfr_pow_si(r.lo_, a.lo_, n, MPFR_RNDD);
      mpfr_pow_si(r.hi_, a.hi_, n, MPFR_RNDU);
    } else if (mpfr_sgn(a.hi_) <= 0) {
      if (even) {
        mpfr_pow_si(r.lo_, a.hi_, n, MPFR_RNDD);
        mpfr_pow_si(r.hi_, a.lo_, n, MPFR_RNDU);
      } else {
        mpfr_pow_si(r.lo_, a.lo_, n, MPFR_RNDD);
        mpfr_pow_si(r.hi_, a.hi_, n, MPFR_RNDU);
      }
    } else if (even) {
      mpfr_set_zero(r.lo_, 1);
      mpfr_t t;
      mpfr_init2(t, r.prec_);
      mpfr_pow_si(r.hi_, a.hi_, n, MPFR_RNDU);
      mpfr_pow_si(t, a.lo_, n, MPFR_RNDU);
      mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
      mpfr_clear(t);
    } else {
      mpfr_pow_si(r.lo_, a.lo_, n, MPFR_RNDD);
      mpfr_pow_si(r.hi_, a.hi_, n, MPFR_RNDU);
    }
    return r;
  }

  // n-th root, n >= 1, nonnegative input.
  friend Interval root_n(const Interval& a, unsigned long n) {
    if (!a.is_nonnegative()) throw DomainViolation("root of interval with negative part");
    Interval r(a.prec_);
    mpfr_rootn_ui(r.lo_, a.lo_, n, MPFR_RNDD);
    mpfr_rootn_ui(r.hi_, a.hi_, n, MPFR_RNDU);
    return r;
  }

  friend Interval min_i(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  friend Interval max_i(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  friend Interval hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  friend std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    if (mpfr_cmp(a.hi_, b.lo_) < 0 || mpfr_cmp(b.hi_, a.lo_) < 0) return std::nullopt;
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }

  // True when every x in a and y in b satisfy x < y (resp. x <= y).
  friend bool cert_lt(const Interval& a, const Interval& b) { return mpfr_cmp(a.hi_, b.lo_) < 0; }
  friend bool cert_le(const Interval& a, const Interval& b) { return mpfr_cmp(a.hi_, b.lo_) <= 0; }
  friend bool cert_gt(const Interval& a, const Interval& b) { return cert_lt(b, a); }
  friend bool cert_ge(const Interval& a, const Interval& b) { return cert_le(b, a); }

  friend Ordering interval_compare(const Interval& a, const Interval& b) {
    if (cert_lt(a, b)) return Ordering::Less;
    if (cert_lt(b, a)) return Ordering::Greater;
    return Ordering::Overlapping;
  }

 private:
  static unsigned clamp_prec(unsigned p) {
    return std::max<unsigned>(p, static_cast<unsigned>(MPFR_PREC_MIN));
  }

  void require_finite(const char* who) const {
    if (!is_finite()) throw InternalError(std::string(who) + " on non-finite interval");
  }

  static std::string fmt(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*R*g", digits, rnd, x);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

  static std::string dyadic_of(mpfr_srcptr x) {
    if (mpfr_zero_p(x)) return "0*2^0";
    if (!mpfr_number_p(x)) throw InternalError("dyadic form of non-finite endpoint");
    Int m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.backend().data(), x);
    return m.str() + "*2^" + std::to_string(static_cast<long>(e));
  }

  static Rat rat_of(mpfr_srcptr x) {
    if (mpfr_zero_p(x)) return Rat(0);
    if (!mpfr_number_p(x)) throw InternalError("rational form of non-finite endpoint");
    Int m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.backend().data(), x);
    return Rat(m) * rat_2pow(static_cast<long>(e));
  }

  mpfr_t lo_, hi_;
  unsigned prec_;
};

}  // namespace latlab
