#pragma once

// Scalar kind glue. Lattices are generic over three scalar kinds: exact rationals,
// exact number-field reals (one fixed embedding), and floating balls. Generic code
// manufactures constants from an exemplar because NfReal carries field context.

#include <string>
#include <type_traits>
#include <vector>

#include "latlab/interval.hpp"
#include "latlab/numberfield.hpp"
#include "latlab/rational.hpp"

namespace latlab {

enum class ScalarKind { Rational, NumberFieldReal, FloatBall };

inline const char* scalar_kind_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::Rational: return "rational";
    case ScalarKind::NumberFieldReal: return "numberfield";
    case ScalarKind::FloatBall: return "float";
  }
  return "?";
}

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr ScalarKind kind = ScalarKind::Rational;
  static constexpr bool exact = true;
};

template <>
struct scalar_traits<NfReal> {
  static constexpr ScalarKind kind = ScalarKind::NumberFieldReal;
  static constexpr bool exact = true;
};

template <>
struct scalar_traits<Interval> {
  static constexpr ScalarKind kind = ScalarKind::FloatBall;
  static constexpr bool exact = false;
};

template <class S>
inline constexpr bool is_exact_scalar_v = scalar_traits<S>::exact;

inline Interval to_interval(const Rat& q, unsigned prec) { return Interval::from_rat(q, prec); }
inline Interval to_interval(const NfReal& x, unsigned prec) { return x.to_interval(prec); }
inline Interval to_interval(const Interval& x, unsigned prec) { return x.with_precision(prec); }

inline Int make_zero_like(const Int&) { return Int(0); }
inline Rat make_zero_like(const Rat&) { return Rat(0); }
inline NfReal make_zero_like(const NfReal& x) {
  return NfReal::from_rat(x.field(), Rat(0), x.root_index());
}
inline Interval make_zero_like(const Interval& x) { return Interval::zero(x.precision_bits()); }

inline Rat scalar_from_rat_like(const Rat&, const Rat& q) { return q; }
inline NfReal scalar_from_rat_like(const NfReal& x, const Rat& q) {
  return NfReal::from_rat(x.field(), q, x.root_index());
}
inline Interval scalar_from_rat_like(const Interval& x, const Rat& q) {
  return Interval::from_rat(q, x.precision_bits());
}

// Exact zero tests (FloatBall deliberately has none).
inline bool scalar_is_zero(const Rat& q) { return q == 0; }
inline bool scalar_is_zero(const NfReal& x) { return x.is_zero(); }

inline int scalar_sign(const Rat& q) { return rat_sign(q); }
inline int scalar_sign(const NfReal& x) { return x.exact_sign(); }

// Power-basis coordinates over Q; 1-dimensional for plain rationals.
inline std::vector<Rat> rational_coords(const Rat& q) { return {q}; }
inline std::vector<Rat> rational_coords(const NfReal& x) { return x.elem().coords(); }

inline std::string scalar_to_string(const Rat& q) { return rat_to_string(q); }
inline std::string scalar_to_string(const NfReal& x) { return x.to_string(); }
inline std::string scalar_to_string(const Interval& x) { return x.to_string(); }

}  // namespace latlab
