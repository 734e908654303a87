#pragma once

// Algebraic lattices: the image of Z^d under the real-embedding matrix of a
// totally real degree-d field. Stored row j is theta^j evaluated columnwise at
// the ascending real roots, so the coordinate product at any lattice point is
// a field norm: a nonzero rational integer, which keeps the product functional
// at least one in absolute value away from the origin.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latlab/lattice.hpp"

namespace latlab {

struct AlgebraicLatticeSpec {
  MinPolyPtr minpoly;
  unsigned precision_bits = kDefaultPrec;
};

inline Lattice<NfReal> build_algebraic_lattice(const AlgebraicLatticeSpec& spec) {
  if (!spec.minpoly) throw DomainViolation("algebraic lattice needs a minimal polynomial");
  const unsigned d = spec.minpoly->degree();
  if (d < 2) throw DomainViolation("algebraic lattice needs degree >= 2");
  const int rr = spec.minpoly->real_root_count();
  if (rr != static_cast<int>(d))
    throw NotTotallyReal(spec.minpoly->to_string() + " has " + std::to_string(rr) +
                         " real root(s), not " + std::to_string(d));
  Mat<NfReal> b(d, Vec<NfReal>(d));
  NfElem pw = NfElem::from_rat(spec.minpoly, Rat(1));
  const NfElem th = NfElem::theta(spec.minpoly);
  for (unsigned j = 0; j < d; ++j) {
    for (unsigned i = 0; i < d; ++i) b[j][i] = NfReal(pw, static_cast<int>(i));
    if (j + 1 < d) pw = pw * th;
  }
  return lattice_from_basis(std::move(b), spec.precision_bits);
}

struct NormFormReport {
  long points_checked = 0;
  std::optional<Rat> min_abs_norm;
  Vec<Int> min_witness;                 // first u attaining the minimum
  std::vector<Vec<Int>> units;          // |norm| = 1 coefficients, at most 64 kept
  std::vector<std::string> violations;  // nonempty means the construction is broken
};

namespace detail {

inline std::string format_coeffs(const Vec<Int>& u) {
  std::string s = "(";
  for (size_t i = 0; i < u.size(); ++i) {
    if (i) s += ", ";
    s += u[i].str();
  }
  return s + ")";
}

// Each row must evaluate one integral field element across all embeddings;
// that is what makes the coordinate product a norm. Unimodular reductions of
// a built lattice keep the shape, so they pass too.
inline std::vector<NfElem> norm_form_rows(const Lattice<NfReal>& l) {
  if (!l.algebraic_columns)
    throw DomainViolation("norm-form check needs the column-per-root layout");
  std::vector<NfElem> rows;
  rows.reserve(l.dim);
  for (size_t j = 0; j < l.dim; ++j) {
    const NfElem& e = l.basis[j][0].elem();
    for (size_t i = 1; i < l.dim; ++i)
      if (!(l.basis[j][i].elem() == e))
        throw DomainViolation("basis row mixes field elements across embeddings");
    for (const auto& q : e.coords())
      if (rat_den(q) != 1)
        throw DomainViolation("basis row is not integral on the power basis");
    rows.push_back(e);
  }
  return rows;
}

}  // namespace detail

// Exact scan of all nonzero |u| <= N: the product of the coordinates of u * B
// equals the field norm of the row combination, so it must be a nonzero
// rational integer. Any violation is a defect in the construction.
inline NormFormReport norm_form_check(const Lattice<NfReal>& l, long N, long max_points = 2000000) {
  if (N < 0) throw DomainViolation("scan radius must be nonnegative");
  NormFormReport rep;
  if (N == 0) return rep;
  auto rows = detail::norm_form_rows(l);
  const size_t d = l.dim;
  Int total = 1;
  for (size_t j = 0; j < d; ++j) total *= Int(2 * N + 1);
  Int visited = total - 1;
  if (visited > Int(max_points))
    throw BudgetExceeded("norm scan visits " + visited.str() + " points, over the budget of " +
                         std::to_string(max_points));

  Vec<Int> u(d, Int(0));
  std::function<void(size_t, const NfElem&)> walk = [&](size_t k, const NfElem& acc) {
    if (k == d) {
      bool nonzero = false;
      for (const auto& c : u)
        if (c != 0) nonzero = true;
      if (!nonzero) return;
      ++rep.points_checked;
      Rat nrm = nf_norm(acc);
      if (nrm == 0) {
        rep.violations.push_back("zero norm at u=" + detail::format_coeffs(u));
        return;
      }
      if (rat_den(nrm) != 1) {
        rep.violations.push_back("non-integer norm " + rat_to_string(nrm) + " at u=" +
                                 detail::format_coeffs(u));
        return;
      }
      Rat a = rat_abs(nrm);
      if (!rep.min_abs_norm.has_value() || a < *rep.min_abs_norm) {
        rep.min_abs_norm = a;
        rep.min_witness = u;
      }
      if (a == 1 && rep.units.size() < 64) rep.units.push_back(u);
      return;
    }
    for (long v = -N; v <= N; ++v) {
      u[k] = v;
      walk(k + 1, v == 0 ? acc : acc + rows[k] * Rat(v));
    }
  };
  walk(0, NfElem::from_rat(l.field, Rat(0)));
  return rep;
}

}  // namespace latlab
