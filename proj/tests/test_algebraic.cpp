#include <catch2/catch_amalgamated.hpp>

#include "latlab/algebraic.hpp"
#include "latlab/exponents.hpp"
#include "latlab/linalg.hpp"

using namespace latlab;

namespace {

Lattice<NfReal> build(const std::vector<Int>& coeffs, unsigned prec = 128) {
  AlgebraicLatticeSpec spec;
  spec.minpoly = MinimalPolynomial::make(coeffs);
  spec.precision_bits = prec;
  return build_algebraic_lattice(spec);
}

// independent determinant route: interval Gaussian elimination on the basis
Interval interval_det_abs(const Lattice<NfReal>& l, unsigned prec) {
  Mat<Interval> b(l.dim, Vec<Interval>(l.dim, Interval::zero(prec)));
  for (size_t i = 0; i < l.dim; ++i)
    for (size_t j = 0; j < l.dim; ++j) b[i][j] = l.basis[i][j].to_interval(prec);
  auto d = det_iv(b);
  REQUIRE(d.has_value());
  return abs_i(*d);
}

bool overlaps(const Interval& a, const Interval& b) {
  return a.lo_rat() <= b.hi_rat() && b.lo_rat() <= a.hi_rat();
}

}  // namespace

TEST_CASE("square root of two: embedding matrix and determinant") {
  auto l = build({-2, 0, 1});
  REQUIRE(l.dim == 2);
  CHECK(l.algebraic_columns);
  CHECK(l.root == -1);

  // column i evaluates the power basis at the i-th ascending root
  CHECK(l.basis[0][0].to_interval(64).contains_rat(Rat(1)));
  CHECK(l.basis[0][1].to_interval(64).contains_rat(Rat(1)));
  CHECK(cert_lt(l.basis[1][0].to_interval(64), Interval::from_int(0, 64)));
  CHECK(cert_gt(l.basis[1][1].to_interval(64), Interval::from_int(0, 64)));

  // det^2 = |disc| = 8
  Interval d2 = l.det_abs * l.det_abs;
  CHECK(d2.contains_rat(Rat(8)));
  CHECK(overlaps(l.det_abs, interval_det_abs(l, 128)));
}

TEST_CASE("cubic field: determinant squares to the discriminant") {
  auto l = build({1, -3, 0, 1});
  REQUIRE(l.dim == 3);
  CHECK(l.algebraic_columns);
  Interval d2 = l.det_abs * l.det_abs;
  CHECK(d2.contains_rat(Rat(81)));
  CHECK(l.det_abs.contains_rat(Rat(9)));
  CHECK(overlaps(l.det_abs, interval_det_abs(l, 160)));
}

TEST_CASE("fields with complex embeddings are rejected") {
  AlgebraicLatticeSpec spec;
  spec.minpoly = MinimalPolynomial::make({1, 0, 1});  // x^2 + 1
  CHECK_THROWS_AS(build_algebraic_lattice(spec), NotTotallyReal);

  spec.minpoly = MinimalPolynomial::make({1, 1, 0, 1});  // x^3 + x + 1, one real root
  CHECK_THROWS_AS(build_algebraic_lattice(spec), NotTotallyReal);

  spec.minpoly = MinimalPolynomial::make({-2, 1});  // degree 1
  CHECK_THROWS_AS(build_algebraic_lattice(spec), DomainViolation);

  spec.minpoly.reset();
  CHECK_THROWS_AS(build_algebraic_lattice(spec), DomainViolation);
}

TEST_CASE("norm scan floors at one on the quadratic lattice") {
  auto l = build({-2, 0, 1});
  auto rep = norm_form_check(l, 10);
  CHECK(rep.points_checked == 21 * 21 - 1);
  CHECK(rep.violations.empty());
  REQUIRE(rep.min_abs_norm.has_value());
  CHECK(*rep.min_abs_norm == 1);
  // 1 + theta is a fundamental unit: norm 1 - 2 = -1
  bool has_unit = false;
  for (const auto& u : rep.units)
    if (u == Vec<Int>{Int(1), Int(1)}) has_unit = true;
  CHECK(has_unit);

  // unit scaling: products of scanned units stay at absolute norm one
  REQUIRE(rep.units.size() >= 2);
  auto elem = [&](const Vec<Int>& u) {
    NfElem e = NfElem::from_rat(l.field, Rat(0));
    NfElem pw = NfElem::from_rat(l.field, Rat(1));
    NfElem th = NfElem::theta(l.field);
    for (size_t j = 0; j < u.size(); ++j) {
      e = e + pw * Rat(u[j]);
      if (j + 1 < u.size()) pw = pw * th;
    }
    return e;
  };
  for (size_t a = 0; a < 2; ++a)
    for (size_t b = 0; b < rep.units.size() && b < 8; ++b) {
      Rat n = nf_norm(elem(rep.units[a]) * elem(rep.units[b]));
      CHECK(rat_abs(n) == 1);
    }
}

TEST_CASE("norm scan floors at one on the cubic lattice") {
  auto l = build({1, -3, 0, 1});
  auto rep = norm_form_check(l, 10);
  CHECK(rep.points_checked == 21 * 21 * 21 - 1);
  CHECK(rep.violations.empty());
  REQUIRE(rep.min_abs_norm.has_value());
  CHECK(*rep.min_abs_norm == 1);
  bool theta_listed = false;
  for (const auto& u : rep.units)
    if (u == Vec<Int>{Int(0), Int(1), Int(0)}) theta_listed = true;
  CHECK(theta_listed);  // norm(theta) = -1 from the constant term
}

TEST_CASE("norm scan edge cases") {
  auto l = build({-2, 0, 1});
  auto rep = norm_form_check(l, 0);
  CHECK(rep.points_checked == 0);
  CHECK_FALSE(rep.min_abs_norm.has_value());

  CHECK_THROWS_AS(norm_form_check(l, -1), DomainViolation);
  CHECK_THROWS_AS(norm_form_check(l, 2000), BudgetExceeded);

  // uniform-embedding lattices are not norm forms
  auto f = MinimalPolynomial::make({-2, 0, 1});
  auto one = NfReal::from_rat(f, Rat(1), 1);
  auto s2 = NfReal(NfElem::theta(f), 1);
  auto lu = lattice_from_basis(Mat<NfReal>{{one, s2}, {NfReal::from_rat(f, Rat(0), 1), one}});
  CHECK_THROWS_AS(norm_form_check(lu, 3), DomainViolation);
}

TEST_CASE("interval coordinate products contain the exact norm") {
  auto l = build({1, -3, 0, 1});
  NfElem pw = NfElem::from_rat(l.field, Rat(1));
  NfElem th = NfElem::theta(l.field);
  std::vector<NfElem> pows;
  for (size_t j = 0; j < l.dim; ++j) {
    pows.push_back(pw);
    if (j + 1 < l.dim) pw = pw * th;
  }
  for (long a = -2; a <= 2; ++a)
    for (long b = -2; b <= 2; ++b)
      for (long c = -2; c <= 2; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        Vec<Int> u = {Int(a), Int(b), Int(c)};
        NfElem e = pows[0] * Rat(a) + pows[1] * Rat(b) + pows[2] * Rat(c);
        Rat nrm = nf_norm(e);
        CHECK(nrm == nf_norm_resultant(e));
        CHECK(rat_den(nrm) == 1);
        CHECK(rat_abs(nrm) >= 1);
        auto z = lattice_coords_iv(l, u, 160);
        Interval prod = Interval::from_int(1, 160);
        for (const auto& zi : z) prod *= zi;
        CHECK(prod.contains_rat(nrm));
      }
}

TEST_CASE("reduced algebraic bases keep the norm-form shape") {
  auto l = build({1, -3, 0, 1});
  auto r = reduce_basis(l);
  CHECK(r.algebraic_columns);
  auto rep = norm_form_check(r, 4);
  CHECK(rep.violations.empty());
  REQUIRE(rep.min_abs_norm.has_value());
  CHECK(*rep.min_abs_norm >= 1);
}

TEST_CASE("exponent traces collapse on algebraic lattices") {
  auto l = build({1, -3, 0, 1}, 192);
  auto tr = regular_estimate(l, Rat(1000), 6);
  CHECK_FALSE(tr.unbounded_suspected);
  REQUIRE(tr.estimate.has_value());
  CHECK(tr.estimate->hi_rat() < Rat(1, 100));
  for (const auto& e : tr.entries) {
    REQUIRE(e.upper.has_value());
    CHECK(e.upper->hi_rat() < Rat(1, 100));
  }

  auto wtr = weak_uniform_estimate(l, make_t_grid(Rat(4), Rat(1000), true, 6), Rat(1000));
  CHECK_FALSE(wtr.unbounded_suspected);
  REQUIRE(wtr.estimate.has_value());
  CHECK(wtr.estimate->hi_rat() < Rat(1, 100));
}
