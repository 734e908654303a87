#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latlab/lattice.hpp"

using namespace latlab;

namespace {

MinPolyPtr sqrt2_field() { return MinimalPolynomial::make({-2, 0, 1}); }

NfReal nf(const MinPolyPtr& f, std::vector<Rat> coords, int root) {
  return NfReal(NfElem(f, std::move(coords)), root);
}

// rows (1, s2, 0), (s2, 1, 0), (1/3, 1/7, 1) with s2 the positive square root of 2
Lattice<NfReal> block_lattice() {
  auto f = sqrt2_field();
  auto q = [&](long num, long den = 1) { return nf(f, {Rat(num, den), Rat(0)}, 1); };
  auto s2 = nf(f, {Rat(0), Rat(1)}, 1);
  Mat<NfReal> b = {{q(1), s2, q(0)}, {s2, q(1), q(0)}, {q(1, 3), q(1, 7), q(1)}};
  return lattice_from_basis(std::move(b));
}

Mat<Rat> rat_mat(std::initializer_list<std::initializer_list<Rat>> rows) {
  Mat<Rat> m;
  for (const auto& r : rows) m.emplace_back(r);
  return m;
}

}  // namespace

TEST_CASE("determinant certification per scalar kind") {
  auto zi = lattice_from_basis(rat_mat({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}));
  CHECK(zi.dim == 2);
  CHECK(zi.det_abs.contains_rat(Rat(1)));

  auto rl = lattice_from_basis(rat_mat({{Rat(1), Rat(0)}, {Rat(1, 2), Rat(1, 3)}}));
  CHECK(rl.det_abs.contains_rat(Rat(1, 3)));

  CHECK_THROWS_AS(lattice_from_basis(rat_mat({{Rat(1), Rat(2)}, {Rat(2), Rat(4)}})),
                  SingularBasis);
  CHECK_THROWS_AS(lattice_from_basis(Mat<Rat>{{Rat(1), Rat(2)}}), DimensionMismatch);

  auto f = sqrt2_field();
  auto one = nf(f, {Rat(1), Rat(0)}, 1);
  auto s2 = nf(f, {Rat(0), Rat(1)}, 1);
  auto nl = lattice_from_basis(Mat<NfReal>{{one, s2}, {s2, one}});
  CHECK(nl.root == 1);
  CHECK_FALSE(nl.algebraic_columns);
  CHECK(nl.det_abs.contains_rat(Rat(1)));
  CHECK(nl.det_abs.is_positive());

  Mat<Interval> fb = {{Interval::from_long(2, 128), Interval::from_long(1, 128)},
                      {Interval::from_long(1, 128), Interval::from_long(1, 128)}};
  auto fl = lattice_from_basis(std::move(fb));
  CHECK(fl.det_abs.contains_rat(Rat(1)));
  Mat<Interval> sing = {{Interval::one(128), Interval::one(128)},
                        {Interval::one(128), Interval::one(128)}};
  CHECK_THROWS_AS(lattice_from_basis(std::move(sing)), SingularBasis);
}

TEST_CASE("column-per-root layout") {
  auto f = sqrt2_field();
  // row j lists theta^j under both real embeddings; |det| = sqrt(|disc|) = sqrt 8
  Mat<NfReal> b = {{nf(f, {Rat(1), Rat(0)}, 0), nf(f, {Rat(1), Rat(0)}, 1)},
                   {nf(f, {Rat(0), Rat(1)}, 0), nf(f, {Rat(0), Rat(1)}, 1)}};
  auto l = lattice_from_basis(std::move(b));
  CHECK(l.algebraic_columns);
  CHECK(l.root == -1);
  Interval sq = l.det_abs * l.det_abs;
  CHECK(sq.contains_rat(Rat(8)));

  // its minimal rational subspace is the whole space with identity coefficients
  auto s = minimal_rational_subspace(l);
  CHECK(s.rank() == 2);
  CHECK(s.coeffs == int_identity(2));

  // mixed roots that do not follow the column pattern are rejected
  Mat<NfReal> bad = {{nf(f, {Rat(1), Rat(0)}, 1), nf(f, {Rat(1), Rat(0)}, 0)},
                     {nf(f, {Rat(0), Rat(1)}, 0), nf(f, {Rat(0), Rat(1)}, 1)}};
  CHECK_THROWS_AS(lattice_from_basis(std::move(bad)), UnsupportedScalarKind);

  // column pattern in a dimension different from the degree is rejected
  auto cubic = MinimalPolynomial::make({-1, -3, 0, 1});
  Mat<NfReal> short_b = {{nf(cubic, {Rat(1), Rat(0), Rat(0)}, 0),
                          nf(cubic, {Rat(1), Rat(0), Rat(0)}, 1)},
                         {nf(cubic, {Rat(0), Rat(1), Rat(0)}, 0),
                          nf(cubic, {Rat(0), Rat(1), Rat(0)}, 1)}};
  CHECK_THROWS_AS(lattice_from_basis(std::move(short_b)), DimensionMismatch);
}

TEST_CASE("coordinate evaluation, interval versus exact") {
  auto l = lattice_from_basis(rat_mat({{Rat(2), Rat(1, 3)}, {Rat(-1, 7), Rat(5)}}));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Vec<Int> u = {Int(static_cast<long>(rng() % 41) - 20),
                  Int(static_cast<long>(rng() % 41) - 20)};
    auto zi = lattice_coords_iv(l, u, 128);
    auto ze = lattice_coords_exact(l, u);
    for (size_t j = 0; j < 2; ++j) REQUIRE(zi[j].contains_rat(ze[j]));
  }
  CHECK_THROWS_AS(lattice_coords_iv(l, Vec<Int>{Int(1)}, 128), DimensionMismatch);
}

TEST_CASE("basis reduction preserves the lattice") {
  Mat<Rat> b = rat_mat({{Rat(1), Rat(0)}, {Rat(1000000), Rat(1)}});
  auto l = lattice_from_basis(b);
  auto r = reduce_basis(l);
  CHECK(r.det_abs.contains_rat(Rat(1)));
  REQUIRE(r.transform_from_original.has_value());
  Mat<Int> t = *r.transform_from_original;
  Rat dt = exact_det(Mat<Rat>{{Rat(t[0][0]), Rat(t[0][1])}, {Rat(t[1][0]), Rat(t[1][1])}});
  CHECK(rat_abs(dt) == 1);
  // transform really maps the original basis to the reduced one
  Mat<Rat> again = mat_mul_int(t, b);
  CHECK(again == r.basis);
  // the reduced first row is short
  Rat n0 = r.basis[0][0] * r.basis[0][0] + r.basis[0][1] * r.basis[0][1];
  CHECK(n0 <= Rat(2));

  // reducing twice composes the transforms against the original basis
  auto r2 = reduce_basis(r);
  REQUIRE(r2.transform_from_original.has_value());
  CHECK(mat_mul_int(*r2.transform_from_original, b) == r2.basis);
}

TEST_CASE("rational lattices always meet the axis") {
  std::mt19937_64 rng(20240812);
  for (int iter = 0; iter < 25; ++iter) {
    size_t d = 2 + iter % 3;
    Mat<Rat> b(d, Vec<Rat>(d, Rat(0)));
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j)
        b[i][j] = Rat(static_cast<long>(rng() % 19) - 9, 1 + static_cast<long>(rng() % 5));
    Lattice<Rat> l;
    try {
      l = lattice_from_basis(b);
    } catch (const SingularBasis&) {
      continue;
    }
    bool threw = false;
    try {
      minimal_rational_subspace(l);
    } catch (const AxisPointPresent& e) {
      threw = true;
      REQUIRE(e.u_decimal.size() == d);
      Vec<Int> u;
      for (const auto& s : e.u_decimal) u.emplace_back(s);
      Vec<Rat> z = lattice_coords_exact(l, u);
      CHECK(z[0] != 0);
      for (size_t j = 1; j < d; ++j) CHECK(z[j] == 0);
    }
    CHECK(threw);
  }
}

TEST_CASE("axis witness on a field lattice that meets the axis") {
  auto f = sqrt2_field();
  auto one = nf(f, {Rat(1), Rat(0)}, 1);
  auto zero = nf(f, {Rat(0), Rat(0)}, 1);
  auto s2 = nf(f, {Rat(0), Rat(1)}, 1);
  auto l = lattice_from_basis(Mat<NfReal>{{one, zero}, {s2, s2}});
  try {
    minimal_rational_subspace(l);
    FAIL("expected an axis point");
  } catch (const AxisPointPresent& e) {
    REQUIRE(e.u_decimal.size() == 2);
    CHECK(e.u_decimal[0] == "1");
    CHECK(e.u_decimal[1] == "0");
  }
}

TEST_CASE("minimal subspace of the block lattice") {
  auto l = block_lattice();
  CHECK(l.det_abs.contains_rat(Rat(1)));

  auto s = minimal_rational_subspace(l);
  REQUIRE(s.rank() == 2);
  CHECK(s.ambient_dim == 3);
  // the subspace is the coordinate plane z_2 = 0, spanned by the first two rows
  for (size_t i = 0; i < 2; ++i) {
    CHECK(scalar_is_zero(s.basis[i][2]));
    CHECK(s.coeffs[i][2] == 0);
  }
  Mat<Rat> cr(2, Vec<Rat>(2, Rat(0)));
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) cr[i][j] = Rat(s.coeffs[i][j]);
  CHECK(rat_abs(exact_det(cr)) == 1);

  auto cols = best_coordinate_subset(s);
  REQUIRE(cols == std::vector<size_t>{0, 1});

  auto pl = project_sublattice(s, cols);
  CHECK(pl.dim == 2);
  CHECK(pl.det_abs.contains_rat(Rat(1)));
  CHECK(pl.root == 1);

  // the skipped subset really is singular
  CHECK_THROWS_AS(project_sublattice(s, std::vector<size_t>{0, 2}), SingularMinor);
}

TEST_CASE("full-rank minimal subspace when no proper one exists") {
  auto f = sqrt2_field();
  auto one = nf(f, {Rat(1), Rat(0)}, 1);
  auto s2 = nf(f, {Rat(0), Rat(1)}, 1);
  auto l = lattice_from_basis(Mat<NfReal>{{one, s2}, {s2, one}});
  auto s = minimal_rational_subspace(l);
  CHECK(s.rank() == 2);
  auto cols = best_coordinate_subset(s);
  CHECK(cols == std::vector<size_t>{0, 1});
}
