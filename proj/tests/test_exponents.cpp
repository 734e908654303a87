#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latlab/exponents.hpp"
#include "latlab/lattice.hpp"

using namespace latlab;

namespace {

MinPolyPtr sqrt2_field() { return MinimalPolynomial::make({-2, 0, 1}); }
MinPolyPtr golden_field() { return MinimalPolynomial::make({-1, -1, 1}); }

NfReal nf(const MinPolyPtr& f, std::vector<Rat> coords, int root) {
  return NfReal(NfElem(f, std::move(coords)), root);
}

// rows (1, alpha), (0, 1): points (q, q alpha - p)
Lattice<NfReal> golden_lattice() {
  auto f = golden_field();
  auto one = nf(f, {Rat(1), Rat(0)}, 1);
  auto zero = nf(f, {Rat(0), Rat(0)}, 1);
  auto alpha = nf(f, {Rat(0), Rat(1)}, 1);  // the root above 1
  return lattice_from_basis(Mat<NfReal>{{one, alpha}, {zero, one}});
}

// rows (1, 1), (s2, -s2): points (u1 + u2 s2, u1 - u2 s2), norm form u1^2 - 2 u2^2
Lattice<NfReal> sqrt2_norm_lattice() {
  auto f = sqrt2_field();
  auto one = nf(f, {Rat(1), Rat(0)}, 1);
  auto s2 = nf(f, {Rat(0), Rat(1)}, 1);
  return lattice_from_basis(Mat<NfReal>{{one, one}, {s2, -s2}});
}

Lattice<Rat> int_lattice(size_t d) {
  Mat<Rat> b(d, Vec<Rat>(d, Rat(0)));
  for (size_t i = 0; i < d; ++i) b[i][i] = 1;
  return lattice_from_basis(std::move(b));
}

Lattice<Rat> rational_alpha_lattice(const Rat& alpha) {
  return lattice_from_basis(Mat<Rat>{{Rat(1), alpha}, {Rat(0), Rat(1)}});
}

double mid(const Interval& x) { return x.mid_d(); }

}  // namespace

TEST_CASE("dyadic grids keep exact endpoints and ascend") {
  auto g = make_t_grid(Rat(2), Rat(10000), true, 16);
  REQUIRE(g.size() >= 14);
  CHECK(g.front() == 2);
  CHECK(g.back() == 10000);
  for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);

  auto lin = make_t_grid(Rat(1), Rat(5), false, 5);
  REQUIRE(lin.size() == 5);
  CHECK(lin[0] == 1);
  CHECK(lin[4] == 5);
  CHECK_THROWS_AS(make_t_grid(Rat(3), Rat(2), true, 4), DomainViolation);
}

TEST_CASE("collector separates axis directions from nonzero points") {
  auto l = int_lattice(2);
  auto col = small_product_points(l, 5);
  REQUIRE_FALSE(col.zero_coord.empty());
  bool diag = false;
  for (size_t i = 0; i < col.pts.size(); ++i) {
    for (const auto& zi : col.pts[i].z) CHECK_FALSE(zi.contains_zero());
    if (col.pts[i].u == Vec<Int>{Int(1), Int(1)}) {
      diag = true;
      CHECK(col.abs_prod[i].contains_rat(Rat(1)));
      CHECK(col.sup_abs[i].contains_rat(Rat(1)));
    }
  }
  CHECK(diag);
}

TEST_CASE("axis directions push the pointwise trace to unbounded") {
  auto tr = regular_estimate(int_lattice(2), Rat(10000), 8);
  CHECK(tr.kind == ExponentKind::Regular);
  CHECK(tr.unbounded_suspected);
  // off-axis points of Z^2 have product >= 1, so the restricted estimate collapses
  REQUIRE(tr.estimate.has_value());
  CHECK(tr.estimate->hi_rat() < Rat(1, 1000000));

  auto wtr = weak_uniform_estimate(int_lattice(2), make_t_grid(Rat(4), Rat(1000), true, 6),
                                   Rat(1000));
  CHECK(wtr.unbounded_suspected);
}

TEST_CASE("golden ratio: lattice trace matches the convergent oracle") {
  ContinuedFraction cf;
  cf.a.assign(20, Int(1));  // [1; 1, 1, ...]
  auto oracle = cf_oracle_2d(cf, 18);
  REQUIRE(oracle.omega_estimate.has_value());
  CHECK_FALSE(oracle.unbounded);
  // quotients bounded by 1: the exponent sequence decays toward 0
  REQUIRE(oracle.gamma.size() >= 18);
  REQUIRE(oracle.gamma[16].has_value());
  CHECK(oracle.gamma[16]->hi_rat() < Rat(1, 10));

  auto tr = regular_estimate(golden_lattice(), Rat(10000), 12);
  REQUIRE(tr.estimate.has_value());
  CHECK(tr.unbounded_suspected);  // (0, 1) sits on an axis; the estimate skips it
  CHECK(std::abs(mid(*tr.estimate) - mid(*oracle.omega_estimate)) < 0.1);

  // upper bounds certified at every grid entry, and they dominate the lower ones
  for (const auto& e : tr.entries) {
    REQUIRE(e.upper.has_value());
    if (e.lower.has_value())
      CHECK(e.lower->lo_rat() <= e.upper->hi_rat());
  }
}

TEST_CASE("one huge quotient shows up as a spike in both estimator and oracle") {
  ContinuedFraction cf;
  cf.a = {Int(0), Int(1), Int(1), Int(1), Int(1), Int(1), Int(1), Int(1), Int(1),
          Int(1), Int(1000000), Int(1), Int(1), Int(1)};
  auto oracle = cf_oracle_2d(cf, 12);
  REQUIRE(oracle.omega_estimate.has_value());
  double om = mid(*oracle.omega_estimate);
  CHECK(om > 1.6);
  CHECK(om < 1.85);

  // the exact value of the full prefix: a rational alpha with the same early behavior
  Rat alpha = Rat(oracle.p.back()) / Rat(oracle.q.back());
  auto tr = regular_estimate(rational_alpha_lattice(alpha), Rat(10000), 12);
  REQUIRE(tr.estimate.has_value());
  CHECK(std::abs(mid(*tr.estimate) - om) < 0.1);
}

TEST_CASE("norm form lattices have certified near-zero upper bounds") {
  auto l = sqrt2_norm_lattice();
  auto tr = regular_estimate(l, Rat(4096), 8);
  CHECK_FALSE(tr.unbounded_suspected);
  REQUIRE(tr.estimate.has_value());
  CHECK(tr.estimate->hi_rat() < Rat(1, 1000000));

  auto wtr = weak_uniform_estimate(l, make_t_grid(Rat(4), Rat(4096), true, 8), Rat(4096));
  REQUIRE(wtr.estimate.has_value());
  CHECK(wtr.estimate->hi_rat() < Rat(1, 1000000));
}

TEST_CASE("every-scale trace decays on the golden lattice") {
  auto tr = weak_uniform_estimate(golden_lattice(), make_t_grid(Rat(4), Rat(10000), true, 8),
                                  Rat(10000));
  CHECK(tr.unbounded_suspected);  // axis point (0, 1) again
  REQUIRE(tr.estimate.has_value());
  CHECK(tr.estimate->hi_rat() < Rat(1, 5));
  CHECK(tr.estimate->lo_rat() >= 0);
}

TEST_CASE("critical-box search reports unbounded when an axis point blocks every box") {
  UniformOptions uo;
  uo.shape_budget = 30;
  uo.refine_steps = 6;
  auto tr = uniform_estimate(int_lattice(3), make_t_grid(Rat(4), Rat(64), true, 3), uo);
  CHECK(tr.unbounded_suspected);
  CHECK_FALSE(tr.estimate.has_value());
  for (const auto& e : tr.entries) {
    REQUIRE(e.lower.has_value());
    CHECK(e.lower->lo_rat() == uo.gamma_cap);
    CHECK_FALSE(e.upper.has_value());
  }
}

TEST_CASE("critical-box search brackets the norm form lattice") {
  UniformOptions uo;
  uo.shape_budget = 40;
  uo.refine_steps = 8;
  auto tr = uniform_estimate(sqrt2_norm_lattice(), make_t_grid(Rat(4), Rat(64), true, 3), uo);
  CHECK_FALSE(tr.unbounded_suspected);
  REQUIRE(tr.estimate.has_value());
  for (const auto& e : tr.entries) {
    REQUIRE(e.upper.has_value());
    REQUIRE(e.lower.has_value());
    CHECK(e.lower->lo_rat() <= e.upper->hi_rat());
    CHECK(e.upper->hi_rat() <= uo.gamma_cap);
    CHECK(e.witness.rfind("box=", 0) == 0);
  }
}

TEST_CASE("critical-box search is thread-count invariant") {
  auto grid = make_t_grid(Rat(4), Rat(32), true, 3);
  UniformOptions a;
  a.shape_budget = 25;
  a.refine_steps = 5;
  UniformOptions b = a;
  b.threads = 4;
  auto t1 = uniform_estimate(sqrt2_norm_lattice(), grid, a);
  auto t4 = uniform_estimate(sqrt2_norm_lattice(), grid, b);
  REQUIRE(t1.entries.size() == t4.entries.size());
  for (size_t i = 0; i < t1.entries.size(); ++i) {
    CHECK(t1.entries[i].t == t4.entries[i].t);
    CHECK(t1.entries[i].witness == t4.entries[i].witness);
    REQUIRE(t1.entries[i].lower.has_value() == t4.entries[i].lower.has_value());
    if (t1.entries[i].lower.has_value())
      CHECK(t1.entries[i].lower->lo_rat() == t4.entries[i].lower->lo_rat());
    REQUIRE(t1.entries[i].upper.has_value() == t4.entries[i].upper.has_value());
    if (t1.entries[i].upper.has_value())
      CHECK(t1.entries[i].upper->hi_rat() == t4.entries[i].upper->hi_rat());
  }
}

TEST_CASE("nearest integer rounding takes the lower value on ties") {
  CHECK(detail::nearest_int_tie_low(Rat(5, 2)) == 2);
  CHECK(detail::nearest_int_tie_low(Rat(-5, 2)) == -3);
  CHECK(detail::nearest_int_tie_low(Rat(7, 3)) == 2);
  CHECK(detail::nearest_int_tie_low(Rat(-7, 3)) == -2);

  auto f = sqrt2_field();
  auto v = nf(f, {Rat(3, 2), Rat(0)}, 1);
  CHECK(detail::nearest_int_tie_low_scalar(v) == 1);
  auto s2 = nf(f, {Rat(0), Rat(1)}, 1);  // 1.414... rounds to 1
  CHECK(detail::nearest_int_tie_low_scalar(s2) == 1);
}

TEST_CASE("bounded quotients give a multiplicative estimate near one") {
  ThetaMatrix<NfReal> th;
  auto f = sqrt2_field();
  th.rows = {{nf(f, {Rat(0), Rat(1)}, 1)}};
  auto tr = mult_estimate(th, Rat(10000));
  CHECK(tr.kind == ExponentKind::Mult);
  CHECK_FALSE(tr.unbounded_suspected);
  REQUIRE(tr.estimate.has_value());
  double e = mid(*tr.estimate);
  CHECK(e > 0.9);
  CHECK(e < 1.1);
  REQUIRE_FALSE(tr.entries.empty());
  REQUIRE(tr.entries.back().lower.has_value());
  // small denominators overshoot: the running max sits above the limit value
  CHECK(tr.entries.back().lower->lo_rat() > tr.estimate->hi_rat());
}

TEST_CASE("rational entries trip the exact-hit flag") {
  ThetaMatrix<Rat> th;
  th.rows = {{Rat(1, 3)}};
  auto tr = mult_estimate(th, Rat(100));
  CHECK(tr.unbounded_suspected);

  auto tu = mult_uniform_estimate(th, make_t_grid(Rat(4), Rat(100), true, 4), Rat(100));
  CHECK(tu.unbounded_suspected);
}

TEST_CASE("two-column forms clear the pigeonhole floor") {
  std::mt19937_64 rng(2024);
  auto draw = [&] {
    return Rat(static_cast<long>(rng() % (1u << 20)), 1u << 20);
  };
  ThetaMatrix<Rat> th;
  th.rows = {{draw(), draw()}};
  REQUIRE(th.m() == 2);
  REQUIRE(th.n() == 1);
  auto tr = mult_estimate(th, Rat(1000));
  REQUIRE_FALSE(tr.entries.empty());
  REQUIRE(tr.entries.back().lower.has_value());
  CHECK(tr.entries.back().lower->lo_rat() >= Rat(17, 10));
}

TEST_CASE("uniform multiplicative trace stays near the dimension ratio") {
  ThetaMatrix<NfReal> th;
  auto f = sqrt2_field();
  th.rows = {{nf(f, {Rat(0), Rat(1)}, 1)}};
  auto grid = make_t_grid(Rat(10), Rat(10000), true, 4);
  auto tr = mult_uniform_estimate(th, grid, Rat(10000));
  CHECK(tr.kind == ExponentKind::MultUniform);
  CHECK_FALSE(tr.unbounded_suspected);
  REQUIRE(tr.estimate.has_value());
  double e = mid(*tr.estimate);
  CHECK(e > 0.95);
  CHECK(e < 1.25);

  // the limit proxies respect the uniform <= regular ordering up to grid slack
  auto reg = mult_estimate(th, Rat(10000));
  REQUIRE(reg.estimate.has_value());
  CHECK(tr.estimate->lo_rat() <= reg.estimate->hi_rat() + Rat(1, 8));
}

TEST_CASE("terminating expansions are flagged and validated") {
  auto cf = cf_from_rational(Rat(355, 113));
  REQUIRE(cf.a.size() == 3);
  CHECK(cf.a[0] == 3);
  CHECK(cf.a[1] == 7);
  CHECK(cf.a[2] == 16);
  auto oracle = cf_oracle_2d(cf, 10);
  CHECK(oracle.unbounded);
  REQUIRE(oracle.q.size() == 3);
  CHECK(oracle.p.back() == 355);
  CHECK(oracle.q.back() == 113);
  REQUIRE(oracle.gamma[1].has_value());
  CHECK(oracle.gamma[1]->lo_rat() > 0);

  ContinuedFraction bad;
  bad.a = {Int(2), Int(0), Int(3)};
  CHECK_THROWS_AS(cf_oracle_2d(bad, 2), DomainViolation);
}
