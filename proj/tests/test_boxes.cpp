#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latlab/boxes.hpp"

using namespace latlab;

namespace {

std::vector<Interval> iv_vec(std::initializer_list<Rat> qs, unsigned prec = 128) {
  std::vector<Interval> z;
  for (const auto& q : qs) z.push_back(Interval::from_rat(q, prec));
  return z;
}

bool encloses(const Interval& x, const Rat& q) { return x.contains_rat(q); }

}  // namespace

TEST_CASE("vector functionals on a known vector") {
  auto z = iv_vec({Rat(3), Rat(-4), Rat(1, 2)});

  CHECK(encloses(sup_norm(z), Rat(4)));
  CHECK(encloses(abs_product(z), Rat(6)));

  // pi is the geometric mean of |z_i|, pi' replaces entries below 1 by 1
  Interval pi = pi_functional(z);
  Interval cube = pi * pi * pi;
  CHECK(encloses(cube, Rat(6)));

  Interval pp = pi_prime(z);
  Interval pp3 = pp * pp * pp;
  CHECK(encloses(pp3, Rat(12)));

  // explicit root count: divide by the number of bounded-away coordinates only
  Interval pp2 = pi_prime(z, 2);
  CHECK(encloses(pp2 * pp2, Rat(12)));

  CHECK(cert_ge(pp, pi));
}

TEST_CASE("weights construction and volume") {
  Weights w = Weights::from_rats({Rat(2), Rat(1, 2), Rat(0)});
  CHECK(w.dim() == 3);
  CHECK(w.active_count() == 2);
  CHECK(w.all_exact());
  CHECK(w.degenerate[2]);

  auto [vol, active] = box_volume(w);
  CHECK(active == 2);
  CHECK(encloses(vol, Rat(4)));  // (2*2) * (2*1/2)

  CHECK(encloses(weights_product(w), Rat(0)));

  CHECK_THROWS_AS(Weights::from_rats({Rat(-1)}), DomainViolation);

  Weights wi = Weights::from_intervals(
      {Interval::from_rat(Rat(1), 128), sqrt_i(Interval::from_long(2, 128))});
  CHECK_FALSE(wi.all_exact());
  CHECK(wi.exact[0].has_value());
  CHECK_FALSE(wi.exact[1].has_value());
  CHECK(wi.active_count() == 2);
}

TEST_CASE("dilation keeps exactness for rational factors only") {
  Weights w = Weights::from_rats({Rat(2), Rat(3)});
  Weights ws = w.scaled_rat(Rat(1, 4));
  CHECK(ws.all_exact());
  CHECK(*ws.exact[0] == Rat(1, 2));
  CHECK(*ws.exact[1] == Rat(3, 4));
  CHECK(encloses(ws.lambda[0], Rat(1, 2)));

  Weights wf = w.scaled_iv(sqrt_i(Interval::from_long(2, 128)));
  CHECK_FALSE(wf.all_exact());
  Interval sq = wf.lambda[0] * wf.lambda[0];
  CHECK(encloses(sq, Rat(8)));

  CHECK_THROWS_AS(w.scaled_rat(Rat(0)), DomainViolation);
  CHECK_THROWS_AS(w.scaled_iv(Interval::from_long(-1, 128)), DomainViolation);
}

TEST_CASE("shape vectors must attain exponent one") {
  CHECK_NOTHROW(ShapeVector({Rat(1), Rat(0), Rat(1, 2)}));
  CHECK_THROWS_AS(ShapeVector({Rat(1, 2), Rat(1, 2)}), InfeasibleShape);
  CHECK_THROWS_AS(ShapeVector({Rat(2), Rat(1)}), InfeasibleShape);
  ShapeVector u = ShapeVector::uniform(4);
  CHECK(u.dim() == 4);
  CHECK(u.sum() == Rat(4));
}

TEST_CASE("weight family from t, gamma, shape") {
  unsigned prec = 192;
  Interval t = Interval::from_long(16, prec);
  ShapeVector sh({Rat(1), Rat(0), Rat(1, 2)});
  Rat gamma(1, 4);

  Weights w = from_t_gamma_shape(t, gamma, sh, prec);
  CHECK(w.dim() == 3);
  CHECK(w.active_count() == 3);

  // rescaled exponents are (1, -3/2, -1/4): lambda = (16, 16^{-3/2}, 16^{-1/4})
  CHECK(encloses(w.lambda[0], Rat(16)));
  CHECK(encloses(w.lambda[1], Rat(1, 64)));
  Interval l2_4 = w.lambda[2] * w.lambda[2] * w.lambda[2] * w.lambda[2];
  CHECK(encloses(l2_4, Rat(1, 16)));

  // product identity: prod lambda_i = t^{-d gamma} = 16^{-3/4} = 1/8
  CHECK(encloses(weights_product(w), Rat(1, 8)));
}

TEST_CASE("weight family edge cases") {
  unsigned prec = 128;
  Interval t = Interval::from_long(10, prec);

  // uniform shape forces gamma = -1 and gives the growing cube
  Weights cube = from_t_gamma_shape(t, Rat(-1), ShapeVector::uniform(3), prec);
  for (size_t i = 0; i < 3; ++i) CHECK(encloses(cube.lambda[i], Rat(10)));
  CHECK_THROWS_AS(from_t_gamma_shape(t, Rat(0), ShapeVector::uniform(3), prec),
                  InfeasibleShape);

  // gamma = -1 with any shape collapses to the cube as well
  Weights cube2 = from_t_gamma_shape(t, Rat(-1), ShapeVector({Rat(1), Rat(0)}), prec);
  CHECK(encloses(cube2.lambda[1], Rat(10)));

  // gamma = 0 reproduces the unit-product family: exponents stay the shape
  ShapeVector sh({Rat(1), Rat(0)});
  Weights unitp = from_t_gamma_shape(t, Rat(0), sh, prec);
  CHECK(encloses(unitp.lambda[0], Rat(10)));
  CHECK(encloses(unitp.lambda[1], Rat(1, 10)));
  CHECK(encloses(weights_product(unitp), Rat(1)));

  CHECK_THROWS_AS(from_t_gamma_shape(Interval::one(prec), Rat(0), sh, prec),
                  DomainViolation);
  CHECK_THROWS_AS(from_t_gamma_shape(t, Rat(-2), sh, prec), InfeasibleShape);

  // in dimension 2 the rescaled exponents are (1, -2 gamma - 1); large gamma
  // drives the second one past the default cap of -8
  ShapeVector tight({Rat(1), Rat(1, 2)});
  Weights wt = from_t_gamma_shape(t, Rat(7, 2), tight, prec);
  CHECK(intersect(wt.lambda[1], pow_si(t, -8)).has_value());
  CHECK_THROWS_AS(from_t_gamma_shape(t, Rat(4), tight, prec), InfeasibleShape);
}

TEST_CASE("weight family product identity on random parameters") {
  std::mt19937_64 rng(20240811);
  for (int iter = 0; iter < 50; ++iter) {
    size_t d = 2 + rng() % 3;
    std::vector<Rat> a(d);
    a[0] = 1;
    for (size_t i = 1; i < d; ++i) a[i] = Rat(static_cast<long>(rng() % 64), 64);
    ShapeVector sh(a);
    if (sh.sum() == Rat(static_cast<long>(d))) continue;
    Rat gamma(static_cast<long>(rng() % 33) - 16, 16);
    if (gamma < -1) gamma = -1;
    Interval t = Interval::from_rat(Rat(static_cast<long>(2 + rng() % 100)), 192);

    Weights w;
    try {
      w = from_t_gamma_shape(t, gamma, sh, 192);
    } catch (const InfeasibleShape&) {
      continue;
    }
    Rat dg = -Rat(static_cast<long>(d)) * gamma;
    Interval expect = pow_i(t, Interval::from_rat(dg, 192));
    Interval got = weights_product(w);
    CHECK(intersect(got, expect).has_value());
    // max weight is exactly t^1
    CHECK(intersect(w.lambda[0], t).has_value());
  }
}
