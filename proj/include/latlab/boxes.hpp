#pragma once

// Weighted boxes P(lambda) = { |z_i| <= lambda_i }, shape vectors for the
// t^a weight families, and the product functionals. Weight entries are certified
// enclosures; exact rational values ride along when known so that exact scalar
// kinds can decide membership without any precision cap.

#include <optional>
#include <vector>

#include "latlab/errors.hpp"
#include "latlab/interval.hpp"
#include "latlab/rational.hpp"

namespace latlab {

struct Weights {
  std::vector<Interval> lambda;           // nonnegative enclosures
  std::vector<char> degenerate;           // exact-zero flags
  std::vector<std::optional<Rat>> exact;  // exact value when known
  unsigned prec = kDefaultPrec;

  size_t dim() const { return lambda.size(); }

  size_t active_count() const {
    size_t n = 0;
    for (char d : degenerate)
      if (!d) ++n;
    return n;
  }

  bool all_exact() const {
    for (const auto& e : exact)
      if (!e.has_value()) return false;
    return true;
  }

  static Weights from_rats(const std::vector<Rat>& v, unsigned prec = kDefaultPrec) {
    Weights w;
    w.prec = prec;
    for (const auto& q : v) {
      if (q < 0) throw DomainViolation("negative box weight");
      w.lambda.push_back(Interval::from_rat(q, prec));
      w.degenerate.push_back(q == 0);
      w.exact.push_back(q);
    }
    return w;
  }

  static Weights from_intervals(std::vector<Interval> v, unsigned prec = kDefaultPrec) {
    Weights w;
    w.prec = prec;
    for (auto& x : v) {
      if (!x.is_nonnegative()) throw DomainViolation("box weight not certainly nonnegative");
      w.degenerate.push_back(x.is_zero_point());
      w.exact.push_back(x.is_point() ? std::optional<Rat>(x.lo_rat()) : std::nullopt);
      w.lambda.push_back(std::move(x));
    }
    return w;
  }

  // Dilation by an exact rational keeps exactness; s must be positive.
  Weights scaled_rat(const Rat& s) const {
    if (s <= 0) throw DomainViolation("dilation factor must be positive");
    Weights w;
    w.prec = prec;
    Interval si = Interval::from_rat(s, prec);
    for (size_t i = 0; i < dim(); ++i) {
      w.lambda.push_back(lambda[i] * si);
      w.degenerate.push_back(degenerate[i]);
      w.exact.push_back(exact[i].has_value() ? std::optional<Rat>(*exact[i] * s) : std::nullopt);
    }
    return w;
  }

  Weights scaled_iv(const Interval& s) const {
    if (!s.is_positive()) throw DomainViolation("dilation factor must be certainly positive");
    Weights w;
    w.prec = prec;
    for (size_t i = 0; i < dim(); ++i) {
      w.lambda.push_back(lambda[i] * s);
      w.degenerate.push_back(degenerate[i]);
      w.exact.push_back(std::nullopt);
    }
    return w;
  }
};

struct ShapeVector {
  std::vector<Rat> a;  // exponents; invariant: max = 1

  explicit ShapeVector(std::vector<Rat> exps) : a(std::move(exps)) {
    if (a.empty()) throw DimensionMismatch("empty shape vector");
    Rat mx = a[0];
    for (const auto& q : a) mx = std::max(mx, q);
    if (mx != 1) throw InfeasibleShape("shape vector must attain maximum exponent 1");
  }

  static ShapeVector uniform(size_t d) { return ShapeVector(std::vector<Rat>(d, Rat(1))); }

  size_t dim() const { return a.size(); }

  Rat sum() const {
    Rat s(0);
    for (const auto& q : a) s += q;
    return s;
  }
};

// sup norm |z| = max_i |z_i|
inline Interval sup_norm(const std::vector<Interval>& z) {
  if (z.empty()) throw DimensionMismatch("sup norm of empty vector");
  Interval m = abs_i(z[0]);
  for (size_t i = 1; i < z.size(); ++i) m = max_i(m, abs_i(z[i]));
  return m;
}

// product of |z_i| (no root), used where logs are taken anyway
inline Interval abs_product(const std::vector<Interval>& z) {
  if (z.empty()) throw DimensionMismatch("product of empty vector");
  Interval p = abs_i(z[0]);
  for (size_t i = 1; i < z.size(); ++i) p *= abs_i(z[i]);
  return p;
}

// geometric-mean functional (prod |z_i|)^(1/d)
inline Interval pi_functional(const std::vector<Interval>& z) {
  return root_n(abs_product(z), static_cast<unsigned long>(z.size()));
}

// truncated variant (prod max(1, |z_i|))^(1/k); k defaults to the length
inline Interval pi_prime(const std::vector<Interval>& z, unsigned long k = 0) {
  if (z.empty()) throw DimensionMismatch("product of empty vector");
  if (k == 0) k = z.size();
  unsigned prec = z[0].precision_bits();
  Interval p = Interval::one(prec);
  for (const auto& x : z) p *= max_i(Interval::one(prec), abs_i(x));
  return root_n(p, k);
}

// Euclidean volume of the box within the active-coordinate subspace, with the
// number of active coordinates.
inline std::pair<Interval, size_t> box_volume(const Weights& w) {
  size_t k = 0;
  Interval v = Interval::one(w.prec);
  for (size_t i = 0; i < w.dim(); ++i) {
    if (w.degenerate[i]) continue;
    v *= w.lambda[i].ldexp2(1);
    ++k;
  }
  return {v, k};
}

// Product over all coordinates (degenerate entries make it zero).
inline Interval weights_product(const Weights& w) {
  Interval p = Interval::one(w.prec);
  for (size_t i = 0; i < w.dim(); ++i) p *= w.lambda[i];
  return p;
}

// Weight family lambda_i = t^{a'_i} where a' is the shape with its gaps scaled so
// that sum a'_i = -d*gamma while max a'_i stays 1:
//   a'_i = 1 - s (1 - a_i),  s = d (1 + gamma) / (d - sum a).
// Exponents below -exponent_cap are refused (the box would be absurdly thin).
inline Weights from_t_gamma_shape(const Interval& t, const Rat& gamma, const ShapeVector& shape,
                                  unsigned prec = kDefaultPrec, const Rat& exponent_cap = Rat(8)) {
  size_t d = shape.dim();
  if (!t.is_positive() || !cert_gt(t, Interval::one(t.precision_bits())))
    throw DomainViolation("weight family needs t certainly > 1");
  if (gamma < -1) throw InfeasibleShape("gamma below -1 has no contracting weight family");

  Rat ssum = shape.sum();
  std::vector<Rat> ap(d);
  if (ssum == Rat(static_cast<long>(d))) {
    // all exponents are 1; only gamma = -1 is consistent with max = 1
    if (gamma != -1) throw InfeasibleShape("uniform shape admits only gamma = -1");
    for (auto& q : ap) q = 1;
  } else {
    Rat s = Rat(static_cast<long>(d)) * (Rat(1) + gamma) / (Rat(static_cast<long>(d)) - ssum);
    for (size_t i = 0; i < d; ++i) ap[i] = Rat(1) - s * (Rat(1) - shape.a[i]);
  }
  // exactness of the rescaling: sum a' = -d*gamma
  {
    Rat check(0);
    for (const auto& q : ap) check += q;
    if (check != -Rat(static_cast<long>(d)) * gamma)
      throw InternalError("shape rescaling lost the exponent-sum identity");
  }
  for (const auto& q : ap)
    if (q < -exponent_cap)
      throw InfeasibleShape("rescaled exponent " + rat_to_string(q) + " below cap -" +
                            rat_to_string(exponent_cap));

  Weights w;
  w.prec = prec;
  Interval tp = t.with_precision(prec);
  for (size_t i = 0; i < d; ++i) {
    Interval li = pow_i(tp, Interval::from_rat(ap[i], prec));
    w.lambda.push_back(li);
    w.degenerate.push_back(false);
    w.exact.push_back(std::nullopt);
  }
  return w;
}

}  // namespace latlab
