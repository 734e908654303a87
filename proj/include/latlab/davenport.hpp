#pragma once

// Empty-box construction: given a weighted box and the successive minima, find a
// permutation and a dilation c so the box with weights c * mu_{k_i} * lambda_i is
// certifiably empty, then drive it down a cylinder ladder to witness a trivial
// uniform exponent. Two routes: the full-dimensional one, and the one through a
// proper minimal rational subspace with a distance collar on the complement.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "latlab/boxes.hpp"
#include "latlab/enumeration.hpp"
#include "latlab/errors.hpp"
#include "latlab/lattice.hpp"

namespace latlab {

struct EmptyBoxResult {
  std::vector<size_t> perm;      // perm[i] is the index of the minimum scaling coord i
  Rat c;                         // certified dilation, strictly below 1
  std::vector<Rat> box_weights;  // exact dyadic weights of the certified-empty box
  std::vector<MinimumWitness> minima;
  Interval volume;
  unsigned prec_used = 0;
  size_t nodes = 0;
};

namespace detail {

inline std::vector<Rat> hi_weights(const Rat& c, const std::vector<size_t>& perm,
                                   const std::vector<MinimumWitness>& minima,
                                   const Weights& w, unsigned prec) {
  std::vector<Rat> out(w.dim());
  Interval ci = Interval::from_rat(c, prec);
  for (size_t i = 0; i < w.dim(); ++i)
    out[i] = (ci * minima[perm[i]].mu.with_precision(prec) * w.lambda[i]).hi_rat();
  return out;
}

}  // namespace detail

// The box with the permuted-minima weights is inhabited at c = 1 (it contains the
// first-minimum witness), and empty once c drops below mu_1/mu_d; bisect between.
template <class S>
inline EmptyBoxResult davenport_empty_box(const Lattice<S>& l, const Weights& w,
                                          const std::vector<MinimumWitness>& minima,
                                          const Rat& rel_tol = rat_2pow(-10),
                                          EnumOptions opt = {}) {
  size_t d = l.dim;
  if (w.dim() != d || minima.size() != d)
    throw DimensionMismatch("weights and minima must cover the dimension");
  if (w.active_count() != d)
    throw DomainViolation("the empty-box construction needs positive weights");
  if (d > 6) throw BudgetExceeded("permutation search is capped at dimension 6");

  EnumOptions probe_opt = opt;
  probe_opt.stop_after_first = true;

  auto empty_at = [&](const Rat& c, const std::vector<size_t>& perm) -> bool {
    std::vector<Rat> hw = detail::hi_weights(c, perm, minima, w, 192);
    EnumerationResult r = enumerate_box(l, Weights::from_rats(hw), probe_opt);
    return r.verdict == Verdict::Empty;
  };

  std::vector<size_t> perm(d);
  for (size_t i = 0; i < d; ++i) perm[i] = i;
  std::optional<Rat> best_c;
  std::vector<size_t> best_perm;

  do {
    // halve down to the first certified-empty dilation
    Rat lo(1, 2), hi(1);
    int steps = 0;
    bool found = true;
    while (!empty_at(lo, perm)) {
      hi = lo;
      lo /= 2;
      if (++steps > 200) {
        found = false;
        break;
      }
    }
    if (!found) continue;
    while (hi - lo > rel_tol * hi) {
      Rat mid = (lo + hi) / 2;
      if (empty_at(mid, perm))
        lo = mid;
      else
        hi = mid;
    }
    if (!best_c.has_value() || lo > *best_c) {
      best_c = lo;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (!best_c.has_value())
    throw GridExhausted("no dilation certified the permuted box empty", 0.0);

  EmptyBoxResult res;
  res.perm = best_perm;
  res.c = *best_c;
  res.box_weights = detail::hi_weights(res.c, res.perm, minima, w, 192);
  res.minima = minima;

  // the certificate is the exact-weight re-enumeration, complete and empty
  EnumerationResult check = enumerate_box(l, Weights::from_rats(res.box_weights), opt);
  if (check.verdict != Verdict::Empty)
    throw InternalError("certified-empty probe did not replay as empty");
  res.prec_used = check.prec_used;
  res.nodes = check.nodes;

  Interval vol = Interval::one(256);
  for (const auto& q : res.box_weights) vol *= Interval::from_rat(q, 256).ldexp2(1);
  res.volume = vol;
  return res;
}

template <class S>
inline EmptyBoxResult davenport_empty_box(const Lattice<S>& l, const Weights& w,
                                          const Rat& rel_tol = rat_2pow(-10),
                                          EnumOptions opt = {}) {
  if (w.active_count() != w.dim())
    throw DomainViolation("the empty-box construction needs positive weights");
  return davenport_empty_box(l, w, successive_minima(l, w, 0, rat_2pow(-20), opt),
                             rel_tol, opt);
}

// ---- cylinder ladders ----

struct CylinderCertificate {
  int which_case = 0;            // 1: full dimension, 2: through a proper subspace
  Rat eps_requested, eps_used;
  Rat lambda;                    // ladder value that met the entry condition
  Rat t_witness;                 // sup norm of the certified box
  std::vector<Rat> box_weights;  // full-dimension certified-empty box
  Interval volume;
  std::optional<Interval> gamma_witness;
  EmptyBoxResult core;           // the permuted-minima box behind the certificate
  size_t p = 0;                  // case 2: subspace rank
  std::vector<size_t> cols;      // case 2: coordinate subset of the projection
  std::optional<Interval> delta; // case 2: distance collar radius source
};

// Exponent reading of a certified-empty box with sup norm t: the geometric mean
// of the weights is t^{-gamma}, i.e. gamma = -log(prod lambda_i) / (d log t).
inline std::optional<Interval> box_gamma_witness(const std::vector<Rat>& box_w,
                                                 unsigned prec = 256) {
  Rat sup = box_w[0];
  for (const auto& q : box_w) sup = std::max(sup, q);
  Interval t = Interval::from_rat(sup, prec);
  if (!cert_gt(t, Interval::one(prec))) return std::nullopt;
  Interval prod = Interval::one(prec);
  for (const auto& q : box_w) prod *= Interval::from_rat(q, prec);
  Interval g = -log_i(prod) /
               (Interval::from_long(static_cast<long>(box_w.size()), prec) * log_i(t));
  return g;
}

inline Rat box_sup_norm(const std::vector<Rat>& box_w) {
  Rat sup = box_w[0];
  for (const auto& q : box_w) sup = std::max(sup, q);
  return sup;
}

namespace detail {

// weights (2^e, 2^{-e/(m-1)}, ..., 2^{-e/(m-1)}) on m coordinates; exact dyadic
// whenever m-1 divides e, so boundary points stay decidable
inline Weights ladder_weights(long e, size_t m, unsigned prec = 192) {
  long m1 = static_cast<long>(m - 1);
  if (e % m1 == 0) {
    std::vector<Rat> v(m, rat_2pow(-e / m1));
    v[0] = rat_2pow(e);
    return Weights::from_rats(v, prec);
  }
  Interval li = Interval::from_rat(rat_2pow(e), prec);
  Interval small = pow_i(li, Interval::from_rat(Rat(-1, m1), prec));
  std::vector<Interval> v;
  v.push_back(li);
  for (size_t i = 1; i < m; ++i) v.push_back(small);
  return Weights::from_intervals(std::move(v), prec);
}

inline long ceil_sqrt_long(size_t n) {
  long s = 0;
  while (static_cast<size_t>(s) * static_cast<size_t>(s) < n) ++s;
  return s;
}

}  // namespace detail

// Full-dimensional route: climb the dilation ladder until the last minimum of the
// skew box certifies mu_d * lambda^{-1/(d-1)} < eps, then apply the empty-box
// construction inside the eps-cylinder around the first axis.
template <class S>
inline CylinderCertificate case1_empty_cylinder(const Lattice<S>& l, const Rat& eps,
                                                int ladder_max_exp = 40,
                                                EnumOptions opt = {}) {
  size_t d = l.dim;
  if (d < 2) throw DimensionMismatch("cylinder construction needs dimension >= 2");
  if (eps <= 0) throw DomainViolation("eps must be positive");
  if constexpr (is_exact_scalar_v<S>) {
    // propagates AxisPointPresent when the first axis meets the lattice
    if (minimal_rational_subspace(l).rank() != d)
      throw DomainViolation("minimal subspace is proper: use the subspace route");
  }

  double best_achieved = -1;
  for (int e = 1; e <= ladder_max_exp; ++e) {
    Rat lambda = rat_2pow(e);
    Weights w = detail::ladder_weights(e, d);
    auto minima = successive_minima(l, w, 0, rat_2pow(-20), opt);
    Rat mu_hi(0);
    for (const auto& m : minima) mu_hi = std::max(mu_hi, m.mu.hi_rat());
    Rat reach = mu_hi * w.lambda[1].hi_rat();
    double rd = Interval::from_rat(reach, 64).mid_d();
    if (best_achieved < 0 || rd < best_achieved) best_achieved = rd;
    if (!(reach < eps)) continue;

    EmptyBoxResult core = davenport_empty_box(l, w, minima, rat_2pow(-10), opt);
    for (size_t i = 1; i < d; ++i)
      if (!(core.box_weights[i] < eps))
        throw InternalError("empty box escaped the cylinder");

    CylinderCertificate cert;
    cert.which_case = 1;
    cert.eps_requested = eps;
    cert.eps_used = eps;
    cert.lambda = lambda;
    cert.t_witness = box_sup_norm(core.box_weights);
    cert.box_weights = core.box_weights;
    cert.volume = core.volume;
    cert.gamma_witness = box_gamma_witness(core.box_weights);
    cert.core = std::move(core);
    return cert;
  }
  throw GridExhausted("cylinder entry condition never certified on the ladder",
                      best_achieved);
}

// Subspace route: Davenport on the projected lattice in the best coordinate
// subset, a delta/(2 sqrt(d-p)) collar on the complement coordinates, and a
// full-lattice re-enumeration of the combined box as the certificate.
template <class S>
inline CylinderCertificate case2_empty_cylinder(const Lattice<S>& l, const Rat& eps,
                                                int ladder_max_exp = 40,
                                                EnumOptions opt = {}) {
  static_assert(is_exact_scalar_v<S>, "the subspace route needs an exact scalar kind");
  size_t d = l.dim;
  if (eps <= 0) throw DomainViolation("eps must be positive");

  Subspace<S> sub = minimal_rational_subspace(l);  // throws AxisPointPresent if unbounded
  size_t p = sub.rank();
  if (p >= d)
    throw DomainViolation("minimal subspace is full: use the full-dimensional route");
  if (p < 2)
    throw InternalError("rank-1 minimal subspace must contain an axis point");

  std::vector<size_t> cols = best_coordinate_subset(sub);
  Lattice<S> proj = project_sublattice(sub, cols);
  Interval delta = distance_to_subspace_lattice(l, sub);
  Rat delta_lo = delta.lo_rat();
  if (delta_lo <= 0) throw PrecisionExhausted("distance collar not positive", 4096);

  // collar half-width and the eps the construction can actually honor
  long s = detail::ceil_sqrt_long(d - p);
  Rat collar = delta_lo / (2 * s);
  Rat eps_cap = delta_lo / (8 * s);
  Rat eps_used = std::min(eps, eps_cap);

  double best_achieved = -1;
  for (int e = 1; e <= ladder_max_exp; ++e) {
    Rat lambda = rat_2pow(e);
    Weights w = detail::ladder_weights(e, p);
    auto minima = successive_minima(proj, w, 0, rat_2pow(-20), opt);
    Rat mu_hi(0);
    for (const auto& m : minima) mu_hi = std::max(mu_hi, m.mu.hi_rat());
    Rat reach = mu_hi * w.lambda[1].hi_rat();
    double rd = Interval::from_rat(reach, 64).mid_d();
    if (best_achieved < 0 || rd < best_achieved) best_achieved = rd;
    if (!(reach < eps_used)) continue;

    EmptyBoxResult core = davenport_empty_box(proj, w, minima, rat_2pow(-10), opt);
    for (size_t i = 1; i < p; ++i)
      if (!(core.box_weights[i] < eps_used))
        throw InternalError("empty box escaped the cylinder");

    // combined box: projected weights on the subset, the collar elsewhere
    std::vector<Rat> full_w(d, collar);
    for (size_t i = 0; i < p; ++i) full_w[cols[i]] = core.box_weights[i];
    EnumerationResult check = enumerate_box(l, Weights::from_rats(full_w), opt);
    if (check.verdict != Verdict::Empty)
      throw InternalError("combined box is not certifiably empty on the full lattice");

    CylinderCertificate cert;
    cert.which_case = 2;
    cert.eps_requested = eps;
    cert.eps_used = eps_used;
    cert.lambda = lambda;
    cert.t_witness = box_sup_norm(full_w);
    cert.box_weights = std::move(full_w);
    Interval vol = Interval::one(256);
    for (const auto& q : cert.box_weights) vol *= Interval::from_rat(q, 256).ldexp2(1);
    cert.volume = vol;
    cert.gamma_witness = box_gamma_witness(cert.box_weights);
    cert.core = std::move(core);
    cert.p = p;
    cert.cols = std::move(cols);
    cert.delta = delta;
    return cert;
  }
  throw GridExhausted("cylinder entry condition never certified on the ladder",
                      best_achieved);
}

// ---- the dichotomy ----

struct DichotomyOutcome {
  bool axis_point = false;              // an axis point forces an infinite exponent
  std::vector<std::string> axis_u;      // its coefficient vector when present
  std::optional<CylinderCertificate> certificate;  // the trivial-exponent witness
};

template <class S>
inline DichotomyOutcome dichotomy_witness(const Lattice<S>& l, const Rat& eps,
                                          int ladder_max_exp = 40, EnumOptions opt = {}) {
  static_assert(is_exact_scalar_v<S>, "the dichotomy needs an exact scalar kind");
  DichotomyOutcome out;
  size_t p;
  try {
    p = minimal_rational_subspace(l).rank();
  } catch (const AxisPointPresent& e) {
    out.axis_point = true;
    out.axis_u = e.u_decimal;
    return out;
  }
  out.certificate = (p == l.dim) ? case1_empty_cylinder(l, eps, ladder_max_exp, opt)
                                 : case2_empty_cylinder(l, eps, ladder_max_exp, opt);
  return out;
}

}  // namespace latlab
