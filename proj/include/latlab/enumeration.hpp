#pragma once

// Certified lattice-point enumeration in weighted boxes, successive minima by
// certified bisection, shortest vectors of interval Gram matrices, and the
// distance from a lattice to a saturated sublattice's span.
//
// Soundness contract: a returned point is certainly in the closed box
// {|z_i| <= lambda_i}; when `complete` is set, every lattice point of the box is
// either returned or listed as undecided. Exact scalar kinds never leave a point
// undecided (an exact membership fallback settles boundary cases).

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latlab/boxes.hpp"
#include "latlab/errors.hpp"
#include "latlab/lattice.hpp"
#include "latlab/linalg.hpp"

namespace latlab {

enum class Verdict { Empty, Inhabited, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Empty: return "empty";
    case Verdict::Inhabited: return "inhabited";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

struct EnumOptions {
  unsigned start_prec = kDefaultPrec;
  unsigned max_prec = 4096;
  size_t max_points = 2000000;
  size_t max_nodes = 50000000;
  bool stop_after_first = false;  // verdict mode: quit after one certified point
};

struct EnumerationResult {
  std::vector<LatticePoint> points;  // certified members, nonzero, both signs, lex by u
  std::vector<Vec<Int>> undecided;   // float-kind boundary cases only
  bool complete = false;
  Verdict verdict = Verdict::Undecided;
  unsigned prec_used = 0;
  size_t nodes = 0;
};

// ---- membership ----

namespace detail {

// Exact inclusive test |(u B)_i| <= lambda_i; nullopt when the scalar kind or the
// weights cannot support an exact decision.
template <class S>
inline std::optional<bool> exact_membership(const Lattice<S>& l, const Weights& w,
                                            const Vec<Int>& u) {
  if constexpr (!is_exact_scalar_v<S>) {
    (void)l;
    (void)w;
    (void)u;
    return std::nullopt;
  } else {
    if (!w.all_exact()) return std::nullopt;
    Vec<S> z = lattice_coords_exact(l, u);
    for (size_t i = 0; i < z.size(); ++i) {
      const Rat& lam = *w.exact[i];
      if constexpr (std::is_same_v<S, Rat>) {
        if (rat_abs(z[i]) > lam) return false;
      } else {
        if (scalar_is_zero(z[i])) continue;
        if (lam == 0) return false;
        S bound = S::from_rat(z[i].field(), lam * lam, z[i].root_index());
        if (cmp(z[i] * z[i], bound) > 0) return false;
      }
    }
    return true;
  }
}

// Interval three-way test against the true weights. 1 inside, 0 outside, -1 unknown.
inline int interval_membership(const std::vector<Interval>& z, const Weights& w) {
  bool all_in = true;
  for (size_t i = 0; i < z.size(); ++i) {
    Interval a = abs_i(z[i]);
    if (w.exact[i].has_value()) {
      if (a.cert_gt_rat(*w.exact[i])) return 0;
      if (!a.cert_le_rat(*w.exact[i])) all_in = false;
    } else {
      if (cert_gt(a, w.lambda[i])) return 0;
      if (!cert_le(a, w.lambda[i])) all_in = false;
    }
  }
  return all_in ? 1 : -1;
}

}  // namespace detail

// ---- enumeration core ----

template <class S>
inline EnumerationResult enumerate_box(const Lattice<S>& l, const Weights& w,
                                       EnumOptions opt = {}) {
  if (w.dim() != l.dim) throw DimensionMismatch("weight count must match dimension");
  for (const auto& lam : w.lambda)
    if (!lam.is_finite()) throw DomainViolation("box weight must be finite");
  size_t d = l.dim;

  // floor for the rescale so degenerate and tiny weights keep the form definite;
  // membership is still tested against the true weights, so this only widens the
  // search region, never the result
  Rat margin = rat_2pow(-40);
  {
    Rat mx(1);
    for (const auto& lam : w.lambda) mx = std::max(mx, lam.hi_rat());
    margin *= mx;
  }
  std::vector<Rat> scale(d);
  for (size_t j = 0; j < d; ++j) scale[j] = std::max(w.lambda[j].hi_rat(), margin);

  for (unsigned prec = opt.start_prec;; prec *= 2) {
    bool last_try = prec * 2 > opt.max_prec;
    EnumerationResult res;
    res.prec_used = prec;

    // rescaled rows: R[k][j] = B[k][j] / scale_j puts the box inside the unit cube,
    // so the euclidean search radius^2 is the dimension
    Mat<Interval> r(d, Vec<Interval>(d, Interval::zero(prec)));
    for (size_t k = 0; k < d; ++k)
      for (size_t j = 0; j < d; ++j)
        r[k][j] = to_interval(l.basis[k][j], prec) / Interval::from_rat(scale[j], prec);

    std::vector<std::vector<double>> mid(d, std::vector<double>(d));
    for (size_t k = 0; k < d; ++k)
      for (size_t j = 0; j < d; ++j) mid[k][j] = r[k][j].mid_d();
    Mat<Int> t = lll_transform(mid);
    Mat<Interval> rt = mat_mul_int(t, r);

    auto ldlt = ldlt_iv(gram_iv(rt));
    if (!ldlt.has_value()) {
      if (last_try)
        throw PrecisionExhausted("positive definiteness of the search form", opt.max_prec);
      continue;
    }
    const Mat<Interval>& lm = ldlt->l;
    const Vec<Interval>& dv = ldlt->d;

    Interval radius2 = Interval::from_long(static_cast<long>(d), prec);
    Interval zero_iv = Interval::zero(prec);
    std::vector<Int> v(d, Int(0));
    bool range_blowup = false;

    auto descend = [&](auto&& self, size_t level_plus1, const Interval& budget) -> bool {
      if (res.nodes > opt.max_nodes)
        throw BudgetExceeded("enumeration node budget exhausted");
      if (level_plus1 == 0) {
        Vec<Int> u(d, Int(0));
        for (size_t i = 0; i < d; ++i)
          if (v[i] != 0)
            for (size_t j = 0; j < d; ++j) u[j] += v[i] * t[i][j];
        bool zero = true;
        for (const auto& x : u)
          if (x != 0) zero = false;
        if (zero) return false;

        auto z = lattice_coords_iv(l, u, prec);
        int m = detail::interval_membership(z, w);
        if (m < 0) {
          auto ex = detail::exact_membership(l, w, u);
          if (ex.has_value()) m = *ex ? 1 : 0;
        }
        if (m == 1) {
          LatticePoint p;
          p.u = std::move(u);
          p.z = std::move(z);
          res.points.push_back(std::move(p));
          if (res.points.size() > opt.max_points)
            throw BudgetExceeded("enumeration point budget exhausted");
          if (opt.stop_after_first) return true;
        } else if (m < 0) {
          res.undecided.push_back(std::move(u));
        }
        return false;
      }

      size_t k = level_plus1 - 1;
      Interval tk = Interval::zero(prec);
      for (size_t j = k + 1; j < d; ++j)
        if (v[j] != 0) tk += Interval::from_int(v[j], prec) * lm[j][k];
      Interval c = -tk;
      if (!budget.is_finite()) {
        range_blowup = true;
        return false;
      }
      Interval wk = sqrt_clamp(max_i(budget, zero_iv) / dv[k]);
      Int lo = (c - wk).ceil_of_lo();
      Int hi = (c + wk).floor_of_hi();
      if (hi - lo > 100000000) {
        range_blowup = true;
        return false;
      }
      if (lo > hi) return false;

      // zig-zag outward from the center; a side closes at a certain miss, but only
      // once that side is certainly past the center (the form is only monotone there)
      Int mid_n = (lo + hi) / 2;
      Int up = mid_n, dn = mid_n - 1;
      bool up_open = up <= hi, dn_open = dn >= lo;
      while (up_open || dn_open) {
        bool from_up = up_open && (!dn_open || up - mid_n <= mid_n - dn);
        Int n = from_up ? up : dn;
        ++res.nodes;
        Interval ni = Interval::from_int(n, prec);
        Interval dev = ni + tk;
        Interval nb = budget - dv[k] * dev * dev;
        bool advance = true;
        if (nb.is_finite() && cert_lt(nb, zero_iv)) {
          bool beyond = from_up ? cert_ge(ni, c) : cert_le(ni, c);
          if (beyond) {
            if (from_up)
              up_open = false;
            else
              dn_open = false;
            advance = false;
          }
        } else {
          v[k] = n;
          if (self(self, k, nb)) return true;
          v[k] = 0;
        }
        if (advance) {
          if (from_up) {
            up += 1;
            up_open = up <= hi;
          } else {
            dn -= 1;
            dn_open = dn >= lo;
          }
        }
      }
      return false;
    };

    bool stopped = descend(descend, d, radius2);

    if (range_blowup) {
      if (!last_try) continue;
      throw PrecisionExhausted("certified coefficient ranges did not stabilize",
                               opt.max_prec);
    }
    if (!res.undecided.empty() && !last_try) continue;

    res.complete = !stopped;
    std::sort(res.points.begin(), res.points.end());
    std::sort(res.undecided.begin(), res.undecided.end());
    if (!res.points.empty())
      res.verdict = Verdict::Inhabited;
    else if (res.complete && res.undecided.empty())
      res.verdict = Verdict::Empty;
    else
      res.verdict = Verdict::Undecided;
    return res;
  }
}

// ---- brute-force oracle ----

template <class S>
inline std::vector<LatticePoint> brute_force_box(const Lattice<S>& l, const Weights& w,
                                                 long n, unsigned prec = kDefaultPrec) {
  if (w.dim() != l.dim) throw DimensionMismatch("weight count must match dimension");
  size_t d = l.dim;
  double cells = 1;
  for (size_t i = 0; i < d; ++i) cells *= static_cast<double>(2 * n + 1);
  if (cells * static_cast<double>(d) > 5e7)
    throw BudgetExceeded("brute-force scan too large");

  std::vector<LatticePoint> out;
  Vec<Int> u(d, Int(-n));
  while (true) {
    bool zero = true;
    for (const auto& x : u)
      if (x != 0) zero = false;
    if (!zero) {
      auto z = lattice_coords_iv(l, u, prec);
      int m = detail::interval_membership(z, w);
      if (m < 0) {
        auto ex = detail::exact_membership(l, w, u);
        if (!ex.has_value())
          throw PrecisionExhausted("oracle needs decidable membership", prec);
        m = *ex ? 1 : 0;
      }
      if (m == 1) {
        LatticePoint p;
        p.u = u;
        p.z = std::move(z);
        out.push_back(std::move(p));
      }
    }
    size_t i = 0;
    while (i < d && u[i] == n) {
      u[i] = -n;
      ++i;
    }
    if (i == d) break;
    u[i] += 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- successive minima ----

struct MinimumWitness {
  Interval mu;  // certified bracket for the k-th minimum
  Vec<Int> u;
  std::vector<Interval> z;
};

namespace detail {

inline size_t exact_rank_of_points(const std::vector<LatticePoint>& pts,
                                   const std::vector<Vec<Int>>& extra, size_t d) {
  Mat<Rat> m;
  for (const auto& p : pts) {
    Vec<Rat> row(d);
    for (size_t j = 0; j < d; ++j) row[j] = Rat(p.u[j]);
    m.push_back(std::move(row));
  }
  for (const auto& u : extra) {
    Vec<Rat> row(d);
    for (size_t j = 0; j < d; ++j) row[j] = Rat(u[j]);
    m.push_back(std::move(row));
  }
  if (m.empty()) return 0;
  return exact_rank(m);
}

}  // namespace detail

// Certified dyadic bisection on the dilation factor. The k-th minimum is the
// smallest dilation at which the box holds k independent lattice points; the box
// is closed, so the infimum is attained and the predicate is decidable at probes
// off the critical values.
template <class S>
inline std::vector<MinimumWitness> successive_minima(const Lattice<S>& l, const Weights& w,
                                                     size_t k_max = 0,
                                                     const Rat& rel_tol = rat_2pow(-20),
                                                     EnumOptions opt = {}) {
  size_t d = l.dim;
  if (k_max == 0) k_max = d;
  if (k_max > d) throw DimensionMismatch("at most dim minima exist");
  EnumOptions eo = opt;
  eo.stop_after_first = false;

  auto rank_ge = [&](const Rat& s, size_t j) -> bool {
    EnumerationResult r = enumerate_box(l, w.scaled_rat(s), eo);
    size_t lo = detail::exact_rank_of_points(r.points, {}, d);
    if (lo >= j) return true;
    size_t hi = detail::exact_rank_of_points(r.points, r.undecided, d);
    if (hi < j) return false;
    throw PrecisionExhausted("rank at probe dilation is ambiguous", eo.max_prec);
  };

  std::vector<MinimumWitness> out;
  Rat lo(0), hi(1);
  for (size_t j = 1; j <= k_max; ++j) {
    if (!rank_ge(hi, j)) {
      int steps = 0;
      do {
        lo = hi;  // the failed probe is a certified lower bracket
        hi *= 2;
        if (++steps > 200)
          throw GridExhausted("no dilation reaches rank " + std::to_string(j), 0.0);
      } while (!rank_ge(hi, j));
    }
    while (hi - lo > rel_tol * hi) {
      Rat mid = (lo + hi) / 2;
      if (rank_ge(mid, j))
        hi = mid;
      else
        lo = mid;
    }
    MinimumWitness mw;
    mw.mu = Interval::from_rat_endpoints(lo, hi, 128);
    out.push_back(std::move(mw));
  }

  // witnesses: greedy rank-increasing pick at the top certified dilation
  Rat top = out.back().mu.hi_rat();
  EnumerationResult r = enumerate_box(l, w.scaled_rat(top), eo);
  if (!r.undecided.empty())
    throw PrecisionExhausted("witness extraction hit undecided points", eo.max_prec);

  std::vector<std::pair<double, size_t>> order;
  for (size_t i = 0; i < r.points.size(); ++i) {
    Interval wn = Interval::zero(128);
    for (size_t jj = 0; jj < d; ++jj) {
      if (w.degenerate[jj] || !w.lambda[jj].is_positive()) continue;
      wn = max_i(wn, abs_i(r.points[i].z[jj]) / w.lambda[jj].with_precision(128));
    }
    order.emplace_back(wn.mid_d(), i);
  }
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return r.points[a.second].u < r.points[b.second].u;
  });
  std::vector<LatticePoint> picked;
  for (const auto& [key, idx] : order) {
    (void)key;
    if (picked.size() == k_max) break;
    picked.push_back(r.points[idx]);
    if (detail::exact_rank_of_points(picked, {}, d) < picked.size()) picked.pop_back();
  }
  if (picked.size() < k_max)
    throw InternalError("bisection certified a rank the witness box does not show");
  for (size_t j = 0; j < k_max; ++j) {
    out[j].u = picked[j].u;
    out[j].z = picked[j].z;
  }
  return out;
}

// The two Minkowski inequalities, (2^d/d!) det <= prod mu_j * vol(box) <= 2^d det,
// cannot be certifiably violated by the computed brackets.
template <class S>
inline bool minkowski_consistent(const std::vector<MinimumWitness>& minima,
                                 const Lattice<S>& l, const Weights& w) {
  size_t d = l.dim;
  if (minima.size() != d) return false;
  unsigned prec = 256;
  Interval prod = Interval::one(prec);
  for (const auto& m : minima) prod *= m.mu.with_precision(prec);
  auto [vol, active] = box_volume(w);
  if (active != d) return false;
  Interval lhs = prod * vol.with_precision(prec);
  Interval det = l.det_abs.with_precision(prec);
  Int fact(1);
  for (size_t i = 2; i <= d; ++i) fact *= static_cast<long>(i);
  Interval lower = det.ldexp2(static_cast<long>(d)) / Interval::from_int(fact, prec);
  Interval upper = det.ldexp2(static_cast<long>(d));
  return !cert_lt(lhs, lower) && !cert_gt(lhs, upper);
}

// ---- shortest vector on an interval Gram matrix ----

struct ShortestVector {
  Vec<Int> v;      // a nonzero vector attaining the upper endpoint
  Interval norm2;  // certified enclosure of the minimum of the form
};

// The enclosure is genuinely two-sided: the upper endpoint comes from the best
// vector found, the lower endpoint from the smallest lower endpoint over every
// leaf the pruned search had to visit (the true minimizer is never pruned).
inline ShortestVector shortest_vector_gram(const Mat<Interval>& g, unsigned prec,
                                           size_t max_nodes = 20000000) {
  size_t m = mat_rows(g);
  auto ldlt = ldlt_iv(g);
  if (!ldlt.has_value())
    throw PrecisionExhausted("Gram matrix not certifiably positive definite", prec);
  const Mat<Interval>& lm = ldlt->l;
  const Vec<Interval>& dv = ldlt->d;

  auto qform = [&](const Vec<Int>& v) {
    Interval q = Interval::zero(prec);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        if (v[i] != 0 && v[j] != 0)
          q += Interval::from_int(v[i], prec) * Interval::from_int(v[j], prec) * g[i][j];
    return q;
  };

  Vec<Int> best(m, Int(0));
  best[0] = 1;
  Interval best_q = qform(best);
  for (size_t k = 1; k < m; ++k) {
    Vec<Int> e(m, Int(0));
    e[k] = 1;
    Interval q = qform(e);
    if (q.hi_rat() < best_q.hi_rat()) {
      best = e;
      best_q = q;
    }
  }

  std::optional<Rat> lower_min;
  std::vector<Int> v(m, Int(0));
  size_t nodes = 0;
  Interval zero_iv = Interval::zero(prec);

  auto descend = [&](auto&& self, size_t level_plus1, const Interval& budget) -> void {
    if (++nodes > max_nodes) throw BudgetExceeded("shortest-vector node budget");
    if (level_plus1 == 0) {
      bool zero = true;
      for (const auto& x : v)
        if (x != 0) zero = false;
      if (zero) return;
      Vec<Int> cand(v.begin(), v.end());
      Interval q = qform(cand);
      Rat qlo = q.lo_rat();
      if (!lower_min.has_value() || qlo < *lower_min) lower_min = qlo;
      if (q.hi_rat() < best_q.hi_rat()) {
        best = std::move(cand);
        best_q = q;
      }
      return;
    }
    size_t k = level_plus1 - 1;
    Interval tk = Interval::zero(prec);
    for (size_t j = k + 1; j < m; ++j)
      if (v[j] != 0) tk += Interval::from_int(v[j], prec) * lm[j][k];
    Interval c = -tk;
    Interval wk = sqrt_clamp(max_i(budget, zero_iv) / dv[k]);
    Int lo = (c - wk).ceil_of_lo();
    Int hi = (c + wk).floor_of_hi();
    if (hi - lo > 10000000)
      throw PrecisionExhausted("shortest-vector range did not stabilize", prec);
    for (Int n = lo; n <= hi; n += 1) {
      Interval dev = Interval::from_int(n, prec) + tk;
      Interval nb = budget - dv[k] * dev * dev;
      if (cert_lt(nb, zero_iv)) continue;
      v[k] = n;
      self(self, k, nb);
      v[k] = 0;
    }
  };

  // second pass reruns with the improved radius; pruning always uses a radius at
  // least as large as the final best, so the minimizer is visited in both passes
  for (int pass = 0; pass < 2; ++pass) {
    nodes = 0;
    descend(descend, m, best_q);
  }

  Rat lo_end = lower_min.has_value() ? std::min(*lower_min, best_q.lo_rat())
                                     : best_q.lo_rat();
  if (lo_end < 0) lo_end = 0;
  return {best, Interval::from_rat_endpoints(lo_end, best_q.hi_rat(), prec)};
}

// Distance from the lattice points outside a saturated sublattice's span to that
// span. Positive because the sublattice is the full intersection with its span;
// precision escalates until the enclosure shows it.
template <class S>
inline Interval distance_to_subspace_lattice(const Lattice<S>& l, const Subspace<S>& s,
                                             unsigned start_prec = kDefaultPrec,
                                             unsigned max_prec = 4096) {
  size_t d = l.dim, p = s.rank();
  if (p == 0 || p >= d) throw DimensionMismatch("need a proper nonzero sublattice");
  Mat<Int> full = unimodular_completion(s.coeffs);

  for (unsigned prec = start_prec;; prec *= 2) {
    bool last_try = prec * 2 > max_prec;
    Mat<Interval> b(d, Vec<Interval>(d, Interval::zero(prec)));
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) b[i][j] = to_interval(l.basis[i][j], prec);
    Mat<Interval> mb = mat_mul_int(s.coeffs, b);  // p x d, spans the subspace
    Mat<Int> comp(full.begin() + static_cast<long>(p), full.end());
    Mat<Interval> vb = mat_mul_int(comp, b);      // (d-p) x d, completes the basis

    // Gram of the component orthogonal to the span: VV^T - (VM^T)(MM^T)^-1 (MV^T);
    // the distance from b*V + (anything in the span's lattice) to the span depends
    // only on b, so the minimum over nonzero b of this form is delta^2
    Mat<Interval> mmt = gram_iv(mb);
    auto inv = inverse_iv(mmt);
    if (inv.has_value()) {
      Mat<Interval> vmt = mat_mul(vb, transpose(mb));
      Mat<Interval> schur = mat_mul(mat_mul(vmt, *inv), transpose(vmt));
      Mat<Interval> vvt = gram_iv(vb);
      Mat<Interval> gq(d - p, Vec<Interval>(d - p, Interval::zero(prec)));
      for (size_t i = 0; i < d - p; ++i)
        for (size_t j = 0; j < d - p; ++j) gq[i][j] = vvt[i][j] - schur[i][j];
      try {
        ShortestVector sv = shortest_vector_gram(gq, prec);
        Interval delta = sqrt_clamp(sv.norm2);
        if (delta.is_positive()) return delta;
      } catch (const PrecisionExhausted&) {
        if (last_try) throw;
      }
    }
    if (last_try)
      throw PrecisionExhausted("distance to sublattice span not certifiably positive",
                               max_prec);
  }
}

}  // namespace latlab
