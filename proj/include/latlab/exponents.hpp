#pragma once

// Numerical estimators with one-sided certificates for the five box-occupancy
// exponents, plus the continued-fraction oracle used for 2-dimensional
// cross-validation. Lower bounds come from found points, upper bounds from
// certified-empty boxes or from a covering argument over small-product boxes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "latlab/boxes.hpp"
#include "latlab/davenport.hpp"
#include "latlab/enumeration.hpp"
#include "latlab/errors.hpp"
#include "latlab/lattice.hpp"

namespace latlab {

enum class ExponentKind { Regular, Uniform, WeakUniform, Mult, MultUniform };

inline const char* exponent_kind_name(ExponentKind k) {
  switch (k) {
    case ExponentKind::Regular: return "regular";
    case ExponentKind::Uniform: return "uniform";
    case ExponentKind::WeakUniform: return "weak-uniform";
    case ExponentKind::Mult: return "mult";
    case ExponentKind::MultUniform: return "mult-uniform";
  }
  return "?";
}

struct TraceEntry {
  Rat t;
  std::optional<Interval> lower;  // witnessed by a found point (or all-inhabited probe)
  std::optional<Interval> upper;  // certified by emptiness or the covering argument
  std::string witness;
};

struct ExponentTrace {
  ExponentKind kind = ExponentKind::Regular;
  std::vector<TraceEntry> entries;
  bool unbounded_suspected = false;
  std::optional<Interval> estimate;  // absent when unbounded is suspected
  std::vector<std::string> notes;
};

// Ascending grid between exact endpoints; interior values dyadically rounded.
inline std::vector<Rat> make_t_grid(const Rat& start, const Rat& stop, bool geometric,
                                    size_t count) {
  if (count == 0) throw DomainViolation("grid needs at least one entry");
  if (stop < start) throw DomainViolation("grid stop below start");
  if (geometric && start <= 0) throw DomainViolation("geometric grid needs start > 0");
  std::vector<Rat> out;
  if (count == 1 || start == stop) {
    out.push_back(start);
    return out;
  }
  double a = Interval::from_rat(start, 64).mid_d();
  double b = Interval::from_rat(stop, 64).mid_d();
  for (size_t k = 0; k < count; ++k) {
    Rat t;
    if (k == 0)
      t = start;
    else if (k == count - 1)
      t = stop;
    else {
      double f = static_cast<double>(k) / static_cast<double>(count - 1);
      double g = geometric ? a * std::pow(b / a, f) : a + (b - a) * f;
      t = rat_round_dyadic(Rat(g), 12);
    }
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

namespace detail {

inline std::string format_u(const Vec<Int>& u) {
  std::ostringstream os;
  os << "u=(";
  for (size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i].str();
  os << ")";
  return os.str();
}

inline std::string format_box(const std::vector<Rat>& w) {
  std::ostringstream os;
  os << "box=(";
  for (size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << rat_to_string(w[i]);
  os << ")";
  return os.str();
}

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

// ---- small-product point collector ----

// Every nonzero point with sup norm <= 2^e_sup and |z_1 ... z_d| <= 2 max(1, det)
// lies in one of the dyadic boxes (2^{a_1}, ..., 2^{a_d}) with sum a_i = B,
// e_min <= a_i <= e_sup; points outside all of them have negative exponent.
struct CollectedPoints {
  std::vector<LatticePoint> pts;     // all coordinates certified nonzero
  std::vector<Interval> sup_abs;     // per point: max_i |z_i|
  std::vector<Interval> abs_prod;    // per point: prod_i |z_i|
  std::vector<Vec<Int>> zero_coord;  // points with a certified-zero coordinate
  std::vector<std::string> skipped;
  long e_sup = 0;
};

template <class S>
inline CollectedPoints small_product_points(const Lattice<S>& l, long e_sup,
                                            EnumOptions opt = {}) {
  size_t d = l.dim;
  if (d < 2) throw DimensionMismatch("collector needs dimension >= 2");

  Rat c_bound = 2 * std::max(Rat(1), l.det_abs.hi_rat());
  long b_sum = 0;
  while (rat_2pow(b_sum + 1) <= c_bound) ++b_sum;
  b_sum += static_cast<long>(d);
  long e_min = b_sum - e_sup * static_cast<long>(d - 1);

  std::vector<std::vector<long>> boxes;
  if (b_sum >= e_sup * static_cast<long>(d)) {
    boxes.emplace_back(d, e_sup);  // the whole cube already has small product
  } else {
    std::vector<long> cur(d);
    auto rec = [&](auto&& self, size_t i, long left) -> void {
      if (i + 1 == d) {
        if (left >= e_min && left <= e_sup) {
          cur[i] = left;
          boxes.push_back(cur);
        }
        return;
      }
      long rest = static_cast<long>(d - i - 1);
      long lo = std::max(e_min, left - e_sup * rest);
      long hi = std::min(e_sup, left - e_min * rest);
      for (long e = lo; e <= hi; ++e) {
        cur[i] = e;
        self(self, i + 1, left - e);
      }
    };
    rec(rec, 0, b_sum);
  }

  std::map<Vec<Int>, LatticePoint> merged;
  unsigned prec_seen = kDefaultPrec;
  CollectedPoints out;
  out.e_sup = e_sup;
  for (const auto& ebox : boxes) {
    std::vector<Rat> wr(d);
    for (size_t i = 0; i < d; ++i) wr[i] = rat_2pow(ebox[i]);
    EnumerationResult r = enumerate_box(l, Weights::from_rats(wr), opt);
    prec_seen = std::max(prec_seen, r.prec_used);
    for (auto& p : r.points) merged.emplace(p.u, std::move(p));
    for (const auto& u : r.undecided)
      out.skipped.push_back(detail::format_u(u) + " membership undecided");
  }

  for (auto& [u, p] : merged) {
    bool zero = false, undecided = false;
    for (size_t i = 0; i < d && !zero && !undecided; ++i) {
      if (!p.z[i].contains_zero()) continue;
      if constexpr (is_exact_scalar_v<S>) {
        Vec<S> zx = lattice_coords_exact(l, u);
        if (scalar_is_zero(zx[i])) {
          zero = true;
          break;
        }
        unsigned pr = prec_seen;
        while (p.z[i].contains_zero() && pr < opt.max_prec) {
          pr *= 2;
          p.z = lattice_coords_iv(l, u, pr);
        }
        if (p.z[i].contains_zero()) undecided = true;
      } else {
        unsigned pr = prec_seen;
        while (p.z[i].contains_zero() && pr < opt.max_prec) {
          pr *= 2;
          p.z = lattice_coords_iv(l, u, pr);
        }
        if (p.z[i].contains_zero()) undecided = true;
      }
    }
    if (zero) {
      out.zero_coord.push_back(u);
      continue;
    }
    if (undecided) {
      out.skipped.push_back(detail::format_u(u) + " coordinate sign undecided");
      continue;
    }
    Interval sup = abs_i(p.z[0]);
    Interval prod = abs_i(p.z[0]);
    for (size_t i = 1; i < d; ++i) {
      sup = max_i(sup, abs_i(p.z[i]));
      prod *= abs_i(p.z[i]);
    }
    out.sup_abs.push_back(sup);
    out.abs_prod.push_back(prod);
    out.pts.push_back(std::move(p));
  }
  return out;
}

// gamma(z) = -log(prod |z_i|) / (d log sup|z|), defined when sup|z| > 1
inline std::optional<Interval> point_gamma(const Interval& sup_abs,
                                           const Interval& abs_prod, size_t d,
                                           unsigned prec = 192) {
  if (!cert_gt(sup_abs, Interval::one(prec))) return std::nullopt;
  return -log_i(abs_prod.with_precision(prec)) /
         (Interval::from_long(static_cast<long>(d), prec) *
          log_i(sup_abs.with_precision(prec)));
}

// ---- best-box-ratio exponent (running max over found points) ----

template <class S>
inline ExponentTrace regular_estimate(const Lattice<S>& l, const Rat& t_max,
                                      size_t grid_size = 16, EnumOptions opt = {}) {
  size_t d = l.dim;
  if (t_max < 2) throw DomainViolation("horizon must be at least 2");
  long e_sup = 1;
  while (rat_2pow(e_sup) < t_max) ++e_sup;

  CollectedPoints col = small_product_points(l, e_sup, opt);

  ExponentTrace tr;
  tr.kind = ExponentKind::Regular;
  tr.notes = col.skipped;
  if (!col.zero_coord.empty()) {
    tr.unbounded_suspected = true;
    tr.notes.push_back(detail::format_u(col.zero_coord.front()) +
                       " has a zero coordinate: thinning that side keeps the point");
  }

  std::vector<std::optional<Interval>> gam(col.pts.size());
  for (size_t i = 0; i < col.pts.size(); ++i)
    gam[i] = point_gamma(col.sup_abs[i], col.abs_prod[i], d);

  for (const Rat& t : make_t_grid(Rat(2), t_max, true, grid_size)) {
    TraceEntry e;
    e.t = t;
    std::optional<size_t> best;
    Rat ub(0);
    for (size_t i = 0; i < col.pts.size(); ++i) {
      if (!gam[i].has_value()) continue;
      if (col.sup_abs[i].lo_rat() <= t) ub = std::max(ub, gam[i]->hi_rat());
      if (col.sup_abs[i].hi_rat() > t) continue;
      if (!best.has_value() || gam[i]->lo_rat() > gam[*best]->lo_rat()) best = i;
    }
    if (best.has_value()) {
      e.lower = gam[*best];
      e.witness = detail::format_u(col.pts[*best].u);
    }
    // every point outside the collected small-product region has negative gamma
    e.upper = Interval::from_rat(ub, 64);
    tr.entries.push_back(std::move(e));
  }

  // the estimate covers the nonzero-coordinate points; the flag reports the
  // axis directions separately (they make the true exponent infinite)
  if (!tr.entries.empty()) {
    const TraceEntry& last = tr.entries.back();
    Rat lo = last.lower.has_value() ? std::max(Rat(0), last.lower->lo_rat()) : Rat(0);
    Rat hi = std::max(lo, last.upper->hi_rat());
    tr.estimate = Interval::from_rat_endpoints(lo, hi, 64);
  }
  return tr;
}

// ---- every-scale exponent: psi(t) = max over |z| <= t of -log prod / (d log t) ----

template <class S>
inline ExponentTrace weak_uniform_estimate(const Lattice<S>& l,
                                           const std::vector<Rat>& t_grid,
                                           const Rat& t_max, EnumOptions opt = {}) {
  size_t d = l.dim;
  if (t_max < 2) throw DomainViolation("horizon must be at least 2");
  long e_sup = 1;
  while (rat_2pow(e_sup) < t_max) ++e_sup;
  CollectedPoints col = small_product_points(l, e_sup, opt);

  ExponentTrace tr;
  tr.kind = ExponentKind::WeakUniform;
  tr.notes = col.skipped;
  if (!col.zero_coord.empty()) {
    tr.unbounded_suspected = true;
    tr.notes.push_back(detail::format_u(col.zero_coord.front()) +
                       " has a zero coordinate: psi is infinite past its sup norm");
  }

  Interval di = Interval::from_long(static_cast<long>(d), 192);
  for (const Rat& t : t_grid) {
    if (t <= 1 || t > t_max) {
      tr.notes.push_back("grid entry " + rat_to_string(t) + " outside (1, horizon]");
      continue;
    }
    TraceEntry e;
    e.t = t;
    Interval logt = log_i(Interval::from_rat(t, 192));
    std::optional<size_t> best;
    std::optional<Interval> best_val;
    Rat ub(0);
    for (size_t i = 0; i < col.pts.size(); ++i) {
      Interval val = -log_i(col.abs_prod[i].with_precision(192)) / (di * logt);
      if (col.sup_abs[i].lo_rat() <= t) ub = std::max(ub, val.hi_rat());
      if (col.sup_abs[i].hi_rat() > t) continue;
      if (!best.has_value() || val.lo_rat() > best_val->lo_rat()) {
        best = i;
        best_val = val;
      }
    }
    if (best.has_value()) {
      e.lower = best_val;
      e.witness = detail::format_u(col.pts[*best].u);
    }
    e.upper = Interval::from_rat(ub, 64);
    tr.entries.push_back(std::move(e));
  }

  // tail minimum over nonzero-coordinate points; axis directions only set the flag
  if (!tr.entries.empty()) {
    size_t tail = tr.entries.size() / 2;
    std::optional<Rat> lo, hi;
    for (size_t i = tail; i < tr.entries.size(); ++i) {
      const TraceEntry& e = tr.entries[i];
      if (e.lower.has_value()) {
        Rat v = e.lower->lo_rat();
        lo = lo.has_value() ? std::min(*lo, v) : v;
      }
      Rat u = e.upper->hi_rat();
      hi = hi.has_value() ? std::min(*hi, u) : u;
    }
    Rat lo_r = std::max(Rat(0), lo.value_or(Rat(0)));
    Rat hi_r = std::max(lo_r, hi.value_or(lo_r));
    tr.estimate = Interval::from_rat_endpoints(lo_r, hi_r, 64);
  }
  return tr;
}

// ---- worst-box exponent: per-t bisection for the critical gamma ----

struct UniformOptions {
  size_t shape_budget = 200;
  size_t refine_steps = 20;
  Rat gamma_cap = Rat(4);
  Rat gamma_tol = Rat(1, 64);
  unsigned threads = 1;
  uint64_t seed = 0;
  bool use_dichotomy_seeds = true;
  EnumOptions enum_opt = {};
};

namespace detail {

// random shape: one coordinate pinned at 1, the rest dyadic in [-2, 15/16]
inline std::optional<ShapeVector> random_shape(std::mt19937_64& rng, size_t d,
                                               size_t pin) {
  std::vector<Rat> a(d);
  for (size_t i = 0; i < d; ++i) {
    if (i == pin % d) {
      a[i] = 1;
      continue;
    }
    long r = static_cast<long>(rng() % 48) - 32;  // [-32, 15] sixteenths
    a[i] = Rat(r, 16);
  }
  try {
    return ShapeVector(std::move(a));
  } catch (const InfeasibleShape&) {
    return std::nullopt;
  }
}

inline std::optional<ShapeVector> perturb_shape(const ShapeVector& s,
                                                std::mt19937_64& rng) {
  std::vector<Rat> a = s.a;
  size_t i = rng() % a.size();
  long r = static_cast<long>(rng() % 5) - 2;
  a[i] = std::min(Rat(1), std::max(Rat(-2), a[i] + Rat(r, 16)));
  try {
    return ShapeVector(std::move(a));
  } catch (const InfeasibleShape&) {
    return std::nullopt;
  }
}

// shape direction of a box with weights t^{a_i}: a_i = log w_i / log t, rescaled
inline std::optional<ShapeVector> shape_of_box(const std::vector<Rat>& box_w) {
  Rat sup = box_sup_norm(box_w);
  if (sup <= 1) return std::nullopt;
  double lt = std::log(Interval::from_rat(sup, 64).mid_d());
  std::vector<Rat> a(box_w.size());
  Rat amax(-1000);
  for (size_t i = 0; i < box_w.size(); ++i) {
    double ai = std::log(Interval::from_rat(box_w[i], 64).mid_d()) / lt;
    if (!std::isfinite(ai)) return std::nullopt;
    a[i] = rat_round_dyadic(Rat(std::min(1.0, std::max(-8.0, ai))), 4);
    amax = std::max(amax, a[i]);
  }
  if (amax <= 0) return std::nullopt;
  for (auto& q : a) q /= amax;
  try {
    return ShapeVector(std::move(a));
  } catch (const InfeasibleShape&) {
    return std::nullopt;
  }
}

// look for one certified-empty box at (t, gamma); returns its exact weights
template <class S>
inline std::optional<std::vector<Rat>> probe_empty_box(
    const Lattice<S>& l, const Rat& t, const Rat& gamma,
    const std::vector<ShapeVector>& seeds, const UniformOptions& uopt,
    uint64_t salt) {
  std::mt19937_64 rng(mix64(uopt.seed ^ salt));
  Interval ti = Interval::from_rat(t, 192);
  EnumOptions popt = uopt.enum_opt;
  popt.stop_after_first = true;

  std::optional<ShapeVector> closest;  // inhabited shape that took the most nodes
  size_t closest_nodes = 0;
  // allow exponents down to -(2 cap + 2): d = 2 boxes need 2 gamma + 1
  Rat exp_cap = 2 * uopt.gamma_cap + 2;
  auto try_shape = [&](const ShapeVector& s) -> std::optional<std::vector<Rat>> {
    Weights w;
    try {
      w = from_t_gamma_shape(ti, gamma, s, 192, exp_cap);
    } catch (const InfeasibleShape&) {
      return std::nullopt;
    }
    EnumerationResult r;
    try {
      r = enumerate_box(l, w, popt);
    } catch (const BudgetExceeded&) {
      return std::nullopt;
    }
    if (r.verdict == Verdict::Empty) {
      std::vector<Rat> exact(w.dim());
      for (size_t i = 0; i < w.dim(); ++i) exact[i] = w.lambda[i].hi_rat();
      return exact;
    }
    if (r.nodes >= closest_nodes) {
      closest_nodes = r.nodes;
      closest = s;
    }
    return std::nullopt;
  };

  for (const auto& s : seeds)
    if (auto hit = try_shape(s)) return hit;
  for (size_t k = 0; k < uopt.shape_budget; ++k) {
    auto s = random_shape(rng, l.dim, k);
    if (!s) continue;
    if (auto hit = try_shape(*s)) return hit;
  }
  for (size_t k = 0; closest.has_value() && k < uopt.refine_steps; ++k) {
    auto s = perturb_shape(*closest, rng);
    if (!s) continue;
    if (auto hit = try_shape(*s)) return hit;
  }
  return std::nullopt;
}

}  // namespace detail

template <class S>
inline ExponentTrace uniform_estimate(const Lattice<S>& l,
                                      const std::vector<Rat>& t_grid,
                                      UniformOptions uopt = {}) {
  ExponentTrace tr;
  tr.kind = ExponentKind::Uniform;

  std::vector<ShapeVector> seeds;
  if constexpr (is_exact_scalar_v<S>) {
    if (uopt.use_dichotomy_seeds) {
      try {
        auto dw = dichotomy_witness(l, Rat(1, 10), 40, uopt.enum_opt);
        if (dw.axis_point)
          tr.notes.push_back("axis point present: expect no empty boxes");
        else if (dw.certificate.has_value())
          if (auto s = detail::shape_of_box(dw.certificate->box_weights))
            seeds.push_back(std::move(*s));
      } catch (const AxisPointPresent&) {
        tr.notes.push_back("axis point present: expect no empty boxes");
      } catch (const GridExhausted&) {
      } catch (const PrecisionExhausted&) {
      }
    }
  }

  std::vector<Rat> ts;
  for (const Rat& t : t_grid) {
    if (t > 1)
      ts.push_back(t);
    else
      tr.notes.push_back("grid entry " + rat_to_string(t) + " needs t > 1");
  }

  struct Slot {
    TraceEntry entry;
    bool found = false;
    std::string note;
  };
  std::vector<Slot> slots(ts.size());

  auto work = [&](size_t i) {
    const Rat& t = ts[i];
    Slot& sl = slots[i];
    sl.entry.t = t;
    try {
      uint64_t salt = detail::mix64(i * 2654435761u + 1);
      auto cap_hit = detail::probe_empty_box(l, t, uopt.gamma_cap, seeds, uopt, salt);
      if (!cap_hit.has_value()) {
        sl.entry.lower = Interval::from_rat(uopt.gamma_cap, 64);
        sl.entry.witness = "all sampled boxes inhabited at the cap";
        return;
      }
      Rat lo(0), hi = uopt.gamma_cap;
      std::vector<Rat> wit = std::move(*cap_hit);
      unsigned depth = 0;
      while (hi - lo > uopt.gamma_tol) {
        Rat mid = (lo + hi) / 2;
        auto hit = detail::probe_empty_box(l, t, mid, seeds, uopt,
                                           salt ^ detail::mix64(++depth));
        if (hit.has_value()) {
          hi = mid;
          wit = std::move(*hit);
        } else {
          lo = mid;
        }
      }
      sl.found = true;
      sl.entry.lower = Interval::from_rat(lo, 64);
      sl.entry.upper = Interval::from_rat(hi, 64);
      sl.entry.witness = detail::format_box(wit);
    } catch (const BudgetExceeded& e) {
      sl.note = "t=" + rat_to_string(t) + " search budget exceeded: " + std::string(e.what());
      sl.entry.witness = "search budget exceeded";
    } catch (const PrecisionExhausted& e) {
      sl.note = "t=" + rat_to_string(t) + " precision exhausted: " + std::string(e.what());
      sl.entry.witness = "precision exhausted";
    }
  };

  unsigned nthreads = std::max(1u, uopt.threads);
  if (nthreads == 1 || ts.size() <= 1) {
    for (size_t i = 0; i < ts.size(); ++i) work(i);
  } else {
    std::vector<std::exception_ptr> errs(ts.size());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nthreads; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = w; i < ts.size(); i += nthreads) {
          try {
            work(i);
          } catch (...) {
            errs[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  bool any_found = false;
  for (auto& sl : slots) {
    if (!sl.note.empty()) tr.notes.push_back(sl.note);
    any_found = any_found || sl.found;
    tr.entries.push_back(std::move(sl.entry));
  }

  if (!any_found) {
    tr.unbounded_suspected = true;
    return tr;
  }
  size_t tail = tr.entries.size() / 2;
  std::optional<Rat> lo, hi;
  for (size_t i = tail; i < tr.entries.size(); ++i) {
    const TraceEntry& e = tr.entries[i];
    if (e.lower.has_value()) {
      Rat v = std::max(Rat(0), e.lower->lo_rat());
      lo = lo.has_value() ? std::min(*lo, v) : v;
    }
    if (e.upper.has_value()) {
      Rat v = e.upper->hi_rat();
      hi = hi.has_value() ? std::min(*hi, v) : v;
    }
  }
  Rat hi_r = hi.value_or(uopt.gamma_cap);
  Rat lo_r = std::min(std::max(Rat(0), lo.value_or(Rat(0))), hi_r);
  tr.estimate = Interval::from_rat_endpoints(lo_r, hi_r, 64);
  return tr;
}

// ---- multiplicative pair over an approximation matrix ----

template <class S>
struct ThetaMatrix {
  Mat<S> rows;  // n rows, m columns
  size_t n() const { return mat_rows(rows); }
  size_t m() const { return rows.empty() ? 0 : rows[0].size(); }
};

struct MultOptions {
  size_t grid_size = 16;
  size_t top_k = 8;
  unsigned prec = 192;
  size_t max_candidates = 200000000;  // odometer budget guard (leaf visits)
};

namespace detail {

struct MultCandidate {
  double key;  // prescan product of residual magnitudes
  std::vector<long> x;
};

// nearest integer with ties toward the lower integer: v - y in (-1/2, 1/2]
inline Int nearest_int_tie_low(const Rat& v) {
  return rat_ceil(v - Rat(1, 2));
}

template <class S>
inline Int nearest_int_tie_low_scalar(const S& v) {
  if constexpr (std::is_same_v<S, Rat>) {
    return nearest_int_tie_low(v);
  } else if constexpr (std::is_same_v<S, NfReal>) {
    unsigned pr = 128;
    while (true) {
      Interval iv = v.to_interval(pr);
      Int lo = (iv - Interval::from_rat(Rat(1, 2), pr)).ceil_of_lo();
      Int hi = (iv + Interval::from_rat(Rat(1, 2), pr)).floor_of_hi();
      if (lo == hi) return lo;
      if (hi - lo == 1) {
        // straddling a tie: v - lo = 1/2 exactly picks the lower integer
        S diff = v - S::from_rat(v.field(), Rat(lo) + Rat(1, 2), v.root_index());
        int sg = diff.exact_sign();
        return sg <= 0 ? lo : hi;
      }
      if (pr >= 4096) throw PrecisionExhausted("nearest integer undecidable", pr);
      pr *= 2;
    }
  } else {
    static_assert(std::is_same_v<S, Rat> || std::is_same_v<S, NfReal>,
                  "nearest integer needs an exact scalar");
    return Int(0);
  }
}

}  // namespace detail

// Enumerate x in Z^m with prod max(1,|x_j|) <= budget, first nonzero coordinate
// positive; hand each leaf to sink(x, P).
inline void scan_primitive_box(size_t m, const Int& budget,
                               const std::function<void(const std::vector<long>&, long)>& sink,
                               size_t max_leaves) {
  long b = budget.convert_to<long>();
  std::vector<long> x(m, 0);
  size_t leaves = 0;
  auto rec = [&](auto&& self, size_t j, long rem, bool lead_zero) -> void {
    if (j == m) {
      if (lead_zero) return;  // the zero vector
      if (++leaves > max_leaves) throw BudgetExceeded("candidate scan budget");
      long p = 1;
      for (long v : x) p *= std::max(1l, std::labs(v));
      sink(x, p);
      return;
    }
    long lo = lead_zero ? 0 : -rem;  // first nonzero coordinate positive
    for (long v = lo; v <= rem; ++v) {
      x[j] = v;
      long nrem = rem / std::max(1l, std::labs(v));
      self(self, j + 1, nrem, lead_zero && v == 0);
    }
    x[j] = 0;
  };
  rec(rec, 0, b, true);
}

namespace detail {

inline std::string format_x(const std::vector<long>& x) {
  std::ostringstream os;
  os << "x=(";
  for (size_t j = 0; j < x.size(); ++j) os << (j ? "," : "") << x[j];
  os << ")";
  return os.str();
}

struct MultScan {
  std::vector<std::vector<MultCandidate>> cand;  // per bucket, ascending prescan key
  std::vector<std::vector<long>> zero_suspects;
};

// double prescan keeping the top_k smallest residual products per bucket
template <class S>
inline MultScan mult_prescan(const ThetaMatrix<S>& theta, const std::vector<long>& bounds,
                             const Int& budget, const MultOptions& mopt) {
  size_t m = theta.m(), n = theta.n();
  std::vector<std::vector<double>> th(n, std::vector<double>(m));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) th[i][j] = to_interval(theta.rows[i][j], 64).mid_d();

  MultScan scan;
  scan.cand.resize(bounds.size());
  auto sink = [&](const std::vector<long>& x, long p) {
    double prod = 1;
    for (size_t i = 0; i < n; ++i) {
      double v = 0;
      for (size_t j = 0; j < m; ++j) v += th[i][j] * x[j];
      prod *= std::abs(v - std::ceil(v - 0.5));
    }
    if (prod < 1e-12 && scan.zero_suspects.size() < 64) scan.zero_suspects.push_back(x);
    if (p < 2) return;  // the exponent needs prod max(1,|x_j|) > 1
    size_t b = 0;
    while (b < bounds.size() && bounds[b] < p) ++b;
    if (b == bounds.size()) return;
    auto& heap = scan.cand[b];
    if (heap.size() == mopt.top_k && prod >= heap.back().key) return;
    MultCandidate c{prod, x};
    heap.insert(std::upper_bound(heap.begin(), heap.end(), c,
                                 [](const auto& a, const auto& bb) { return a.key < bb.key; }),
                std::move(c));
    if (heap.size() > mopt.top_k) heap.pop_back();
  };
  scan_primitive_box(m, budget, sink, mopt.max_candidates);
  return scan;
}

// log of the certified residual product at x; bool flags an exactly integral image
template <class S>
inline std::optional<std::pair<Interval, bool>> mult_residual_logprod(
    const ThetaMatrix<S>& theta, const std::vector<long>& x, unsigned prec) {
  size_t m = theta.m(), n = theta.n();
  Interval prod = Interval::one(prec);
  for (size_t i = 0; i < n; ++i) {
    if constexpr (is_exact_scalar_v<S>) {
      S v = make_zero_like(theta.rows[i][0]);
      for (size_t j = 0; j < m; ++j) {
        if (x[j] == 0) continue;
        v = v + theta.rows[i][j] * scalar_from_rat_like(theta.rows[i][0], Rat(x[j]));
      }
      Int y = nearest_int_tie_low_scalar(v);
      S w = v - scalar_from_rat_like(theta.rows[i][0], Rat(y));
      if (scalar_is_zero(w)) return std::make_pair(Interval::zero(64), true);
      prod *= abs_i(to_interval(w, prec));
    } else {
      Interval v = Interval::zero(prec);
      for (size_t j = 0; j < m; ++j) {
        if (x[j] == 0) continue;
        v += to_interval(theta.rows[i][j], prec) * Interval::from_long(x[j], prec);
      }
      Int y = (v + Interval::from_rat(Rat(1, 2), prec)).floor_of_hi();
      Interval w = v - Interval::from_int(y, prec);
      if (w.contains_zero()) return std::nullopt;  // sign not certifiable
      prod *= abs_i(w);
    }
  }
  return std::make_pair(log_i(prod), false);
}

inline long product_norm(const std::vector<long>& x) {
  long p = 1;
  for (long v : x) p *= std::max(1l, std::labs(v));
  return p;
}

}  // namespace detail

template <class S>
inline ExponentTrace mult_estimate(const ThetaMatrix<S>& theta, const Rat& t_max,
                                   MultOptions mopt = {}) {
  size_t m = theta.m(), n = theta.n();
  if (m < 1 || n < 1) throw DimensionMismatch("approximation matrix needs m, n >= 1");
  if (t_max < 2) throw DomainViolation("horizon must be at least 2");

  std::vector<Rat> grid = make_t_grid(Rat(2), t_max, true, mopt.grid_size);
  std::vector<long> bounds(grid.size());
  for (size_t b = 0; b < grid.size(); ++b)
    bounds[b] = rat_floor(rat_pow(grid[b], static_cast<long>(m))).convert_to<long>();
  detail::MultScan scan = detail::mult_prescan(theta, bounds,
                                               rat_floor(rat_pow(t_max, static_cast<long>(m))),
                                               mopt);

  ExponentTrace tr;
  tr.kind = ExponentKind::Mult;

  auto flag_zero = [&](const std::vector<long>& x) {
    if (tr.unbounded_suspected) return;
    tr.unbounded_suspected = true;
    tr.notes.push_back(detail::format_x(x) + " has an exactly integral image");
  };
  for (const auto& x : scan.zero_suspects) {
    auto r = detail::mult_residual_logprod(theta, x, mopt.prec);
    if (r.has_value() && r->second) flag_zero(x);
  }

  Interval mi = Interval::from_long(static_cast<long>(m), mopt.prec);
  Interval ni = Interval::from_long(static_cast<long>(n), mopt.prec);
  std::optional<Interval> running;  // max per-point exponent so far
  std::string running_wit;
  std::optional<Interval> min_logprod;
  std::string min_wit;
  for (size_t b = 0; b < grid.size(); ++b) {
    for (const auto& c : scan.cand[b]) {
      auto r = detail::mult_residual_logprod(theta, c.x, mopt.prec);
      if (!r.has_value()) {
        tr.notes.push_back(detail::format_x(c.x) + " residual sign undecided");
        continue;
      }
      if (r->second) {
        flag_zero(c.x);
        continue;
      }
      long p = detail::product_norm(c.x);
      Interval g = mi * (-r->first) /
                   (ni * log_i(Interval::from_long(p, mopt.prec)));
      if (!running.has_value() || g.lo_rat() > running->lo_rat()) {
        running = g;
        running_wit = detail::format_x(c.x);
      }
      if (!min_logprod.has_value() || r->first.lo_rat() < min_logprod->lo_rat()) {
        min_logprod = r->first;
        min_wit = detail::format_x(c.x);
      }
    }
    TraceEntry e;
    e.t = grid[b];
    e.lower = running;
    e.witness = running_wit;
    tr.entries.push_back(std::move(e));
  }

  // limit proxy: the best residual product stretched over the full horizon,
  // -log(min prod)/(n log T); per-point maxima overweight tiny x.
  if (min_logprod.has_value()) {
    Interval est = -(*min_logprod) /
                   (ni * log_i(Interval::from_rat(t_max, mopt.prec)));
    Rat lo = std::max(Rat(0), est.lo_rat());
    Rat hi = std::max(lo, est.hi_rat());
    tr.estimate = Interval::from_rat_endpoints(lo, hi, 64);
    tr.notes.push_back("estimate witness " + min_wit);
  }
  return tr;
}

template <class S>
inline ExponentTrace mult_uniform_estimate(const ThetaMatrix<S>& theta,
                                           const std::vector<Rat>& t_grid,
                                           const Rat& t_max, MultOptions mopt = {}) {
  size_t m = theta.m(), n = theta.n();
  if (m < 1 || n < 1) throw DimensionMismatch("approximation matrix needs m, n >= 1");
  if (t_max < 2) throw DomainViolation("horizon must be at least 2");

  std::vector<Rat> grid;
  ExponentTrace tr;
  tr.kind = ExponentKind::MultUniform;
  for (const Rat& t : t_grid) {
    if (t > 1 && t <= t_max)
      grid.push_back(t);
    else
      tr.notes.push_back("grid entry " + rat_to_string(t) + " outside (1, horizon]");
  }
  std::vector<long> bounds(grid.size());
  for (size_t b = 0; b < grid.size(); ++b)
    bounds[b] = rat_floor(rat_pow(grid[b], static_cast<long>(m))).convert_to<long>();
  detail::MultScan scan = detail::mult_prescan(theta, bounds,
                                               rat_floor(rat_pow(t_max, static_cast<long>(m))),
                                               mopt);

  auto flag_zero = [&](const std::vector<long>& x) {
    if (tr.unbounded_suspected) return;
    tr.unbounded_suspected = true;
    tr.notes.push_back(detail::format_x(x) + " has an exactly integral image");
  };
  for (const auto& x : scan.zero_suspects) {
    auto r = detail::mult_residual_logprod(theta, x, mopt.prec);
    if (r.has_value() && r->second) flag_zero(x);
  }

  Interval ni = Interval::from_long(static_cast<long>(n), mopt.prec);
  std::optional<Interval> min_logprod;  // phi(t) is attained by the smallest product
  std::vector<long> min_x;
  for (size_t b = 0; b < grid.size(); ++b) {
    for (const auto& c : scan.cand[b]) {
      auto r = detail::mult_residual_logprod(theta, c.x, mopt.prec);
      if (!r.has_value()) {
        tr.notes.push_back(detail::format_x(c.x) + " residual sign undecided");
        continue;
      }
      if (r->second) {
        flag_zero(c.x);
        continue;
      }
      if (!min_logprod.has_value() || r->first.lo_rat() < min_logprod->lo_rat()) {
        min_logprod = r->first;
        min_x = c.x;
      }
    }
    TraceEntry e;
    e.t = grid[b];
    if (min_logprod.has_value()) {
      e.lower = -(*min_logprod) / (ni * log_i(Interval::from_rat(grid[b], mopt.prec)));
      e.witness = detail::format_x(min_x);
    }
    tr.entries.push_back(std::move(e));
  }

  if (!tr.entries.empty()) {
    size_t tail = tr.entries.size() / 2;
    std::optional<Rat> lo, hi;
    for (size_t i = tail; i < tr.entries.size(); ++i) {
      if (!tr.entries[i].lower.has_value()) continue;
      Rat v = tr.entries[i].lower->lo_rat();
      Rat u = tr.entries[i].lower->hi_rat();
      lo = lo.has_value() ? std::min(*lo, v) : v;
      hi = hi.has_value() ? std::min(*hi, u) : u;
    }
    if (lo.has_value()) {
      Rat lo_r = std::max(Rat(0), *lo);
      Rat hi_r = std::max(lo_r, *hi);
      tr.estimate = Interval::from_rat_endpoints(lo_r, hi_r, 64);
    }
  }
  return tr;
}

// ---- continued-fraction oracle for the 2-dimensional case ----

struct ContinuedFraction {
  std::vector<Int> a;           // a_0; a_1, a_2, ... with a_k >= 1 for k >= 1
  bool exact_rational = false;  // the listed quotients are the complete expansion
};

inline ContinuedFraction cf_from_rational(Rat alpha, size_t max_terms = 64) {
  ContinuedFraction cf;
  cf.exact_rational = true;
  for (size_t k = 0; k < max_terms; ++k) {
    Int fl = rat_floor(alpha);
    cf.a.push_back(fl);
    Rat frac = alpha - Rat(fl);
    if (frac == 0) return cf;
    alpha = 1 / frac;
  }
  throw BudgetExceeded("continued fraction expansion did not terminate");
}

struct CfOracleResult {
  std::vector<Int> p, q;                       // convergents p_k / q_k
  std::vector<std::optional<Interval>> gamma;  // defined where q_k >= 2 and a bracket exists
  std::optional<Interval> omega_estimate;      // max of the defined gammas
  bool unbounded = false;                      // expansion terminates: exact zero error
};

inline CfOracleResult cf_oracle_2d(const ContinuedFraction& cf, size_t K) {
  if (cf.a.empty()) throw DomainViolation("empty continued fraction");
  for (size_t k = 1; k < cf.a.size(); ++k)
    if (cf.a[k] < 1) throw DomainViolation("partial quotients must be >= 1 past a_0");

  size_t last = std::min(K, cf.a.size() - 1);
  CfOracleResult out;
  Int pm1(1), qm1(0), pm2(0), qm2(1);  // p_{-1}=1, q_{-1}=0, p_{-2}=0, q_{-2}=1
  for (size_t k = 0; k <= last; ++k) {
    Int pk = cf.a[k] * pm1 + pm2;
    Int qk = cf.a[k] * qm1 + qm2;
    out.p.push_back(pk);
    out.q.push_back(qk);
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pk;
    qm1 = qk;
  }
  out.gamma.assign(out.p.size(), std::nullopt);

  std::optional<Rat> alpha;
  if (cf.exact_rational && last + 1 == cf.a.size()) {
    alpha = Rat(out.p.back()) / Rat(out.q.back());
    out.unbounded = true;  // the final convergent error is exactly zero
  }

  std::optional<Rat> best_lo, best_hi;
  for (size_t k = 0; k + 1 <= last; ++k) {
    const Int& qk = out.q[k];
    if (qk < 2) continue;
    Rat err_lo, err_hi;
    if (alpha.has_value()) {
      Rat err = rat_abs(Rat(qk) * (*alpha) - Rat(out.p[k]));
      if (err == 0) continue;
      err_lo = err_hi = err;
    } else {
      // |q_k alpha - p_k| lies between 1/(q_{k+1}+q_k) and 1/q_{k+1} for any tail
      err_lo = Rat(1) / Rat(out.q[k + 1] + qk);
      err_hi = Rat(1) / Rat(out.q[k + 1]);
    }
    Interval err = Interval::from_rat_endpoints(err_lo, err_hi, 192);
    Interval qi = Interval::from_int(qk, 192);
    Interval g = -log_i(qi * err) / (Interval::from_long(2, 192) * log_i(qi));
    out.gamma[k] = g;
    Rat glo = g.lo_rat(), ghi = g.hi_rat();
    best_lo = best_lo.has_value() ? std::max(*best_lo, glo) : glo;
    best_hi = best_hi.has_value() ? std::max(*best_hi, ghi) : ghi;
  }
  if (best_lo.has_value())
    out.omega_estimate = Interval::from_rat_endpoints(*best_lo, *best_hi, 64);
  return out;
}

}  // namespace latlab
