#pragma once

// Lattice and subspace types. Bases are square row matrices over one of the three
// scalar kinds. Number-field lattices either use one embedding everywhere or the
// column-per-embedding layout produced by the norm-form construction (column j
// evaluated at real root j).

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "latlab/boxes.hpp"
#include "latlab/errors.hpp"
#include "latlab/interval.hpp"
#include "latlab/linalg.hpp"
#include "latlab/numberfield.hpp"
#include "latlab/scalar.hpp"

namespace latlab {

template <class S>
struct Lattice {
  size_t dim = 0;
  Mat<S> basis;  // rows are basis vectors
  Interval det_abs;
  unsigned det_prec = kDefaultPrec;
  MinPolyPtr field;                // NfReal lattices only
  int root = -1;                   // uniform embedding; -1 when columns differ
  bool algebraic_columns = false;  // column j uses real root j
  std::optional<Mat<Int>> transform_from_original;

  ScalarKind kind() const { return scalar_traits<S>::kind; }
};

using AnyLattice = std::variant<Lattice<Rat>, Lattice<NfReal>, Lattice<Interval>>;

struct LatticePoint {
  Vec<Int> u;                // coefficients on the basis rows
  std::vector<Interval> z;   // coordinates u * basis

  friend bool operator<(const LatticePoint& a, const LatticePoint& b) { return a.u < b.u; }
  friend bool operator==(const LatticePoint& a, const LatticePoint& b) { return a.u == b.u; }
};

template <class S>
struct Subspace {
  size_t ambient_dim = 0;
  Mat<S> basis;     // p x d rows, lattice vectors spanning the subspace
  Mat<Int> coeffs;  // p x d integer rows with basis = coeffs * lattice.basis

  size_t rank() const { return basis.size(); }
};

// ---- coordinate evaluation ----

template <class S>
inline std::vector<Interval> lattice_coords_iv(const Lattice<S>& l, const Vec<Int>& u,
                                               unsigned prec) {
  if (u.size() != l.dim) throw DimensionMismatch("coefficient vector length");
  std::vector<Interval> z(l.dim, Interval::zero(prec));
  for (size_t k = 0; k < l.dim; ++k) {
    if (u[k] == 0) continue;
    Interval f = Interval::from_int(u[k], prec);
    for (size_t j = 0; j < l.dim; ++j) z[j] += f * to_interval(l.basis[k][j], prec);
  }
  return z;
}

// Exact coordinates; works for the mixed-embedding layout too because each
// column stays inside one embedding.
template <class S>
inline Vec<S> lattice_coords_exact(const Lattice<S>& l, const Vec<Int>& u) {
  static_assert(is_exact_scalar_v<S>);
  return vec_mat_mul_int(u, l.basis);
}

template <class S>
inline LatticePoint make_point(const Lattice<S>& l, Vec<Int> u, unsigned prec) {
  LatticePoint p;
  p.z = lattice_coords_iv(l, u, prec);
  p.u = std::move(u);
  return p;
}

// ---- construction ----

namespace detail {

inline void check_square(size_t rows, size_t cols) {
  if (rows == 0 || rows != cols) throw DimensionMismatch("lattice basis must be square");
}

template <class S>
inline Interval lattice_det_abs(const Lattice<S>& l, unsigned prec);

template <>
inline Interval lattice_det_abs<Rat>(const Lattice<Rat>& l, unsigned prec) {
  Rat d = exact_det(l.basis);
  if (d == 0) throw SingularBasis("rational basis is singular");
  return Interval::from_rat(rat_abs(d), prec);
}

template <>
inline Interval lattice_det_abs<NfReal>(const Lattice<NfReal>& l, unsigned prec) {
  if (l.algebraic_columns) {
    // power-basis embedding matrix: |det| = sqrt(|disc|), and any later unimodular
    // transform keeps it
    Rat disc = l.field->discriminant();
    if (disc == 0) throw SingularBasis("degenerate discriminant");
    return sqrt_i(Interval::from_rat(rat_abs(disc), prec + 32)).with_precision(prec);
  }
  NfReal d = exact_det(l.basis);
  int s = d.exact_sign();
  if (s == 0) throw SingularBasis("field basis is singular");
  Interval di = d.to_interval(prec);
  return s > 0 ? di : -di;
}

template <>
inline Interval lattice_det_abs<Interval>(const Lattice<Interval>& l, unsigned prec) {
  Mat<Interval> b(l.dim, Vec<Interval>(l.dim, Interval::zero(prec)));
  for (size_t i = 0; i < l.dim; ++i)
    for (size_t j = 0; j < l.dim; ++j) b[i][j] = l.basis[i][j].with_precision(prec);
  auto d = det_iv(b);
  if (!d.has_value() || d->contains_zero())
    throw SingularBasis("cannot certify the floating basis as nonsingular");
  return abs_i(*d);
}

}  // namespace detail

template <class S>
inline Lattice<S> lattice_from_basis(Mat<S> basis, unsigned prec = kDefaultPrec) {
  check_rectangular(basis);
  detail::check_square(mat_rows(basis), mat_cols(basis));
  Lattice<S> l;
  l.dim = mat_rows(basis);
  l.basis = std::move(basis);
  l.det_prec = prec;

  if constexpr (std::is_same_v<S, NfReal>) {
    l.field = l.basis[0][0].field();
    for (const auto& row : l.basis)
      for (const auto& e : row)
        if (!same_field(e.field(), l.field))
          throw UnsupportedScalarKind("mixed number fields in one basis");
    bool uniform = true;
    int r0 = l.basis[0][0].root_index();
    for (const auto& row : l.basis)
      for (const auto& e : row)
        if (e.root_index() != r0) uniform = false;
    if (uniform) {
      l.root = r0;
    } else {
      bool columnwise = true;
      for (const auto& row : l.basis)
        for (size_t j = 0; j < l.dim; ++j)
          if (row[j].root_index() != static_cast<int>(j)) columnwise = false;
      if (!columnwise)
        throw UnsupportedScalarKind(
            "embedding indices must be uniform or the column-per-root layout");
      if (l.field->degree() != l.dim)
        throw DimensionMismatch("column-per-root layout needs degree = dimension");
      l.algebraic_columns = true;
    }
  }

  l.det_abs = detail::lattice_det_abs<S>(l, prec);
  return l;
}

// LLL on the midpoints; exact kinds recompute the basis exactly through the
// integer transform, so reduction never loses certification.
template <class S>
inline Lattice<S> reduce_basis(const Lattice<S>& l, unsigned prec = kDefaultPrec) {
  std::vector<std::vector<double>> rows(l.dim, std::vector<double>(l.dim));
  for (size_t i = 0; i < l.dim; ++i)
    for (size_t j = 0; j < l.dim; ++j) rows[i][j] = to_interval(l.basis[i][j], prec).mid_d();
  Mat<Int> t = lll_transform(rows);
  Lattice<S> r = l;
  r.basis = mat_mul_int(t, l.basis);
  if (l.transform_from_original.has_value()) {
    Mat<Int> composed(mat_rows(t), Vec<Int>(l.dim, Int(0)));
    for (size_t i = 0; i < mat_rows(t); ++i)
      for (size_t k = 0; k < l.dim; ++k)
        for (size_t j = 0; j < l.dim; ++j)
          composed[i][j] += t[i][k] * (*l.transform_from_original)[k][j];
    r.transform_from_original = std::move(composed);
  } else {
    r.transform_from_original = t;
  }
  r.det_abs = detail::lattice_det_abs<S>(r, prec);
  r.det_prec = prec;
  return r;
}

// ---- minimal rational subspace ----

namespace detail {

// Integer matrix with the same left kernel: scale each column by its lcm of
// denominators.
inline Mat<Int> clear_denominators_columns(const Mat<Rat>& a) {
  size_t m = mat_rows(a), n = mat_cols(a);
  Mat<Int> r(m, Vec<Int>(n, Int(0)));
  for (size_t j = 0; j < n; ++j) {
    Int lcm(1);
    for (size_t i = 0; i < m; ++i) {
      Int d = rat_den(a[i][j]);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    for (size_t i = 0; i < m; ++i) r[i][j] = rat_num(a[i][j] * Rat(lcm));
  }
  return r;
}

inline std::vector<std::string> u_to_decimal(const Vec<Int>& u) {
  std::vector<std::string> s;
  for (const auto& x : u) s.push_back(x.str());
  return s;
}

}  // namespace detail

// Smallest rational subspace that contains the first coordinate axis and is
// spanned by lattice vectors. Throws AxisPointPresent when the axis itself
// carries a nonzero lattice point (the unbounded branch of the dichotomy).
template <class S>
inline Subspace<S> minimal_rational_subspace(const Lattice<S>& l) {
  static_assert(is_exact_scalar_v<S>, "rational-span questions need an exact scalar kind");
  size_t d = l.dim;
  if (d < 2) throw DimensionMismatch("subspace search needs dimension >= 2");

  if constexpr (std::is_same_v<S, NfReal>) {
    if (l.algebraic_columns) {
      // Norm-form layout: coordinates are the full conjugate vector, so a point on
      // one axis would have norm 0; and the coefficient expansion of e_1 * B^-1
      // spans all of Q^d (triangular Horner prefixes). Hence p = d.
      Subspace<S> s;
      s.ambient_dim = d;
      s.basis = l.basis;
      s.coeffs = int_identity(d);
      return s;
    }
  }

  size_t deg = 1;
  if constexpr (std::is_same_v<S, NfReal>) deg = l.field->degree();

  // 1. axis test: integer kernel of the rational constraints (u*B)_i = 0, i >= 2
  Mat<Rat> constraints(d, Vec<Rat>((d - 1) * deg, Rat(0)));
  for (size_t j = 0; j < d; ++j)
    for (size_t i = 1; i < d; ++i) {
      auto coords = rational_coords(l.basis[j][i]);
      for (size_t k = 0; k < deg; ++k) constraints[j][(i - 1) * deg + k] = coords[k];
    }
  Mat<Int> kern = int_left_kernel(detail::clear_denominators_columns(constraints));
  if (!kern.empty()) {
    Vec<Int> u = kern[0];
    for (const auto& x : u) {
      if (x == 0) continue;
      if (x < 0)
        for (auto& y : u) y = -y;
      break;
    }
    throw AxisPointPresent("nonzero lattice point on the first coordinate axis",
                           detail::u_to_decimal(u));
  }

  // 2. c * B = e_1 over the field
  Vec<S> e1(d, make_zero_like(l.basis[0][0]));
  e1[0] = scalar_from_rat_like(l.basis[0][0], Rat(1));
  Vec<S> c = solve_left(l.basis, e1);

  // 3. rational span of the coefficient slices of c
  Mat<Rat> slices(deg, Vec<Rat>(d, Rat(0)));
  for (size_t j = 0; j < d; ++j) {
    auto coords = rational_coords(c[j]);
    for (size_t k = 0; k < deg; ++k) slices[k][j] = coords[k];
  }
  Mat<Int> sub = saturate_rowspace(slices);
  if (sub.empty()) throw InternalError("empty span for e_1 * B^-1");

  Subspace<S> s;
  s.ambient_dim = d;
  s.coeffs = sub;
  s.basis = mat_mul_int(sub, l.basis);
  return s;
}

// Coordinate subsets of size rank containing coordinate 0, ranked by |minor| of
// the subspace basis; exact comparisons, lexicographically smallest tie wins.
template <class S>
inline std::vector<size_t> best_coordinate_subset(const Subspace<S>& s) {
  static_assert(is_exact_scalar_v<S>);
  size_t p = s.rank(), d = s.ambient_dim;
  if (p == 0 || p > d) throw DimensionMismatch("bad subspace rank");

  std::vector<size_t> best;
  std::optional<S> best_abs;

  // iterate over combinations of {1..d-1} of size p-1, prepending coordinate 0
  std::vector<size_t> comb(p > 0 ? p - 1 : 0);
  for (size_t i = 0; i < comb.size(); ++i) comb[i] = i + 1;

  auto consider = [&](const std::vector<size_t>& cols) {
    Mat<S> minor(p, Vec<S>(p, make_zero_like(s.basis[0][0])));
    for (size_t i = 0; i < p; ++i)
      for (size_t j = 0; j < p; ++j) minor[i][j] = s.basis[i][cols[j]];
    S det = exact_det(minor);
    if (scalar_is_zero(det)) return;
    S a = scalar_sign(det) >= 0 ? det : -det;
    if (!best_abs.has_value()) {
      best_abs = a;
      best = cols;
      return;
    }
    int cmp_res;
    if constexpr (std::is_same_v<S, Rat>)
      cmp_res = a > *best_abs ? 1 : (a < *best_abs ? -1 : 0);
    else
      cmp_res = cmp(a, *best_abs);
    if (cmp_res > 0) {
      best_abs = a;
      best = cols;
    }
  };

  if (p == d) {
    std::vector<size_t> all(d);
    for (size_t i = 0; i < d; ++i) all[i] = i;
    consider(all);
  } else if (p == 1) {
    consider({0});
  } else {
    while (true) {
      std::vector<size_t> cols{0};
      cols.insert(cols.end(), comb.begin(), comb.end());
      consider(cols);
      // next combination
      size_t i = comb.size();
      while (i > 0) {
        --i;
        if (comb[i] < d - (comb.size() - i)) {
          ++comb[i];
          for (size_t k = i + 1; k < comb.size(); ++k) comb[k] = comb[k - 1] + 1;
          break;
        }
        if (i == 0) {
          comb.clear();
          break;
        }
      }
      if (comb.empty()) break;
    }
  }

  if (best.empty())
    throw InternalError("no nonsingular coordinate minor containing coordinate 0");
  return best;
}

// Rank-p lattice obtained by restricting the subspace basis to the chosen
// coordinates (the orthogonal projection onto that coordinate plane).
template <class S>
inline Lattice<S> project_sublattice(const Subspace<S>& s, const std::vector<size_t>& cols,
                                     unsigned prec = kDefaultPrec) {
  static_assert(is_exact_scalar_v<S>);
  size_t p = s.rank();
  if (cols.size() != p) throw DimensionMismatch("coordinate subset size must equal rank");
  Mat<S> b(p, Vec<S>(p, make_zero_like(s.basis[0][0])));
  for (size_t i = 0; i < p; ++i)
    for (size_t j = 0; j < p; ++j) b[i][j] = s.basis[i][cols[j]];
  S det = exact_det(b);
  if (scalar_is_zero(det))
    throw SingularMinor("chosen coordinate minor is singular");
  return lattice_from_basis(std::move(b), prec);
}

}  // namespace latlab
