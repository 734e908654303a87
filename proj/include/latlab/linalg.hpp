#pragma once

// Small dense linear algebra on row-major matrices. Exact routines (Gaussian
// elimination over a field scalar, Hermite forms and kernels over the integers,
// saturation, unimodular completion) plus the certified interval pieces used by
// enumeration (Gram, LDL^T, determinant) and a plain floating LLL that only ever
// produces a unimodular transform, never a truth claim.

#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "latlab/errors.hpp"
#include "latlab/interval.hpp"
#include "latlab/rational.hpp"
#include "latlab/scalar.hpp"

namespace latlab {

template <class S>
using Vec = std::vector<S>;
template <class S>
using Mat = std::vector<std::vector<S>>;

template <class S>
inline size_t mat_rows(const Mat<S>& a) {
  return a.size();
}
template <class S>
inline size_t mat_cols(const Mat<S>& a) {
  return a.empty() ? 0 : a[0].size();
}

template <class S>
inline void check_rectangular(const Mat<S>& a) {
  for (const auto& r : a)
    if (r.size() != mat_cols(a)) throw DimensionMismatch("ragged matrix");
}

inline Mat<Int> int_identity(size_t n) {
  Mat<Int> id(n, Vec<Int>(n, Int(0)));
  for (size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

template <class S>
inline Mat<S> transpose(const Mat<S>& a) {
  Mat<S> t(mat_cols(a), Vec<S>(mat_rows(a), a.empty() ? S() : make_zero_like(a[0][0])));
  for (size_t i = 0; i < mat_rows(a); ++i)
    for (size_t j = 0; j < mat_cols(a); ++j) t[j][i] = a[i][j];
  return t;
}

template <class S>
inline Mat<S> mat_mul(const Mat<S>& a, const Mat<S>& b) {
  if (mat_cols(a) != mat_rows(b)) throw DimensionMismatch("matrix product shape");
  Mat<S> r(mat_rows(a), Vec<S>(mat_cols(b), make_zero_like(a[0][0])));
  for (size_t i = 0; i < mat_rows(a); ++i)
    for (size_t k = 0; k < mat_cols(a); ++k)
      for (size_t j = 0; j < mat_cols(b); ++j) r[i][j] = r[i][j] + a[i][k] * b[k][j];
  return r;
}

// Integer transform applied to a scalar matrix: T (m x k) times B (k x n).
template <class S>
inline Mat<S> mat_mul_int(const Mat<Int>& t, const Mat<S>& b) {
  if (mat_cols(t) != mat_rows(b)) throw DimensionMismatch("transform/basis shape");
  // accumulators and factors are seeded columnwise so mixed-embedding layouts
  // (column j pinned to root j) never cross columns
  Vec<S> zrow;
  zrow.reserve(mat_cols(b));
  for (size_t j = 0; j < mat_cols(b); ++j) zrow.push_back(make_zero_like(b[0][j]));
  Mat<S> r(mat_rows(t), zrow);
  for (size_t i = 0; i < mat_rows(t); ++i)
    for (size_t k = 0; k < mat_cols(t); ++k) {
      if (t[i][k] == 0) continue;
      Rat f(t[i][k]);
      for (size_t j = 0; j < mat_cols(b); ++j)
        r[i][j] = r[i][j] + scalar_from_rat_like(b[k][j], f) * b[k][j];
    }
  return r;
}

// u (1 x k, integer) times B (k x n).
template <class S>
inline Vec<S> vec_mat_mul_int(const Vec<Int>& u, const Mat<S>& b) {
  if (u.size() != mat_rows(b)) throw DimensionMismatch("coefficient/basis shape");
  Vec<S> r;
  r.reserve(mat_cols(b));
  for (size_t j = 0; j < mat_cols(b); ++j) r.push_back(make_zero_like(b[0][j]));
  for (size_t k = 0; k < u.size(); ++k) {
    if (u[k] == 0) continue;
    Rat f(u[k]);
    for (size_t j = 0; j < mat_cols(b); ++j) r[j] = r[j] + scalar_from_rat_like(b[k][j], f) * b[k][j];
  }
  return r;
}

// Exact determinant over a field scalar (Rat or NfReal).
template <class S>
inline S exact_det(Mat<S> m) {
  static_assert(is_exact_scalar_v<S>);
  check_rectangular(m);
  size_t n = mat_rows(m);
  if (n != mat_cols(m)) throw DimensionMismatch("determinant of non-square matrix");
  if (n == 0) throw DimensionMismatch("determinant of empty matrix");
  S det = scalar_from_rat_like(m[0][0], Rat(1));
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && scalar_is_zero(m[piv][c])) ++piv;
    if (piv == n) return make_zero_like(m[0][0]);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det = det * m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (scalar_is_zero(m[r][c])) continue;
      S f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] = m[r][k] - f * m[c][k];
    }
  }
  return det;
}

template <class S>
inline size_t exact_rank(Mat<S> m) {
  static_assert(is_exact_scalar_v<S>);
  check_rectangular(m);
  size_t rows = mat_rows(m), cols = mat_cols(m), r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && scalar_is_zero(m[piv][c])) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (size_t i = r + 1; i < rows; ++i) {
      if (scalar_is_zero(m[i][c])) continue;
      S f = m[i][c] / m[r][c];
      for (size_t k = c; k < cols; ++k) m[i][k] = m[i][k] - f * m[r][k];
    }
    ++r;
  }
  return r;
}

// Solves x * B = rhs exactly (x, rhs row vectors). Throws SingularBasis.
template <class S>
inline Vec<S> solve_left(const Mat<S>& B, const Vec<S>& rhs) {
  static_assert(is_exact_scalar_v<S>);
  size_t n = mat_rows(B);
  if (n != mat_cols(B) || rhs.size() != n) throw DimensionMismatch("solve_left shape");
  // Solve B^T y = rhs^T by elimination.
  Mat<S> a = transpose(B);
  Vec<S> b = rhs;
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && scalar_is_zero(a[piv][c])) ++piv;
    if (piv == n) throw SingularBasis("singular matrix in exact solve");
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (size_t r = c + 1; r < n; ++r) {
      if (scalar_is_zero(a[r][c])) continue;
      S f = a[r][c] / a[c][c];
      for (size_t k = c; k < n; ++k) a[r][k] = a[r][k] - f * a[c][k];
      b[r] = b[r] - f * b[c];
    }
  }
  Vec<S> x(n, make_zero_like(b[0]));
  for (size_t i = n; i-- > 0;) {
    S acc = b[i];
    for (size_t k = i + 1; k < n; ++k) acc = acc - a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return x;
}

// Right kernel basis of a rational matrix: columns y with A y = 0, returned as
// rows of length cols(A), a basis over Q.
inline Mat<Rat> rat_right_kernel(Mat<Rat> a) {
  check_rectangular(a);
  size_t rows = mat_rows(a), cols = mat_cols(a);
  std::vector<long> pivot_col;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    Rat p = a[r][c];
    for (auto& x : a[r]) x /= p;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    pivot_col.push_back(static_cast<long>(c));
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (long c : pivot_col) is_pivot[c] = 1;
  Mat<Rat> kern;
  for (size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    Vec<Rat> v(cols, Rat(0));
    v[free_c] = 1;
    for (size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a[i][free_c];
    kern.push_back(std::move(v));
  }
  return kern;
}

namespace detail {

// Nearest-integer quotient, ties toward negative infinity; keeps entries small.
inline Int round_div(const Int& a, const Int& b) {
  Int q = a / b, r = a - q * b;  // truncation
  if (r != 0) {
    Int b2 = int_abs(b);
    if (2 * int_abs(r) > b2 || (2 * int_abs(r) == b2 && ((r < 0) == (b < 0)))) {
      q += ((r < 0) == (b < 0)) ? 1 : -1;
    }
  }
  return q;
}

}  // namespace detail

// U * A = H with U unimodular and H in row echelon form (each pivot has only
// zeros below it; rows beyond the rank are zero).
inline std::pair<Mat<Int>, Mat<Int>> row_echelon_transform(Mat<Int> a) {
  check_rectangular(a);
  size_t m = mat_rows(a), n = mat_cols(a);
  Mat<Int> u = int_identity(m);
  size_t r = 0;
  for (size_t c = 0; c < n && r < m; ++c) {
    while (true) {
      size_t piv = m;
      for (size_t i = r; i < m; ++i)
        if (a[i][c] != 0 && (piv == m || int_abs(a[i][c]) < int_abs(a[piv][c]))) piv = i;
      if (piv == m) break;
      std::swap(a[piv], a[r]);
      std::swap(u[piv], u[r]);
      bool clean = true;
      for (size_t i = r + 1; i < m; ++i) {
        if (a[i][c] == 0) continue;
        Int q = detail::round_div(a[i][c], a[r][c]);
        if (q != 0) {
          for (size_t k = 0; k < n; ++k) a[i][k] -= q * a[r][k];
          for (size_t k = 0; k < m; ++k) u[i][k] -= q * u[r][k];
        }
        if (a[i][c] != 0) clean = false;
      }
      if (clean) {
        ++r;
        break;
      }
    }
  }
  return {std::move(a), std::move(u)};
}

// Primitive basis of { x integer row : x * A = 0 }. Primitivity is automatic
// because the rows come from a unimodular transform.
inline Mat<Int> int_left_kernel(const Mat<Int>& a) {
  auto [h, u] = row_echelon_transform(a);
  Mat<Int> kern;
  for (size_t i = 0; i < mat_rows(h); ++i) {
    bool zero = true;
    for (const auto& x : h[i])
      if (x != 0) {
        zero = false;
        break;
      }
    if (zero) kern.push_back(u[i]);
  }
  return kern;
}

inline Mat<Int> clear_denominators(const Mat<Rat>& a) {
  Mat<Int> r(mat_rows(a), Vec<Int>(mat_cols(a), Int(0)));
  for (size_t i = 0; i < mat_rows(a); ++i) {
    Int lcm(1);
    for (const auto& q : a[i]) {
      Int d = rat_den(q);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    for (size_t j = 0; j < mat_cols(a); ++j) {
      Rat scaled = a[i][j] * Rat(lcm);
      r[i][j] = rat_num(scaled);
    }
  }
  return r;
}

// Primitive integer basis of span_Q(rows of v) intersected with Z^n.
// Route: the integer right-kernel matrix K of v satisfies x in span_Q(v) iff
// x * K = 0, and the left kernel of K is primitive by construction.
inline Mat<Int> saturate_rowspace(const Mat<Rat>& v) {
  size_t n = mat_cols(v);
  if (mat_rows(v) == 0) return {};
  Mat<Rat> kq = rat_right_kernel(Mat<Rat>(v));
  if (kq.empty()) {
    // full space
    return int_identity(n);
  }
  Mat<Int> k_rows = clear_denominators(kq);  // rows span the orthogonal relations
  Mat<Int> k_cols = transpose(k_rows);       // n x (n - p)
  return int_left_kernel(k_cols);
}

// Exact inverse of a unimodular integer matrix.
inline Mat<Int> int_inverse_unimodular(const Mat<Int>& v) {
  size_t n = mat_rows(v);
  if (n != mat_cols(v)) throw DimensionMismatch("inverse of non-square matrix");
  Mat<Rat> a(n, Vec<Rat>(2 * n, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) a[i][j] = Rat(v[i][j]);
    a[i][n + i] = 1;
  }
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw SingularBasis("matrix not invertible");
    std::swap(a[piv], a[c]);
    Rat p = a[c][c];
    for (auto& x : a[c]) x /= p;
    for (size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t k = 0; k < 2 * n; ++k) a[i][k] -= f * a[c][k];
    }
  }
  Mat<Int> inv(n, Vec<Int>(n, Int(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (rat_den(a[i][n + j]) != 1)
        throw InternalError("inverse of unimodular matrix is not integral");
      inv[i][j] = rat_num(a[i][n + j]);
    }
  return inv;
}

// Extends a primitive p x d matrix to a d x d unimodular matrix whose first p
// rows are the input. Uses a column echelon transform: P V = [L | 0] with L
// unimodular exactly when P is primitive; the missing rows are rows of V^-1.
inline Mat<Int> unimodular_completion(const Mat<Int>& p_rows) {
  size_t p = mat_rows(p_rows), d = mat_cols(p_rows);
  if (p > d) throw DimensionMismatch("more rows than ambient dimension");
  auto [ht, ut] = row_echelon_transform(transpose(p_rows));  // ut * P^T = ht
  Mat<Int> v = transpose(ut);                                // P * v = ht^T = [L | 0]
  Mat<Int> l(p, Vec<Int>(p, Int(0)));
  Mat<Int> pv = transpose(ht);
  for (size_t i = 0; i < p; ++i) {
    for (size_t j = 0; j < d; ++j) {
      if (j < p)
        l[i][j] = pv[i][j];
      else if (pv[i][j] != 0)
        throw InternalError("column echelon left nonzeros outside the leading block");
    }
  }
  Rat dl = 1;
  {
    Mat<Rat> lq(p, Vec<Rat>(p));
    for (size_t i = 0; i < p; ++i)
      for (size_t j = 0; j < p; ++j) lq[i][j] = Rat(l[i][j]);
    dl = p == 0 ? Rat(1) : exact_det(lq);
  }
  if (dl != 1 && dl != -1)
    throw InternalError("input rows are not a primitive system (index " + rat_to_string(dl) + ")");
  Mat<Int> vinv = int_inverse_unimodular(v);
  Mat<Int> out = p_rows;
  for (size_t i = p; i < d; ++i) out.push_back(vinv[i]);
  return out;
}

inline Rat int_mat_det(const Mat<Int>& a) {
  Mat<Rat> q(mat_rows(a), Vec<Rat>(mat_cols(a)));
  for (size_t i = 0; i < mat_rows(a); ++i)
    for (size_t j = 0; j < mat_cols(a); ++j) q[i][j] = Rat(a[i][j]);
  return exact_det(std::move(q));
}

// ---- interval pieces ----

inline Mat<Interval> gram_iv(const Mat<Interval>& a) {
  size_t m = mat_rows(a);
  Mat<Interval> g(m, Vec<Interval>(m, Interval::zero()));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i; j < m; ++j) {
      Interval acc = Interval::zero(a[i][0].precision_bits());
      for (size_t k = 0; k < mat_cols(a); ++k) acc += a[i][k] * a[j][k];
      g[i][j] = acc;
      g[j][i] = acc;
    }
  return g;
}

struct LdltIv {
  Mat<Interval> l;     // unit lower triangular
  Vec<Interval> d;     // certainly positive diagonal
};

// G = L D L^T; nullopt when some diagonal entry cannot be certified positive at
// the working precision (caller escalates).
inline std::optional<LdltIv> ldlt_iv(const Mat<Interval>& g) {
  size_t n = mat_rows(g);
  unsigned prec = n ? g[0][0].precision_bits() : kDefaultPrec;
  Mat<Interval> l(n, Vec<Interval>(n, Interval::zero(prec)));
  Vec<Interval> d(n, Interval::zero(prec));
  for (size_t i = 0; i < n; ++i) l[i][i] = Interval::one(prec);
  for (size_t j = 0; j < n; ++j) {
    Interval dj = g[j][j];
    for (size_t k = 0; k < j; ++k) dj -= l[j][k] * l[j][k] * d[k];
    if (!dj.is_positive()) return std::nullopt;
    d[j] = dj;
    for (size_t i = j + 1; i < n; ++i) {
      Interval x = g[i][j];
      for (size_t k = 0; k < j; ++k) x -= l[i][k] * l[j][k] * d[k];
      l[i][j] = x / dj;
    }
  }
  return LdltIv{std::move(l), std::move(d)};
}

// Certified determinant of a square interval matrix; nullopt when a pivot
// cannot be certified nonzero.
inline std::optional<Interval> det_iv(Mat<Interval> m) {
  size_t n = mat_rows(m);
  if (n != mat_cols(m)) throw DimensionMismatch("determinant of non-square matrix");
  unsigned prec = n ? m[0][0].precision_bits() : kDefaultPrec;
  Interval det = Interval::one(prec);
  for (size_t c = 0; c < n; ++c) {
    size_t piv = n;
    double best = 0;
    for (size_t r = c; r < n; ++r) {
      if (!m[r][c].contains_zero()) {
        double mig = std::abs(m[r][c].mid_d());
        if (piv == n || mig > best) {
          piv = r;
          best = mig;
        }
      }
    }
    if (piv == n) return std::nullopt;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (m[r][c].is_zero_point()) continue;
      Interval f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

// Interval matrix inverse via Gauss-Jordan; nullopt when pivoting fails.
inline std::optional<Mat<Interval>> inverse_iv(const Mat<Interval>& m) {
  size_t n = mat_rows(m);
  if (n != mat_cols(m)) throw DimensionMismatch("inverse of non-square matrix");
  unsigned prec = n ? m[0][0].precision_bits() : kDefaultPrec;
  Mat<Interval> a(n, Vec<Interval>(2 * n, Interval::zero(prec)));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = Interval::one(prec);
  }
  for (size_t c = 0; c < n; ++c) {
    size_t piv = n;
    double best = 0;
    for (size_t r = c; r < n; ++r) {
      if (!a[r][c].contains_zero()) {
        double mig = std::abs(a[r][c].mid_d());
        if (piv == n || mig > best) {
          piv = r;
          best = mig;
        }
      }
    }
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[c]);
    Interval p = a[c][c];
    for (size_t k = 0; k < 2 * n; ++k) a[c][k] /= p;
    for (size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      Interval f = a[i][c];
      if (f.is_zero_point()) continue;
      for (size_t k = 0; k < 2 * n; ++k) a[i][k] -= f * a[c][k];
    }
  }
  Mat<Interval> inv(n, Vec<Interval>(n, Interval::zero(prec)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  return inv;
}

// Floating LLL (delta = 0.99) on row vectors; returns only the unimodular
// transform T with reduced = T * rows. Numerical trouble degrades the reduction
// quality, never correctness, so failures fall back to the identity.
inline Mat<Int> lll_transform(const std::vector<std::vector<double>>& rows_in, double delta = 0.99) {
  size_t n = rows_in.size();
  if (n == 0) return {};
  size_t dim = rows_in[0].size();
  std::vector<std::vector<double>> b = rows_in;
  Mat<Int> t = int_identity(n);

  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };

  std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
  std::vector<double> bstar_norm(n, 0.0);
  std::vector<std::vector<double>> bstar(n, std::vector<double>(dim, 0.0));

  auto gso = [&]() {
    for (size_t i = 0; i < n; ++i) {
      bstar[i] = b[i];
      for (size_t j = 0; j < i; ++j) {
        double num = dot(b[i], bstar[j]);
        mu[i][j] = bstar_norm[j] > 0 ? num / bstar_norm[j] : 0.0;
        for (size_t k = 0; k < dim; ++k) bstar[i][k] -= mu[i][j] * bstar[j][k];
      }
      bstar_norm[i] = dot(bstar[i], bstar[i]);
      if (!std::isfinite(bstar_norm[i])) return false;
    }
    return true;
  };

  if (!gso()) return int_identity(n);

  size_t k = 1;
  size_t steps = 0, max_steps = 10000 * n * n;
  while (k < n && steps++ < max_steps) {
    for (size_t j = k; j-- > 0;) {
      double m = std::round(mu[k][j]);
      if (std::abs(m) > 0.5 && std::isfinite(m)) {
        long long mi = static_cast<long long>(m);
        for (size_t c = 0; c < dim; ++c) b[k][c] -= m * b[j][c];
        for (size_t c = 0; c < n; ++c) t[k][c] -= Int(mi) * t[j][c];
        if (!gso()) return t;
      }
    }
    double lhs = bstar_norm[k];
    double rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar_norm[k - 1];
    if (lhs >= rhs || !(bstar_norm[k - 1] > 0)) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      std::swap(t[k], t[k - 1]);
      if (!gso()) return t;
      k = k > 1 ? k - 1 : 1;
    }
  }
  return t;
}

}  // namespace latlab
