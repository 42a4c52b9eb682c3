#pragma once

// Dense matrices over exact scalars, Gaussian elimination over a field type
// (Rational or FieldElement), and the integer normal forms (HNF, SNF, Bareiss
// determinant, saturated integer kernels) everything downstream rests on.
//
// Normal-form conventions:
//   hnf: row-style echelon form, pivots positive, entries above each pivot
//        reduced into [0, pivot), zero rows at the bottom, U unimodular with
//        U*M = H.
//   snf: diagonal, non-negative, d_i | d_{i+1}, U*M*V = S with U, V unimodular.
// Elimination is classical (no modular arithmetic); inputs stay desk-sized.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "projtop/integers.hpp"

namespace projtop {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  explicit Matrix(std::vector<std::vector<T>> data) {
    rows_ = data.size();
    cols_ = rows_ ? data[0].size() : 0;
    a_.reserve(rows_ * cols_);
    for (auto& row : data) {
      if (row.size() != cols_) throw DomainError("ShapeMismatch", "ragged matrix rows");
      for (auto& x : row) a_.push_back(std::move(x));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }

  Matrix<T> transposed() const {
    if (rows_ == 0 || cols_ == 0) {
      Matrix<T> t;
      t.rows_ = cols_;
      t.cols_ = rows_;
      return t;
    }
    Matrix<T> t(cols_, rows_, a_[0]);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Matrix<T>& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

using IntegerMatrix = Matrix<Integer>;
using RationalMatrix = Matrix<Rational>;

// --- scalar traits used by the generic elimination (FieldElement adds its own
// overloads; ordinary lookup finds these, ADL finds the FieldElement ones) ---

inline bool elem_is_zero(const Rational& x) { return sgn(x) == 0; }
inline Rational elem_inv(const Rational& x) {
  if (sgn(x) == 0) throw DomainError("DivisionByZero", "inverse of zero rational");
  return Rational(1) / x;
}
inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational one_like(const Rational&) { return Rational(1); }

inline IntegerMatrix identity_matrix(std::size_t n) {
  IntegerMatrix m(n, n, Integer(0));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

template <typename T>
Matrix<T> mat_mul(const Matrix<T>& a, const Matrix<T>& b, const T& zero) {
  if (a.cols() != b.rows()) throw DomainError("ShapeMismatch", "matrix product shapes");
  Matrix<T> c(a.rows(), b.cols(), zero);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T& aik = a(i, k);
      if (elem_is_zero(aik)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = c(i, j) + aik * b(k, j);
    }
  return c;
}

inline IntegerMatrix mat_mul(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("ShapeMismatch", "matrix product shapes");
  IntegerMatrix c(a.rows(), b.cols(), Integer(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

// --- Gaussian elimination over a field type -------------------------------

// Full reduced row echelon form in place; returns the pivot columns.
template <typename T>
std::vector<std::size_t> rref_in_place(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && elem_is_zero(m(sel, col))) ++sel;
    if (sel == m.rows()) continue;
    m.swap_rows(row, sel);
    T inv = elem_inv(m(row, col));
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || elem_is_zero(m(i, col))) continue;
      T f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename T>
std::size_t rank_over_field(Matrix<T> m) {
  return rref_in_place(m).size();
}

// Basis (as rows) of the right kernel {x : M x = 0}. `one` supplies the
// scalar constructor (FieldElements carry their field).
template <typename T>
Matrix<T> kernel_over_field(Matrix<T> m, const T& one) {
  const T zero = zero_like(one);
  std::vector<std::size_t> pivots = rref_in_place(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free_col = 0; free_col < m.cols(); ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<T> v(m.cols(), zero);
    v[free_col] = one;
    for (std::size_t pi = 0; pi < pivots.size(); ++pi) {
      // Row pi has its pivot at pivots[pi]; solve for that coordinate.
      v[pivots[pi]] = zero - m(pi, free_col);
    }
    basis.push_back(std::move(v));
  }
  if (basis.empty()) return Matrix<T>(0, m.cols(), zero);
  return Matrix<T>(std::move(basis));
}

// One solution of M x = b (column convention), if any.
template <typename T>
std::optional<std::vector<T>> solve_over_field(const Matrix<T>& m, const std::vector<T>& b,
                                               const T& one) {
  if (b.size() != m.rows()) throw DomainError("ShapeMismatch", "solve rhs length");
  const T zero = zero_like(one);
  Matrix<T> aug(m.rows(), m.cols() + 1, zero);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  std::vector<std::size_t> pivots = rref_in_place(aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;  // inconsistent
  std::vector<T> x(m.cols(), zero);
  for (std::size_t pi = 0; pi < pivots.size(); ++pi) x[pivots[pi]] = aug(pi, m.cols());
  return x;
}

// --- integer normal forms ---------------------------------------------------

struct HnfResult {
  IntegerMatrix h;  // echelon form
  IntegerMatrix u;  // unimodular, u * input = h
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
};

inline HnfResult hnf(const IntegerMatrix& m) {
  HnfResult res;
  res.h = m;
  res.u = identity_matrix(m.rows());
  IntegerMatrix& h = res.h;
  IntegerMatrix& u = res.u;
  auto add_multiple = [&](std::size_t dst, std::size_t src, const Integer& q) {
    if (q == 0) return;
    for (std::size_t c = 0; c < h.cols(); ++c) h(dst, c) -= q * h(src, c);
    for (std::size_t c = 0; c < u.cols(); ++c) u(dst, c) -= q * u(src, c);
  };
  auto negate_row = [&](std::size_t r) {
    for (std::size_t c = 0; c < h.cols(); ++c) h(r, c) = -h(r, c);
    for (std::size_t c = 0; c < u.cols(); ++c) u(r, c) = -u(r, c);
  };
  std::size_t row = 0;
  for (std::size_t col = 0; col < h.cols() && row < h.rows(); ++col) {
    // Euclidean reduction within the column, below `row`.
    while (true) {
      std::size_t best = h.rows();
      for (std::size_t r = row; r < h.rows(); ++r) {
        if (h(r, col) == 0) continue;
        if (best == h.rows() || cmp(abs(h(r, col)), abs(h(best, col))) < 0) best = r;
      }
      if (best == h.rows()) break;  // column clear below row
      h.swap_rows(row, best);
      u.swap_rows(row, best);
      if (h(row, col) < 0) negate_row(row);
      bool anything_left = false;
      for (std::size_t r = row + 1; r < h.rows(); ++r) {
        if (h(r, col) == 0) continue;
        add_multiple(r, row, floor_div(h(r, col), h(row, col)));
        if (h(r, col) != 0) anything_left = true;
      }
      if (!anything_left) break;
    }
    if (row < h.rows() && h(row, col) != 0) {
      for (std::size_t r = 0; r < row; ++r) add_multiple(r, row, floor_div(h(r, col), h(row, col)));
      res.pivot_cols.push_back(col);
      ++row;
    }
  }
  res.rank = row;
  return res;
}

struct SnfResult {
  IntegerMatrix s;  // diagonal, non-negative, divisibility chain
  IntegerMatrix u;  // unimodular rows-side
  IntegerMatrix v;  // unimodular cols-side, u * input * v = s
  std::size_t rank = 0;
};

inline SnfResult snf(const IntegerMatrix& m) {
  SnfResult res;
  res.s = m;
  res.u = identity_matrix(m.rows());
  res.v = identity_matrix(m.cols());
  IntegerMatrix& s = res.s;
  IntegerMatrix& u = res.u;
  IntegerMatrix& v = res.v;

  // Diagonalize by alternating row and column echelon passes.  Each pass
  // leaves entries reduced modulo the pivots, which keeps the intermediate
  // sizes under control (a single min-pivot sweep suffers exponential
  // coefficient growth on dense inputs); the leading entry divides its
  // predecessor from one cycle to the next, so the alternation terminates.
  auto off_diagonal = [&]() {
    for (std::size_t i = 0; i < s.rows(); ++i)
      for (std::size_t j = 0; j < s.cols(); ++j)
        if (i != j && s(i, j) != 0) return true;
    return false;
  };
  std::size_t guard = 0;
  while (off_diagonal()) {
    if (++guard > 1000)
      throw DomainError("InternalCheck", "diagonalization failed to converge");
    HnfResult rows_pass = hnf(s);
    s = std::move(rows_pass.h);
    u = mat_mul(rows_pass.u, u);
    if (!off_diagonal()) break;
    HnfResult cols_pass = hnf(s.transposed());
    s = cols_pass.h.transposed();
    v = mat_mul(v, cols_pass.u.transposed());
  }

  const std::size_t dim = std::min(s.rows(), s.cols());
  for (std::size_t t = 0; t < dim; ++t) {
    if (s(t, t) == 0) break;
    if (s(t, t) < 0) {
      for (std::size_t c = 0; c < s.cols(); ++c) s(t, c) = -s(t, c);
      for (std::size_t c = 0; c < u.cols(); ++c) u(t, c) = -u(t, c);
    }
    res.rank = t + 1;
  }

  // The eliminations leave a non-negative diagonal; enforce the divisibility
  // chain pairwise.  For diagonal entries (a, b) with g = x*a + y*b, the
  // unimodular pair P = [[x, y], [-b/g, a/g]], Q = [[1, -y*b/g], [1, x*a/g]]
  // turns diag(a, b) into diag(g, a*b/g), and every intermediate stays
  // bounded by products of diagonal entries.
  for (std::size_t i = 0; i < res.rank; ++i)
    for (std::size_t j = i + 1; j < res.rank; ++j) {
      const Integer a = s(i, i), b = s(j, j);
      if (b % a == 0) continue;
      Integer g, x, y;
      mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      const Integer ag = a / g, bg = b / g;
      s(i, i) = g;
      s(j, j) = ag * b;
      for (std::size_t c = 0; c < u.cols(); ++c) {
        const Integer ui = u(i, c), uj = u(j, c);
        u(i, c) = x * ui + y * uj;
        u(j, c) = -bg * ui + ag * uj;
      }
      for (std::size_t r = 0; r < v.rows(); ++r) {
        const Integer vi = v(r, i), vj = v(r, j);
        v(r, i) = vi + vj;
        v(r, j) = -y * bg * vi + x * ag * vj;
      }
    }
  return res;
}

// Exact determinant by fraction-free (Bareiss) elimination.
inline Integer det_bareiss(IntegerMatrix m) {
  if (m.rows() != m.cols()) throw DomainError("ShapeMismatch", "determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  int sign_flips = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t sel = k + 1;
      while (sel < n && m(sel, k) == 0) ++sel;
      if (sel == n) return 0;
      m.swap_rows(k, sel);
      sign_flips = -sign_flips;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        Integer q;
        mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = q;
      }
    prev = m(k, k);
  }
  return sign_flips * m(n - 1, n - 1);
}

inline IntegerMatrix clear_denominators_rowwise(const RationalMatrix& m) {
  IntegerMatrix out(m.rows(), m.cols(), Integer(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) l = lcm(l, m(i, j).get_den());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Rational scaled = m(i, j) * Rational(l);
      out(i, j) = scaled.get_num();  // exact: denominator is 1
    }
  }
  return out;
}

inline RationalMatrix to_rational(const IntegerMatrix& m) {
  RationalMatrix out(m.rows(), m.cols(), Rational(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

// Saturated basis (as rows, HNF-canonical) of {x in Z^n : M x = 0}. Row-wise
// denominator clearing leaves the kernel unchanged, and a kernel of an integer
// matrix is saturated by construction.
inline IntegerMatrix integer_kernel(const RationalMatrix& m) {
  IntegerMatrix mi = clear_denominators_rowwise(m);
  const std::size_t n = mi.cols();
  HnfResult t = hnf(mi.transposed());
  std::vector<std::vector<Integer>> rows;
  for (std::size_t r = t.rank; r < n; ++r) rows.push_back(t.u.row(r));
  if (rows.empty()) return IntegerMatrix(0, n, Integer(0));
  HnfResult canon = hnf(IntegerMatrix(std::move(rows)));
  std::vector<std::vector<Integer>> basis;
  for (std::size_t r = 0; r < canon.rank; ++r) basis.push_back(canon.h.row(r));
  return IntegerMatrix(std::move(basis));
}

inline IntegerMatrix integer_kernel(const IntegerMatrix& m) { return integer_kernel(to_rational(m)); }

// Rank over Q of a list of rational vectors.
inline std::size_t span_rank(const std::vector<std::vector<Rational>>& vectors) {
  if (vectors.empty()) return 0;
  return rank_over_field(RationalMatrix(std::vector<std::vector<Rational>>(vectors)));
}

// Plucker-style wedge coordinates: all k x k minors of a k x n matrix of row
// vectors, ordered by lexicographic k-subsets of the columns.
inline std::vector<Integer> wedge_coordinates(const IntegerMatrix& rows_mat) {
  const std::size_t k = rows_mat.rows(), n = rows_mat.cols();
  if (k > n) throw DomainError("ShapeMismatch", "wedge degree exceeds ambient dimension");
  std::vector<Integer> out;
  std::vector<std::size_t> subset(k);
  for (std::size_t i = 0; i < k; ++i) subset[i] = i;
  while (true) {
    IntegerMatrix minor(k, k, Integer(0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor(i, j) = rows_mat(i, subset[j]);
    out.push_back(det_bareiss(minor));
    // next lexicographic k-subset
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (subset[i] != i + n - k) {
        ++subset[i];
        for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
        i = k + 1;
        break;
      }
    }
    if (i != k + 1) break;
    if (k == 0) break;
  }
  return out;
}

}  // namespace projtop
