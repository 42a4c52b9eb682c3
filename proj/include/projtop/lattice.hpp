#pragma once

// Finitely generated subgroups of Z^n and Q^n with canonical HNF bases:
// membership, saturation, sums/intersections, subgroup indices via SNF,
// deterministic coset representatives, and canonical residues modulo a
// lattice (the workhorse of orbit-class deduplication).

#include <optional>
#include <string>
#include <vector>

#include "projtop/integers.hpp"
#include "projtop/matrix.hpp"

namespace projtop {

class Lattice {
 public:
  Lattice() = default;
  static Lattice zero(std::size_t ambient) {
    Lattice l;
    l.ambient_ = ambient;
    l.basis_ = IntegerMatrix(0, ambient, Integer(0));
    return l;
  }

  // Canonicalizes arbitrary generators to an HNF basis.
  static Lattice from_rows(const IntegerMatrix& gens) {
    Lattice l;
    l.ambient_ = gens.cols();
    HnfResult res = hnf(gens);
    std::vector<std::vector<Integer>> rows;
    for (std::size_t r = 0; r < res.rank; ++r) rows.push_back(res.h.row(r));
    l.basis_ = rows.empty() ? IntegerMatrix(0, gens.cols(), Integer(0))
                            : IntegerMatrix(std::move(rows));
    l.pivots_.assign(res.pivot_cols.begin(), res.pivot_cols.end());
    return l;
  }

  static Lattice from_rows(const std::vector<std::vector<Integer>>& gens, std::size_t ambient) {
    if (gens.empty()) return zero(ambient);
    return from_rows(IntegerMatrix(std::vector<std::vector<Integer>>(gens)));
  }

  static Lattice full(std::size_t ambient) { return from_rows(identity_matrix(ambient)); }

  std::size_t ambient() const { return ambient_; }
  std::size_t rank() const { return basis_.rows(); }
  const IntegerMatrix& basis() const { return basis_; }
  const std::vector<std::size_t>& pivot_cols() const { return pivots_; }

  bool operator==(const Lattice& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }

  // Rational coordinates of v in the HNF basis, if v lies in the Q-span.
  std::optional<std::vector<Rational>> coordinates_of(const std::vector<Rational>& v) const {
    if (v.size() != ambient_) throw DomainError("ShapeMismatch", "lattice coordinates length");
    std::vector<Rational> residual = v;
    std::vector<Rational> coords(rank(), Rational(0));
    for (std::size_t i = 0; i < rank(); ++i) {
      const std::size_t p = pivots_[i];
      Rational c = residual[p] / Rational(basis_(i, p));
      coords[i] = c;
      if (sgn(c) != 0)
        for (std::size_t j = 0; j < ambient_; ++j) residual[j] -= c * Rational(basis_(i, j));
    }
    for (const auto& x : residual)
      if (sgn(x) != 0) return std::nullopt;
    return coords;
  }

  bool contains(const std::vector<Rational>& v) const {
    auto coords = coordinates_of(v);
    if (!coords) return false;
    for (const auto& c : *coords)
      if (c.get_den() != 1) return false;
    return true;
  }

  bool contains(const std::vector<Integer>& v) const {
    std::vector<Rational> q;
    q.reserve(v.size());
    for (const auto& x : v) q.emplace_back(x);
    return contains(q);
  }

  friend Lattice lattice_sum(const Lattice& a, const Lattice& b) {
    if (a.ambient_ != b.ambient_) throw DomainError("ShapeMismatch", "lattice sum ambient mismatch");
    std::vector<std::vector<Integer>> rows;
    for (std::size_t i = 0; i < a.rank(); ++i) rows.push_back(a.basis_.row(i));
    for (std::size_t i = 0; i < b.rank(); ++i) rows.push_back(b.basis_.row(i));
    return rows.empty() ? zero(a.ambient_) : from_rows(IntegerMatrix(std::move(rows)));
  }

  friend Lattice lattice_intersection(const Lattice& a, const Lattice& b) {
    if (a.ambient_ != b.ambient_)
      throw DomainError("ShapeMismatch", "lattice intersection ambient mismatch");
    if (a.rank() == 0 || b.rank() == 0) return zero(a.ambient_);
    // Solutions (x, y) of x*Ba + y*Bb = 0 give intersection vectors x*Ba.
    const std::size_t ra = a.rank(), rb = b.rank();
    IntegerMatrix stacked(ra + rb, a.ambient_, Integer(0));
    for (std::size_t i = 0; i < ra; ++i)
      for (std::size_t j = 0; j < a.ambient_; ++j) stacked(i, j) = a.basis_(i, j);
    for (std::size_t i = 0; i < rb; ++i)
      for (std::size_t j = 0; j < a.ambient_; ++j) stacked(ra + i, j) = b.basis_(i, j);
    IntegerMatrix ker = integer_kernel(stacked.transposed());
    std::vector<std::vector<Integer>> rows;
    for (std::size_t k = 0; k < ker.rows(); ++k) {
      std::vector<Integer> v(a.ambient_, Integer(0));
      for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < a.ambient_; ++j) v[j] += ker(k, i) * a.basis_(i, j);
      rows.push_back(std::move(v));
    }
    return rows.empty() ? zero(a.ambient_) : from_rows(IntegerMatrix(std::move(rows)));
  }

  // Z^ambient intersected with the Q-span: the double orthogonal complement.
  friend Lattice saturation(const Lattice& l) {
    IntegerMatrix orth = integer_kernel(to_rational(l.basis_));
    IntegerMatrix sat = integer_kernel(to_rational(orth));
    std::vector<std::vector<Integer>> rows;
    for (std::size_t r = 0; r < sat.rows(); ++r) rows.push_back(sat.row(r));
    return rows.empty() ? zero(l.ambient_) : from_rows(IntegerMatrix(std::move(rows)));
  }

 private:
  std::size_t ambient_ = 0;
  IntegerMatrix basis_;
  std::vector<std::size_t> pivots_;
};

struct IndexResult {
  bool finite = false;
  Integer index = 0;  // meaningful when finite
};

// Integer coordinate matrix of sub's basis in sup's basis; throws NotASubgroup
// when sub is not contained in sup.
inline IntegerMatrix subgroup_coordinates(const Lattice& sub, const Lattice& sup) {
  IntegerMatrix c(sub.rank(), sup.rank(), Integer(0));
  for (std::size_t i = 0; i < sub.rank(); ++i) {
    std::vector<Rational> v;
    for (std::size_t j = 0; j < sub.ambient(); ++j) v.emplace_back(sub.basis()(i, j));
    auto coords = sup.coordinates_of(v);
    if (!coords) throw DomainError("NotASubgroup", "vector outside the Q-span of the supergroup");
    for (std::size_t j = 0; j < sup.rank(); ++j) {
      if ((*coords)[j].get_den() != 1)
        throw DomainError("NotASubgroup", "non-integral coordinates in the supergroup basis");
      c(i, j) = (*coords)[j].get_num();
    }
  }
  return c;
}

// [sup : sub] as the product of SNF diagonal entries; INFINITE when ranks gap.
inline IndexResult subgroup_index(const Lattice& sub, const Lattice& sup) {
  IntegerMatrix c = subgroup_coordinates(sub, sup);
  if (sub.rank() < sup.rank()) return {false, 0};
  SnfResult s = snf(c);
  Integer idx = 1;
  for (std::size_t i = 0; i < sup.rank(); ++i) idx *= s.s(i, i);
  if (idx == 0) return {false, 0};  // cannot happen for an independent basis; defensive
  return {true, idx};
}

// V^{-1} for a unimodular V: the HNF of a unimodular matrix is the identity,
// and the recorded row transform is exactly the inverse.
inline IntegerMatrix unimodular_inverse(const IntegerMatrix& v) {
  HnfResult r = hnf(v);
  if (!(r.h == identity_matrix(v.rows())))
    throw DomainError("ShapeMismatch", "matrix is not unimodular");
  return r.u;
}

class EnumerationBudget : public DomainError {
 public:
  explicit EnumerationBudget(const std::string& what) : DomainError("EnumerationBudget", what) {}
};

// Deterministic coset representatives of sub in sup (equal ranks required;
// callers detect the infinite case via subgroup_index first). Representatives
// are "minimal non-negative SNF coordinates": the digit vector w runs
// lexicographically over prod [0, d_i), and each rep is (w V^{-1}) * basis.
inline std::vector<std::vector<Rational>> coset_representatives(const Lattice& sub,
                                                                const Lattice& sup,
                                                                std::size_t cap = 100000) {
  IntegerMatrix c = subgroup_coordinates(sub, sup);
  if (sub.rank() != sup.rank())
    throw DomainError("NotASubgroup", "coset enumeration of an infinite-index subgroup");
  SnfResult s = snf(c);
  const std::size_t n = sup.rank();
  Integer total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= s.s(i, i);
  if (total == 0) throw DomainError("NotASubgroup", "degenerate coordinate matrix");
  if (total > Integer(static_cast<long>(cap)))
    throw EnumerationBudget("coset count " + to_string(total) + " exceeds cap");
  IntegerMatrix vinv = unimodular_inverse(s.v);
  std::vector<std::vector<Rational>> reps;
  std::vector<Integer> w(n, Integer(0));
  while (true) {
    // z = w * V^{-1}; rep = z * basis
    std::vector<Rational> rep(sup.ambient(), Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
      Integer zj = 0;
      for (std::size_t i = 0; i < n; ++i) zj += w[i] * vinv(i, j);
      if (zj == 0) continue;
      for (std::size_t a = 0; a < sup.ambient(); ++a)
        rep[a] += Rational(zj) * Rational(sup.basis()(j, a));
    }
    reps.push_back(std::move(rep));
    // increment w in mixed radix (d_0, ..., d_{n-1}), last digit fastest
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      ++w[pos];
      if (w[pos] < s.s(pos, pos)) break;
      w[pos] = 0;
      if (pos == 0) return reps;
    }
    if (n == 0) return reps;
  }
}

// A finitely generated subgroup of Q^n, stored as (1/den) * integer lattice
// with the minimal positive denominator.
class RatLattice {
 public:
  RatLattice() = default;

  static RatLattice zero(std::size_t ambient) {
    RatLattice l;
    l.den_ = 1;
    l.lat_ = Lattice::zero(ambient);
    return l;
  }

  static RatLattice from_rows(const std::vector<std::vector<Rational>>& gens, std::size_t ambient) {
    RatLattice l;
    if (gens.empty()) return zero(ambient);
    Integer d = 1;
    for (const auto& row : gens)
      for (const auto& x : row) d = lcm(d, x.get_den());
    std::vector<std::vector<Integer>> scaled;
    for (const auto& row : gens) {
      if (row.size() != ambient) throw DomainError("ShapeMismatch", "rational lattice row length");
      std::vector<Integer> r;
      for (const auto& x : row) {
        Rational s = x * Rational(d);
        r.push_back(s.get_num());
      }
      scaled.push_back(std::move(r));
    }
    l.den_ = d;
    l.lat_ = Lattice::from_rows(scaled, ambient);
    l.normalize();
    return l;
  }

  std::size_t ambient() const { return lat_.ambient(); }
  std::size_t rank() const { return lat_.rank(); }
  const Integer& denominator() const { return den_; }
  const Lattice& scaled_lattice() const { return lat_; }

  bool operator==(const RatLattice& o) const { return den_ == o.den_ && lat_ == o.lat_; }

  bool contains(const std::vector<Rational>& v) const {
    std::vector<Rational> scaled;
    scaled.reserve(v.size());
    for (const auto& x : v) scaled.push_back(x * Rational(den_));
    return lat_.contains(scaled);
  }

  friend RatLattice ratlattice_sum(const RatLattice& a, const RatLattice& b) {
    std::vector<std::vector<Rational>> gens;
    for (std::size_t i = 0; i < a.rank(); ++i) gens.push_back(a.basis_row(i));
    for (std::size_t i = 0; i < b.rank(); ++i) gens.push_back(b.basis_row(i));
    return from_rows(gens, a.ambient());
  }

  std::vector<Rational> basis_row(std::size_t i) const {
    std::vector<Rational> r;
    for (std::size_t j = 0; j < ambient(); ++j)
      r.push_back(make_rational(lat_.basis()(i, j), den_));
    return r;
  }

  // Canonical residue of v modulo this lattice: greedy pivot reduction in the
  // HNF frame; the unique coset representative whose basis coefficients lie
  // in [0, 1). Coordinates outside the Q-span pass through untouched.
  std::vector<Rational> reduce_mod(const std::vector<Rational>& v) const {
    std::vector<Rational> x;
    x.reserve(v.size());
    for (const auto& q : v) x.push_back(q * Rational(den_));
    for (std::size_t i = 0; i < lat_.rank(); ++i) {
      const std::size_t p = lat_.pivot_cols()[i];
      Integer t = floor_rational(x[p] / Rational(lat_.basis()(i, p)));
      if (t == 0) continue;
      for (std::size_t j = 0; j < ambient(); ++j) x[j] -= Rational(t) * Rational(lat_.basis()(i, j));
    }
    for (auto& q : x) q /= Rational(den_);
    return x;
  }

  friend IndexResult subgroup_index(const RatLattice& sub, const RatLattice& sup) {
    auto [a, b] = RatLattice::common_denominator(sub, sup);
    return subgroup_index(a, b);
  }

  friend std::vector<std::vector<Rational>> coset_representatives(const RatLattice& sub,
                                                                  const RatLattice& sup,
                                                                  std::size_t cap) {
    auto [a, b] = RatLattice::common_denominator(sub, sup);
    Integer d = lcm(sub.den_, sup.den_);
    std::vector<std::vector<Rational>> reps = coset_representatives(a, b, cap);
    for (auto& rep : reps)
      for (auto& x : rep) x /= Rational(d);
    return reps;
  }

 private:
  void normalize() {
    if (lat_.rank() == 0) {
      den_ = 1;
      return;
    }
    Integer g = den_;
    for (std::size_t i = 0; i < lat_.rank() && g != 1; ++i)
      for (std::size_t j = 0; j < lat_.ambient() && g != 1; ++j)
        g = gcd(g, lat_.basis()(i, j));
    if (g > 1) {
      std::vector<std::vector<Integer>> rows;
      for (std::size_t i = 0; i < lat_.rank(); ++i) {
        std::vector<Integer> r = lat_.basis().row(i);
        for (auto& x : r) x /= g;
        rows.push_back(std::move(r));
      }
      lat_ = Lattice::from_rows(rows, lat_.ambient());
      den_ /= g;
    }
  }

  static std::pair<Lattice, Lattice> common_denominator(const RatLattice& sub,
                                                        const RatLattice& sup) {
    Integer d = lcm(sub.den_, sup.den_);
    auto scale = [&](const RatLattice& l) {
      Integer f = d / l.den_;
      std::vector<std::vector<Integer>> rows;
      for (std::size_t i = 0; i < l.rank(); ++i) {
        std::vector<Integer> r = l.lat_.basis().row(i);
        for (auto& x : r) x *= f;
        rows.push_back(std::move(r));
      }
      return Lattice::from_rows(rows, l.ambient());
    };
    return {scale(sub), scale(sup)};
  }

  Integer den_ = 1;
  Lattice lat_;
};

inline std::vector<std::vector<Rational>> coset_representatives(const RatLattice& sub,
                                                                const RatLattice& sup) {
  return coset_representatives(sub, sup, static_cast<std::size_t>(100000));
}

inline std::string to_string(const std::vector<Rational>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += to_string(v[i]);
  }
  return s + ")";
}

}  // namespace projtop
