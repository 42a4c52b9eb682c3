#pragma once

// Real algebraic number fields Q[x]/(m) with a distinguished real root given
// by an isolating rational interval. Elements are canonical coefficient
// vectors; zero testing is syntactic, and sign determination refines the
// isolating interval with exact rational interval arithmetic.
//
// Preconditions documented rather than checked: m must be irreducible over Q
// (checking would require factorization, which is out of scope). Construction
// rejects non-monic, non-squarefree moduli and intervals that do not isolate
// exactly one real root (Sturm count); a reducible-but-squarefree modulus
// surfaces lazily as NotInvertible / a zero-divisor diagnosis in field_sign.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projtop/integers.hpp"
#include "projtop/matrix.hpp"

namespace projtop {

// --- rational polynomials (ascending coefficients, no trailing zeros) -------

using QPoly = std::vector<Rational>;

inline void poly_normalize(QPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

inline long poly_degree(const QPoly& p) { return static_cast<long>(p.size()) - 1; }

inline QPoly poly_add(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  poly_normalize(r);
  return r;
}

inline QPoly poly_scale(const QPoly& a, const Rational& s) {
  if (sgn(s) == 0) return {};
  QPoly r = a;
  for (auto& c : r) c *= s;
  return r;
}

inline QPoly poly_sub(const QPoly& a, const QPoly& b) { return poly_add(a, poly_scale(b, Rational(-1))); }

inline QPoly poly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  poly_normalize(r);
  return r;
}

// Quotient and remainder of a by b over Q, b != 0.
inline std::pair<QPoly, QPoly> poly_divmod(const QPoly& a, const QPoly& b) {
  if (b.empty()) throw DomainError("DivisionByZero", "polynomial division by zero");
  QPoly rem = a, quot;
  const long db = poly_degree(b);
  if (poly_degree(a) >= db) quot.assign(a.size() - b.size() + 1, Rational(0));
  while (poly_degree(rem) >= db) {
    const long shift = poly_degree(rem) - db;
    Rational f = rem.back() / b.back();
    quot[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) rem[shift + i] -= f * b[i];
    poly_normalize(rem);
  }
  poly_normalize(quot);
  return {quot, rem};
}

// Monic gcd over Q.
inline QPoly poly_gcd(QPoly a, QPoly b) {
  poly_normalize(a);
  poly_normalize(b);
  while (!b.empty()) {
    QPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    Rational inv = Rational(1) / a.back();
    for (auto& c : a) c *= inv;
  }
  return a;
}

inline QPoly poly_derivative(const QPoly& p) {
  if (p.size() <= 1) return {};
  QPoly d(p.size() - 1, Rational(0));
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * Rational(static_cast<long>(i));
  return d;
}

inline Rational poly_eval(const QPoly& p, const Rational& x) {
  Rational r(0);
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

// Interval Horner evaluation: encloses {p(t) : t in [lo, hi]}.
inline std::pair<Rational, Rational> poly_eval_interval(const QPoly& p, const Rational& lo,
                                                        const Rational& hi) {
  Rational a(0), b(0);
  for (std::size_t i = p.size(); i-- > 0;) {
    // [a,b] * [lo,hi]
    Rational p1 = a * lo, p2 = a * hi, p3 = b * lo, p4 = b * hi;
    Rational nlo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rational nhi = std::max(std::max(p1, p2), std::max(p3, p4));
    a = nlo + p[i];
    b = nhi + p[i];
  }
  return {a, b};
}

// Number of distinct real roots of p in the open interval (lo, hi), assuming
// p(lo) != 0 and p(hi) != 0, by Sturm's theorem.
inline int sturm_root_count(const QPoly& p, const Rational& lo, const Rational& hi) {
  std::vector<QPoly> seq;
  seq.push_back(p);
  seq.push_back(poly_derivative(p));
  poly_normalize(seq.back());
  while (!seq.back().empty() && poly_degree(seq.back()) > 0) {
    QPoly r = poly_divmod(seq[seq.size() - 2], seq.back()).second;
    for (auto& c : r) c = -c;
    if (r.empty()) break;
    seq.push_back(std::move(r));
  }
  auto variations = [&](const Rational& x) {
    int count = 0, last = 0;
    for (const auto& q : seq) {
      int s = sgn(poly_eval(q, x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  };
  return variations(lo) - variations(hi);
}

// --- the field ---------------------------------------------------------------

class NumberField {
 public:
  // min_poly: ascending integer coefficients, monic, degree >= 1.
  // (root_lo, root_hi): rational interval isolating exactly one real root.
  NumberField(std::vector<Integer> min_poly, Rational root_lo, Rational root_hi)
      : min_poly_int_(std::move(min_poly)), lo_(std::move(root_lo)), hi_(std::move(root_hi)) {
    if (min_poly_int_.size() < 2)
      throw DomainError("InvalidNumberField", "minimal polynomial must have degree >= 1");
    if (min_poly_int_.back() != 1)
      throw DomainError("InvalidNumberField", "minimal polynomial must be monic");
    for (const auto& c : min_poly_int_) m_.push_back(Rational(c));
    degree_ = static_cast<int>(min_poly_int_.size()) - 1;
    if (degree_ == 1) {
      exact_root_ = -m_[0];
      lo_ = *exact_root_;
      hi_ = *exact_root_;
      return;
    }
    if (lo_ >= hi_) throw DomainError("InvalidNumberField", "empty root interval");
    if (sgn(poly_eval(m_, lo_)) == 0 || sgn(poly_eval(m_, hi_)) == 0)
      throw DomainError("InvalidNumberField", "root interval endpoint is a root");
    QPoly g = poly_gcd(m_, poly_derivative(m_));
    if (poly_degree(g) > 0)
      throw DomainError("InvalidNumberField", "minimal polynomial is not squarefree");
    if (sturm_root_count(m_, lo_, hi_) != 1)
      throw DomainError("InvalidNumberField", "interval does not isolate exactly one root");
  }

  int degree() const { return degree_; }
  const QPoly& modulus() const { return m_; }
  const std::vector<Integer>& modulus_int() const { return min_poly_int_; }
  Rational root_lo() const { return lo_; }
  Rational root_hi() const { return hi_; }
  const std::optional<Rational>& exact_root() const { return exact_root_; }

  // One bisection step on a caller-held interval copy. The modulus vanishing
  // at a rational midpoint would mean a rational root, impossible for an
  // irreducible modulus of degree >= 2.
  void bisect(Rational& lo, Rational& hi) const {
    Rational mid = (lo + hi) / 2;
    int sm = sgn(poly_eval(m_, mid));
    if (sm == 0)
      throw DomainError("InvalidNumberField", "modulus has a rational root; it is not irreducible");
    if (sm == sgn(poly_eval(m_, lo)))
      lo = mid;
    else
      hi = mid;
  }

  bool same_presentation(const NumberField& o) const {
    return min_poly_int_ == o.min_poly_int_ && lo_ == o.lo_ && hi_ == o.hi_;
  }

  // Same modulus and the two intervals isolate the same root.
  bool compatible(const NumberField& o) const {
    if (min_poly_int_ != o.min_poly_int_) return false;
    if (degree_ == 1) return true;
    Rational l = std::max(lo_, o.lo_), h = std::min(hi_, o.hi_);
    if (l >= h) return false;
    return sturm_root_count(m_, l, h) == 1;
  }

 private:
  std::vector<Integer> min_poly_int_;
  QPoly m_;
  Rational lo_, hi_;
  int degree_ = 0;
  std::optional<Rational> exact_root_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr field, std::vector<Rational> coeffs) : field_(std::move(field)) {
    if (!field_) throw DomainError("InvalidNumberField", "element without a field");
    coeffs.resize(field_->degree(), Rational(0));
    c_ = std::move(coeffs);
    reduce_if_needed();
  }

  static FieldElement zero(const FieldPtr& f) { return FieldElement(f, {}); }
  static FieldElement one(const FieldPtr& f) { return FieldElement(f, {Rational(1)}); }
  static FieldElement from_rational(const FieldPtr& f, const Rational& q) {
    return FieldElement(f, {q});
  }
  static FieldElement generator(const FieldPtr& f) {
    if (f->degree() == 1) return FieldElement(f, {*f->exact_root()});
    return FieldElement(f, {Rational(0), Rational(1)});
  }

  const FieldPtr& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (sgn(q) != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (sgn(c_[i]) != 0) return false;
    return true;
  }
  Rational as_rational() const {
    if (!is_rational()) throw DomainError("NotRational", "field element is irrational");
    return c_.empty() ? Rational(0) : c_[0];
  }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    a.require_same_field(b);
    std::vector<Rational> r = a.c_;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b.c_[i];
    return FieldElement(a.field_, std::move(r));
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    a.require_same_field(b);
    std::vector<Rational> r = a.c_;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b.c_[i];
    return FieldElement(a.field_, std::move(r));
  }
  FieldElement operator-() const {
    std::vector<Rational> r = c_;
    for (auto& q : r) q = -q;
    return FieldElement(field_, std::move(r));
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    a.require_same_field(b);
    QPoly pa(a.c_.begin(), a.c_.end()), pb(b.c_.begin(), b.c_.end());
    poly_normalize(pa);
    poly_normalize(pb);
    QPoly prod = poly_mul(pa, pb);
    QPoly rem = poly_divmod(prod, a.field_->modulus()).second;
    rem.resize(a.field_->degree(), Rational(0));
    return FieldElement(a.field_, std::vector<Rational>(rem.begin(), rem.end()));
  }
  friend FieldElement operator*(const Rational& s, const FieldElement& a) {
    std::vector<Rational> r = a.c_;
    for (auto& q : r) q *= s;
    return FieldElement(a.field_, std::move(r));
  }

  // Inverse modulo the minimal polynomial by the extended Euclidean algorithm.
  FieldElement inverse() const {
    if (is_zero()) throw DomainError("DivisionByZero", "inverse of zero field element");
    QPoly r0 = field_->modulus(), r1(c_.begin(), c_.end());
    poly_normalize(r1);
    QPoly t0, t1 = {Rational(1)};
    while (poly_degree(r1) > 0) {
      auto [q, r2] = poly_divmod(r0, r1);
      QPoly t2 = poly_sub(t0, poly_mul(q, t1));
      r0 = std::move(r1);
      r1 = std::move(r2);
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
    if (r1.empty())
      throw DomainError("NotInvertible",
                        "zero divisor encountered; the minimal polynomial is not irreducible");
    QPoly inv = poly_scale(t1, Rational(1) / r1[0]);
    QPoly red = poly_divmod(inv, field_->modulus()).second;
    red.resize(field_->degree(), Rational(0));
    return FieldElement(field_, std::vector<Rational>(red.begin(), red.end()));
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    return a * b.inverse();
  }

  bool operator==(const FieldElement& o) const {
    return field_->compatible(*o.field_) && c_ == o.c_;
  }

  // Exact polynomial evaluation over the residue coefficients.
  Rational eval_at(const Rational& x) const {
    QPoly p(c_.begin(), c_.end());
    return poly_eval(p, x);
  }

 private:
  void require_same_field(const FieldElement& o) const {
    if (field_.get() == o.field_.get()) return;
    if (!field_ || !o.field_ || !field_->compatible(*o.field_))
      throw DomainError("FieldMismatch", "operands belong to different number fields");
  }
  void reduce_if_needed() {
    if (static_cast<int>(c_.size()) != field_->degree())
      throw DomainError("InvalidNumberField", "coefficient vector length exceeds field degree");
  }

  FieldPtr field_;
  std::vector<Rational> c_;
};

// Sign of the element's real value. Canonically-zero elements report 0; for a
// nonzero element of an irreducible field the refinement terminates. The
// budget caps interval halvings; exceeding it is diagnosed (zero divisor of a
// reducible modulus vs. genuine budget exhaustion).
inline int field_sign(const FieldElement& e, int budget = 256) {
  if (e.is_zero()) return 0;
  const NumberField& nf = *e.field();
  if (nf.exact_root()) return sgn(e.eval_at(*nf.exact_root()));
  QPoly p(e.coeffs().begin(), e.coeffs().end());
  poly_normalize(p);
  Rational lo = nf.root_lo(), hi = nf.root_hi();
  for (int it = 0; it <= budget; ++it) {
    auto [a, b] = poly_eval_interval(p, lo, hi);
    if (sgn(a) > 0) return 1;
    if (sgn(b) < 0) return -1;
    if (it == budget) break;
    nf.bisect(lo, hi);
  }
  QPoly g = poly_gcd(p, nf.modulus());
  if (poly_degree(g) > 0 && sturm_root_count(g, lo, hi) > 0)
    throw DomainError("NotInvertible",
                      "element is a zero divisor; the minimal polynomial is not irreducible");
  throw DomainError("RefinementBudgetExceeded", "field_sign did not separate from zero");
}

inline int field_cmp(const FieldElement& a, const FieldElement& b) { return field_sign(a - b); }

// Outward rational enclosure of the element's value after `halvings` interval
// bisections (64 by default, per the pattern-generation design decision).
inline std::pair<Rational, Rational> field_enclosure(const FieldElement& e, int halvings = 64) {
  const NumberField& nf = *e.field();
  if (nf.exact_root()) {
    Rational v = e.eval_at(*nf.exact_root());
    return {v, v};
  }
  Rational lo = nf.root_lo(), hi = nf.root_hi();
  for (int i = 0; i < halvings; ++i) nf.bisect(lo, hi);
  QPoly p(e.coeffs().begin(), e.coeffs().end());
  poly_normalize(p);
  return poly_eval_interval(p, lo, hi);
}

// --- decimal rendering -------------------------------------------------------

inline Integer pow10(long e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return p;
}

// Rounds |num/den| to `digits` significant digits (ties away from zero) and
// renders a plain decimal string.
inline std::string decimal_string(const Rational& v, int digits = 12) {
  if (sgn(v) == 0) return "0";
  Integer a = abs(v.get_num()), b = v.get_den();
  // e = floor(log10(a/b)), found by comparison.
  long e = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 10));
  auto cmp_pow = [&](long k) {
    // sign of a/b - 10^k
    if (k >= 0) return cmp(a, b * pow10(k));
    return cmp(a * pow10(-k), b);
  };
  while (cmp_pow(e) < 0) --e;
  while (cmp_pow(e + 1) >= 0) ++e;
  long scale = digits - 1 - e;
  Integer num = a, den = b;
  if (scale >= 0)
    num *= pow10(scale);
  else
    den *= pow10(-scale);
  Integer mantissa = floor_div(2 * num + den, 2 * den);  // nearest, ties away from zero
  if (mantissa == pow10(digits)) {
    mantissa = pow10(digits - 1);
    ++e;
  }
  std::string m = mantissa.get_str();
  std::string out;
  if (e >= digits - 1) {
    out = m + std::string(static_cast<std::size_t>(e - digits + 1), '0');
  } else if (e >= 0) {
    std::string ip = m.substr(0, static_cast<std::size_t>(e + 1));
    std::string fp = m.substr(static_cast<std::size_t>(e + 1));
    while (!fp.empty() && fp.back() == '0') fp.pop_back();
    out = fp.empty() ? ip : ip + "." + fp;
  } else {
    std::string fp = std::string(static_cast<std::size_t>(-e - 1), '0') + m;
    while (!fp.empty() && fp.back() == '0') fp.pop_back();
    out = "0." + fp;
  }
  return (sgn(v) < 0 ? "-" : "") + out;
}

inline std::string to_decimal(const FieldElement& e, int digits = 12) {
  if (e.is_rational()) return decimal_string(e.as_rational(), digits);
  Rational lo = e.field()->root_lo(), hi = e.field()->root_hi();
  std::pair<Rational, Rational> enc = field_enclosure(e, 64);
  int extra = 0;
  Rational width = enc.second - enc.first;
  Rational target = make_rational(1, 1);
  for (int i = 0; i < digits + 8; ++i) target /= 10;
  while (width > target && extra < 12) {
    enc = field_enclosure(e, 64 + 16 * (++extra));
    width = enc.second - enc.first;
  }
  return decimal_string((enc.first + enc.second) / 2, digits);
}

// --- vectors and matrices over the field ------------------------------------

using FieldVector = std::vector<FieldElement>;
using FieldMatrix = Matrix<FieldElement>;

inline bool elem_is_zero(const FieldElement& x) { return x.is_zero(); }
inline FieldElement elem_inv(const FieldElement& x) { return x.inverse(); }
inline FieldElement zero_like(const FieldElement& x) { return FieldElement::zero(x.field()); }
inline FieldElement one_like(const FieldElement& x) { return FieldElement::one(x.field()); }

// Power-basis expansion: a field element is deg rationals; a field vector of
// length n expands to n*deg rationals (blockwise).
inline std::vector<Rational> rational_coordinates(const FieldElement& e) { return e.coeffs(); }

inline std::vector<Rational> rational_coordinates(const FieldVector& v) {
  std::vector<Rational> out;
  for (const auto& e : v) {
    const auto& c = e.coeffs();
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

inline FieldVector field_vector_from_rational_blocks(const FieldPtr& f,
                                                     const std::vector<Rational>& flat) {
  const int deg = f->degree();
  if (flat.size() % deg != 0) throw DomainError("ShapeMismatch", "expansion length mismatch");
  FieldVector out;
  for (std::size_t i = 0; i < flat.size(); i += deg)
    out.push_back(FieldElement(f, std::vector<Rational>(flat.begin() + i, flat.begin() + i + deg)));
  return out;
}

inline FieldVector vec_add(const FieldVector& a, const FieldVector& b) {
  FieldVector r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] + b[i]);
  return r;
}
inline FieldVector vec_sub(const FieldVector& a, const FieldVector& b) {
  FieldVector r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] - b[i]);
  return r;
}
inline FieldVector vec_scale(const FieldElement& s, const FieldVector& a) {
  FieldVector r;
  for (const auto& x : a) r.push_back(s * x);
  return r;
}
inline bool vec_is_zero(const FieldVector& a) {
  for (const auto& x : a)
    if (!x.is_zero()) return false;
  return true;
}

// Standard-coordinate dot product (used in ambient R^N computations).
inline FieldElement vec_dot(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size() || a.empty()) {
    if (a.size() != b.size()) throw DomainError("ShapeMismatch", "dot product length mismatch");
    throw DomainError("ShapeMismatch", "dot product of empty vectors");
  }
  FieldElement acc = FieldElement::zero(a[0].field());
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

// Functional application: coefficients `n` applied to coordinates `x`.
inline FieldElement apply_functional(const FieldVector& n, const FieldVector& x) {
  return vec_dot(n, x);
}

inline FieldMatrix field_matrix_from_rows(std::vector<FieldVector> rows) {
  return FieldMatrix(std::move(rows));
}

inline std::string to_string(const FieldElement& e) {
  std::string s = "[";
  const auto& c = e.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += to_string(c[i]);
  }
  return s + "]";
}

}  // namespace projtop
