#pragma once

// Arbitrary-precision integer and rational scalars, backed by GMP, plus the
// small numeric helpers (gcd/lcm, floor/ceil of rationals, binomials, exact
// string round-trips) shared by every other header.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace projtop {

using Integer = mpz_class;
using Rational = mpq_class;

// Domain-level failures carry a stable error name so CLI/report layers can
// surface them verbatim.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// mpq_class(p, q) does not canonicalize; this helper always does.
inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw DomainError("DivisionByZero", "rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(long num, long den = 1) {
  return make_rational(Integer(num), Integer(den));
}

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// Floor division with sign convention floor(a/b), b != 0.
inline Integer floor_div(const Integer& a, const Integer& b) {
  if (b == 0) throw DomainError("DivisionByZero", "floor_div by zero");
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Integer floor_rational(const Rational& q) {
  return floor_div(q.get_num(), q.get_den());
}

inline Integer ceil_rational(const Rational& q) {
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return c;
}

inline int sign(const Integer& a) { return sgn(a); }
inline int sign(const Rational& a) { return sgn(a); }

inline Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return b;
}

inline std::string to_string(const Integer& a) { return a.get_str(); }

// Rationals render as "p" or "p/q" with q > 0 and gcd(p, q) = 1.
inline std::string to_string(const Rational& a) {
  if (a.get_den() == 1) return a.get_num().get_str();
  return a.get_num().get_str() + "/" + a.get_den().get_str();
}

// Parses "p" or "p/q" (optionally signed); the exact inverse of to_string.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw DomainError("ParseError", "empty rational literal");
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(Integer(text));
    }
    Integer num(text.substr(0, slash));
    Integer den(text.substr(slash + 1));
    return make_rational(num, den);
  } catch (const std::invalid_argument&) {
    throw DomainError("ParseError", "bad rational literal '" + text + "'");
  }
}

inline Integer lcm_of_denominators(const std::vector<Rational>& values) {
  Integer l = 1;
  for (const auto& v : values) l = lcm(l, v.get_den());
  return l;
}

}  // namespace projtop
