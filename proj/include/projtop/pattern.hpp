#pragma once

// Point pattern generation: the acceptance window as an exact zonotope
// H-representation, strip/projection point enumeration inside a radius, a
// boundary-witness scan for singular offsets, and CSV/SVG export.

#include <projtop/scheme.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace projtop {

struct UnsupportedDimension : DomainError {
  explicit UnsupportedDimension(const std::string& what)
      : DomainError("UnsupportedDimension", what) {}
};

// One slab of the window: lo <= <normal, y> <= hi in F-coordinates.  Each
// slab accounts for two parallel facets of the zonotope.
struct ZonotopeSlab {
  FieldVector normal;
  FieldElement lo, hi;
};

struct ZonotopeH {
  std::vector<ZonotopeSlab> slabs;
  std::size_t facet_count() const { return 2 * slabs.size(); }
};

// Facet slabs of the window K = pi_perp([0,1]^N): normals are kernels of the
// spanning (n-1)-subsets of generator projections, offsets come from the
// support function evaluated by exact sign tests.
inline ZonotopeH zonotope_facets(const ProjectionScheme& s, const SchemeInternal& in) {
  const FieldPtr& f = s.field;
  const std::size_t n = in.codim, N = in.ambient;
  const FieldElement zero = FieldElement::zero(f), one = FieldElement::one(f);

  std::vector<FieldVector> normals;
  if (n == 1) {
    normals.push_back({one});
  } else {
    std::vector<std::size_t> idx(n - 1);
    for (std::size_t i = 0; i < n - 1; ++i) idx[i] = i;
    std::vector<std::string> seen;
    do {
      FieldMatrix rows(n - 1, n, zero);
      for (std::size_t i = 0; i < n - 1; ++i)
        for (std::size_t j = 0; j < n; ++j) rows(i, j) = in.w[idx[i]][j];
      FieldMatrix ker = kernel_over_field(rows, one);
      if (ker.rows() != 1) continue;
      FieldVector nrm(n, zero);
      for (std::size_t j = 0; j < n; ++j) nrm[j] = ker(0, j);
      FieldElement off = zero;  // throwaway: normalization only
      normalize_functional(nrm, off);
      std::string key;
      for (const auto& c : nrm)
        for (const auto& q : c.coeffs()) key += q.get_str() + "|";
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      normals.push_back(std::move(nrm));
    } while (detail::next_combination(idx, N));
  }

  ZonotopeH out;
  for (auto& nrm : normals) {
    FieldElement lo = zero, hi = zero;
    for (std::size_t i = 0; i < N; ++i) {
      FieldElement v = detail::dot(nrm, in.w[i], f);
      if (v.is_zero()) continue;
      if (field_sign(v) > 0)
        hi = hi + v;
      else
        lo = lo + v;
    }
    out.slabs.push_back({std::move(nrm), std::move(lo), std::move(hi)});
  }
  return out;
}

struct PointPattern {
  FieldVector offset;                             // ambient offset u, length N
  Rational radius = Rational(0);                  // physical window radius
  std::vector<std::vector<Integer>> strip_points; // z with pi_perp(z+u) in K
  std::vector<FieldVector> projected;             // physical-basis coordinates, length d
};

namespace detail {

// Everything fixed across the points of one enumeration run.
struct PatternContext {
  const ProjectionScheme* s = nullptr;
  const SchemeInternal* in = nullptr;
  ZonotopeH window;
  FieldVector u;            // ambient offset
  FieldVector u_internal;   // F-coordinates of pi_perp(u)
  Rational radius_sq = Rational(0);
  std::vector<FieldVector> gram_rows;  // d x d physical Gram matrix
  std::vector<Integer> box_lo, box_hi;
};

inline PatternContext pattern_context(const ProjectionScheme& s, const SchemeInternal& in,
                                      const FieldVector& u, const Rational& radius) {
  if (radius < 0) throw DomainError("InvalidRadius", "window radius must be nonnegative");
  const FieldPtr& f = s.field;
  const std::size_t N = in.ambient, d = in.pattern_dim;
  const FieldElement zero = FieldElement::zero(f);

  PatternContext ctx;
  ctx.s = &s;
  ctx.in = &in;
  ctx.window = zonotope_facets(s, in);
  ctx.u = u;
  ctx.u_internal = internal_coordinates(in, f, u);
  ctx.radius_sq = radius * radius;
  ctx.gram_rows.assign(d, FieldVector(d, zero));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      ctx.gram_rows[i][j] = detail::dot(s.e_basis[i], s.e_basis[j], f);

  // Integer bounding box: z_i = p_i + q_i - u_i with |p_i| <= radius and q_i
  // ranging over the window's i-th coordinate extent; interval enclosures
  // round outward.
  for (std::size_t i = 0; i < N; ++i) {
    FieldElement qlo = zero, qhi = zero;
    for (std::size_t j = 0; j < N; ++j) {
      const FieldElement& v = in.pi_perp[i][j];
      if (v.is_zero()) continue;
      if (field_sign(v) > 0)
        qhi = qhi + v;
      else
        qlo = qlo + v;
    }
    auto lo_enc = field_enclosure(qlo - u[i]);
    auto hi_enc = field_enclosure(qhi - u[i]);
    ctx.box_lo.push_back(ceil_rational(lo_enc.first - radius));
    ctx.box_hi.push_back(floor_rational(hi_enc.second + radius));
  }
  return ctx;
}

// Exact tests on one candidate lattice point.  tight collects the indices of
// window inequalities met with equality (boundary detection).
struct MembershipResult {
  bool in_window = false;   // all slab inequalities hold (non-strictly)
  bool in_radius = false;   // |pi(z+u)| <= radius
  std::vector<std::size_t> tight;
  FieldVector physical;     // coordinates of pi(z+u) in the physical basis
};

inline MembershipResult test_point(const PatternContext& ctx, const std::vector<Integer>& z) {
  const FieldPtr& f = ctx.s->field;
  const SchemeInternal& in = *ctx.in;
  const FieldElement zero = FieldElement::zero(f);
  MembershipResult res;

  // Internal coordinates of pi_perp(z + u).
  FieldVector y = ctx.u_internal;
  for (std::size_t i = 0; i < in.ambient; ++i) {
    if (z[i] == 0) continue;
    FieldElement c = FieldElement::from_rational(f, Rational(z[i]));
    for (std::size_t t = 0; t < in.codim; ++t) y[t] = y[t] + c * in.w[i][t];
  }
  res.in_window = true;
  for (std::size_t j = 0; j < ctx.window.slabs.size(); ++j) {
    const auto& slab = ctx.window.slabs[j];
    FieldElement v = detail::dot(slab.normal, y, f);
    FieldElement a = v - slab.lo, b = slab.hi - v;
    int sa = a.is_zero() ? 0 : field_sign(a);
    int sb = b.is_zero() ? 0 : field_sign(b);
    if (sa < 0 || sb < 0) {
      res.in_window = false;
      res.tight.clear();
      return res;
    }
    if (sa == 0 || sb == 0) res.tight.push_back(j);
  }

  // Physical coordinates of pi(z + u): solve G c = B (z + u); the squared
  // length is c^T G c.
  FieldVector x(in.ambient, zero);
  for (std::size_t i = 0; i < in.ambient; ++i)
    x[i] = FieldElement::from_rational(f, Rational(z[i])) + ctx.u[i];
  const std::size_t d = in.pattern_dim;
  FieldVector bx(d, zero);
  for (std::size_t i = 0; i < d; ++i) {
    FieldElement v = zero;
    for (std::size_t j = 0; j < in.ambient; ++j) v = v + ctx.s->e_basis[i][j] * x[j];
    bx[i] = v;
  }
  res.physical = detail::solve_square(ctx.gram_rows, bx, f);
  FieldElement norm2 = zero;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      norm2 = norm2 + res.physical[i] * ctx.gram_rows[i][j] * res.physical[j];
  FieldElement gap = FieldElement::from_rational(f, ctx.radius_sq) - norm2;
  res.in_radius = gap.is_zero() || field_sign(gap) > 0;
  return res;
}

}  // namespace detail

// The strip point pattern: all z in Z^N with pi_perp(z+u) in the window and
// pi(z+u) within the physical radius, plus their physical projections.
inline PointPattern generate_pattern(const ProjectionScheme& s, const SchemeInternal& in,
                                     const FieldVector& u, const Rational& radius) {
  detail::PatternContext ctx = detail::pattern_context(s, in, u, radius);
  PointPattern out;
  out.offset = u;
  out.radius = radius;

  const std::size_t N = in.ambient;
  std::vector<Integer> z(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (ctx.box_lo[i] > ctx.box_hi[i]) return out;  // empty box
    z[i] = ctx.box_lo[i];
  }
  while (true) {
    auto res = detail::test_point(ctx, z);
    if (res.in_window && res.in_radius) {
      out.strip_points.push_back(z);
      out.projected.push_back(res.physical);
    }
    std::size_t i = N;
    while (i > 0 && z[i - 1] == ctx.box_hi[i - 1]) {
      z[i - 1] = ctx.box_lo[i - 1];
      --i;
    }
    if (i == 0) break;
    z[i - 1] += 1;
  }
  return out;
}

struct SingularWitness {
  std::vector<Integer> z;
  std::vector<std::size_t> tight_facets;  // slab indices met with equality
};

// Boundary witnesses: lattice points within the radius whose internal image
// lies exactly on the window boundary.  An empty result bounds nothing
// outside the scanned radius.
inline std::vector<SingularWitness> singularity_scan(const ProjectionScheme& s,
                                                     const SchemeInternal& in,
                                                     const FieldVector& u,
                                                     const Rational& radius) {
  detail::PatternContext ctx = detail::pattern_context(s, in, u, radius);
  std::vector<SingularWitness> out;
  const std::size_t N = in.ambient;
  std::vector<Integer> z(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (ctx.box_lo[i] > ctx.box_hi[i]) return out;
    z[i] = ctx.box_lo[i];
  }
  while (true) {
    auto res = detail::test_point(ctx, z);
    if (res.in_window && res.in_radius && !res.tight.empty()) out.push_back({z, res.tight});
    std::size_t i = N;
    while (i > 0 && z[i - 1] == ctx.box_hi[i - 1]) {
      z[i - 1] = ctx.box_lo[i - 1];
      --i;
    }
    if (i == 0) break;
    z[i - 1] += 1;
  }
  return out;
}

// --- export -----------------------------------------------------------------

// Exact coefficient rendering "c0;c1;...": coordinates of the element over
// the field's power basis, each as a plain rational.
inline std::string exact_string(const FieldElement& e) {
  std::string out;
  const auto& c = e.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ";";
    out += c[i].get_str();
  }
  return out;
}

inline void export_csv(const PointPattern& p, std::ostream& os, int digits = 12) {
  const std::size_t N = p.offset.size();
  const std::size_t d = p.projected.empty() ? 0 : p.projected[0].size();
  for (std::size_t i = 0; i < N; ++i) os << "z" << i << ",";
  if (p.projected.empty()) {
    os << "proj,proj_decimal\n";
    return;
  }
  for (std::size_t j = 0; j < d; ++j) os << "proj" << j << ",";
  for (std::size_t j = 0; j < d; ++j) os << "proj" << j << "_decimal" << (j + 1 < d ? "," : "");
  os << "\n";
  for (std::size_t row = 0; row < p.strip_points.size(); ++row) {
    for (std::size_t i = 0; i < N; ++i) os << p.strip_points[row][i].get_str() << ",";
    for (std::size_t j = 0; j < d; ++j) os << exact_string(p.projected[row][j]) << ",";
    for (std::size_t j = 0; j < d; ++j)
      os << to_decimal(p.projected[row][j], digits) << (j + 1 < d ? "," : "");
    os << "\n";
  }
}

// Scatter plot of the projected points.  The physical basis is generally not
// orthonormal, so points are mapped to an orthonormal frame (numerically, for
// display only) before plotting; 3-d patterns pick two orthonormal axes.
inline void export_svg(const ProjectionScheme& s, const PointPattern& p, std::ostream& os,
                       std::pair<std::size_t, std::size_t> axes = {0, 1}) {
  const std::size_t d = s.pattern_dim;
  if (d < 2 || d > 3)
    throw UnsupportedDimension("SVG export needs a 2- or 3-dimensional pattern");
  if (axes.first >= d || axes.second >= d || axes.first == axes.second)
    throw UnsupportedDimension("SVG projection axes out of range");

  // Numeric orthonormal frame for the physical basis (Gram-Schmidt on the
  // decimal embedding).
  const std::size_t N = s.ambient;
  std::vector<std::vector<double>> basis(d, std::vector<double>(N));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < N; ++j) basis[i][j] = std::stod(to_decimal(s.e_basis[i][j], 17));
  std::vector<std::vector<double>> frame;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> v = basis[i];
    for (const auto& prev : frame) {
      double dotp = 0;
      for (std::size_t j = 0; j < N; ++j) dotp += v[j] * prev[j];
      for (std::size_t j = 0; j < N; ++j) v[j] -= dotp * prev[j];
    }
    double len = 0;
    for (double x : v) len += x * x;
    len = std::sqrt(len);
    for (double& x : v) x /= len;
    frame.push_back(std::move(v));
  }

  const double r = p.radius.get_d();
  const double pad = 1.0, span = 2 * (r + pad);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -(r + pad) << " " << -(r + pad)
     << " " << span << " " << span << "\">\n";
  for (std::size_t row = 0; row < p.projected.size(); ++row) {
    // physical coordinates -> ambient embedding -> orthonormal frame
    std::vector<double> amb(N, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double c = std::stod(to_decimal(p.projected[row][i], 17));
      for (std::size_t j = 0; j < N; ++j) amb[j] += c * basis[i][j];
    }
    double cx = 0, cy = 0;
    for (std::size_t j = 0; j < N; ++j) {
      cx += amb[j] * frame[axes.first][j];
      cy += amb[j] * frame[axes.second][j];
    }
    os << "  <circle cx=\"" << cx << "\" cy=\"" << -cy << "\" r=\"0.3\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace projtop
