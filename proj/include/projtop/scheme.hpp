#pragma once

// Cut-and-project scheme data and its internal-space reduction.
//
// A scheme is an integer lattice Z^N together with an irrationally sloped
// d-dimensional subspace E (the physical space) and an offset u.  Everything
// downstream lives in the orthocomplement F = E-perp: the lattice directions
// that happen to lie inside F form a sublattice Delta, its real span U splits
// off as a discrete factor, and the remaining subspace V carries a dense
// finitely generated translation group.  This header derives that data
// exactly, enumerates the window-face orientations, and turns the face
// hyperplanes into the (V, Gamma, W) input consumed by Arrangement.

#include <projtop/arrangement.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace projtop {

struct InvalidScheme : DomainError {
  explicit InvalidScheme(const std::string& what) : DomainError("InvalidScheme", what) {}
};

struct ProjectionScheme {
  FieldPtr field;
  std::size_t ambient = 0;          // N
  std::size_t pattern_dim = 0;      // d
  std::vector<FieldVector> e_basis; // d independent rows of length N spanning E
  FieldVector shift;                // u, length N (zero when omitted)
  std::string label;
};

struct SchemeCheck {
  std::string check;
  bool pass = false;
  std::string detail;
};

struct SchemeDiagnostics {
  bool ok = true;
  std::vector<SchemeCheck> checks;

  void add(const std::string& check, bool pass, const std::string& detail = "") {
    checks.push_back({check, pass, detail});
    ok = ok && pass;
  }
};

// Everything derived from a validated scheme.  Coordinates on F are always
// taken in the mixed basis [delta rows | v rows]: the first rk_delta entries
// of an F-vector are lattice coordinates on the discrete factor U, the last
// dim_v entries are coordinates on V in the (orthogonal, unnormalised)
// Gram-Schmidt basis.
struct SchemeInternal {
  std::size_t ambient = 0;      // N
  std::size_t pattern_dim = 0;  // d
  std::size_t codim = 0;        // n = N - d = dim F

  Lattice delta;                // integer vectors orthogonal to E (inside Z^N)
  std::size_t rk_delta = 0;     // k
  std::size_t dim_v = 0;        // m = n - k
  std::size_t gamma_rank = 0;   // r = N - k
  Rational nu;                  // r / m

  std::vector<FieldVector> pi_e;     // N x N orthogonal projection onto E
  std::vector<FieldVector> pi_perp;  // N x N orthogonal projection onto F
  std::vector<FieldVector> v_basis;  // m orthogonal rows of length N spanning V

  std::vector<FieldVector> w;   // F-coordinates of pi_perp(e_i), length n, i = 0..N-1
  FieldVector u_perp;           // F-coordinates of pi_perp(u)

  IntegerMatrix gamma_preimage; // r x N, basis of {z in Z^N : z orthogonal to delta}
  std::vector<FieldVector> gamma; // V-coordinates (length m) of the preimage rows
  RatLattice delta_tilde;       // U-coordinates (delta-basis, Q^k) of pi_U(Z^N)
};

namespace detail {

// Solve A x = b for a square field matrix given by rows; the callers only
// ever pass invertible Gram matrices.
inline FieldVector solve_square(const std::vector<FieldVector>& rows, const FieldVector& b,
                                const FieldPtr& f) {
  FieldMatrix a(rows.size(), rows.empty() ? 0 : rows[0].size(), FieldElement::zero(f));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  auto x = solve_over_field(a, b, FieldElement::one(f));
  if (!x) throw InvalidScheme("singular Gram system");
  return *x;
}

// Expand an N x N field matrix into the (N * degree) x N rational matrix whose
// kernel over Z is the integer kernel of the field matrix.
inline RationalMatrix expand_field_rows(const std::vector<FieldVector>& rows, std::size_t deg) {
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  RationalMatrix out(rows.size() * deg, n, Rational(0));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const auto& c = rows[i][j].coeffs();
      for (std::size_t t = 0; t < deg; ++t) out(i * deg + t, j) = c[t];
    }
  return out;
}

inline FieldElement dot(const FieldVector& a, const FieldVector& b, const FieldPtr& f) {
  FieldElement s = FieldElement::zero(f);
  for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

inline std::string subset_string(const std::vector<std::size_t>& j) {
  std::string s = "{";
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(j[i]);
  }
  return s + "}";
}

// Columns of the mixed F-basis [delta rows | V rows], as an N x n matrix to
// solve against when expressing internal vectors in F-coordinates.
inline FieldMatrix mixed_basis_columns(const Lattice& delta,
                                       const std::vector<FieldVector>& v_basis,
                                       std::size_t ambient, const FieldPtr& f) {
  const std::size_t k = delta.rank(), m = v_basis.size();
  FieldMatrix cols(ambient, k + m, FieldElement::zero(f));
  for (std::size_t i = 0; i < ambient; ++i) {
    for (std::size_t t = 0; t < k; ++t)
      cols(i, t) = FieldElement::from_rational(f, Rational(delta.basis()(t, i)));
    for (std::size_t t = 0; t < m; ++t) cols(i, k + t) = v_basis[t][i];
  }
  return cols;
}

}  // namespace detail

// --- core derivation -------------------------------------------------------

inline SchemeInternal derive_internal(const ProjectionScheme& s) {
  const FieldPtr& f = s.field;
  if (!f) throw InvalidScheme("missing number field");
  const std::size_t N = s.ambient, d = s.pattern_dim;
  if (d == 0 || d >= N) throw InvalidScheme("pattern dimension must satisfy 0 < d < N");
  if (s.e_basis.size() != d) throw InvalidScheme("physical basis must have d rows");
  for (const auto& row : s.e_basis)
    if (row.size() != N) throw InvalidScheme("physical basis row of wrong length");
  if (!s.shift.empty() && s.shift.size() != N) throw InvalidScheme("offset of wrong length");

  const std::size_t deg = static_cast<std::size_t>(f->degree());
  const FieldElement zero = FieldElement::zero(f), one = FieldElement::one(f);

  SchemeInternal out;
  out.ambient = N;
  out.pattern_dim = d;
  out.codim = N - d;

  if (rank_over_field(field_matrix_from_rows(s.e_basis)) != d)
    throw InvalidScheme("physical basis rows are dependent");

  // Orthogonal projection onto E: columns of B^T (B B^T)^{-1} B.
  std::vector<FieldVector> gram(d, FieldVector(d, zero));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) gram[i][j] = detail::dot(s.e_basis[i], s.e_basis[j], f);

  out.pi_e.assign(N, FieldVector(N, zero));
  out.pi_perp.assign(N, FieldVector(N, zero));
  for (std::size_t col = 0; col < N; ++col) {
    FieldVector be(d, zero);
    for (std::size_t i = 0; i < d; ++i) be[i] = s.e_basis[i][col];
    FieldVector c = detail::solve_square(gram, be, f);
    for (std::size_t row = 0; row < N; ++row) {
      FieldElement v = zero;
      for (std::size_t i = 0; i < d; ++i) v = v + s.e_basis[i][row] * c[i];
      out.pi_e[row][col] = v;
      out.pi_perp[row][col] = (row == col ? one : zero) - v;
    }
  }

  // Irrational slope: no nonzero lattice vector may lie inside E, else the
  // pattern has a periodic direction and the projection analysis below does
  // not apply.
  if (integer_kernel(detail::expand_field_rows(out.pi_perp, deg)).rows() != 0)
    throw DomainError("RationalDirection", "the physical space contains a lattice vector");

  // Delta = E-perp intersected with Z^N = integer kernel of pi_E.
  out.delta = Lattice::from_rows(integer_kernel(detail::expand_field_rows(out.pi_e, deg)));
  out.rk_delta = out.delta.rank();
  const std::size_t k = out.rk_delta;
  if (out.codim < k) throw InvalidScheme("delta rank exceeds the codimension");
  out.dim_v = out.codim - k;
  const std::size_t m = out.dim_v;
  if (m == 0)
    throw InvalidScheme("internal space is fully periodic (dim V = 0)");

  // V = the orthocomplement of span(delta) inside E-perp: simultaneous kernel
  // of pi_E (membership in E-perp) and the delta inner products.
  std::vector<FieldVector> stacked = out.pi_e;
  for (std::size_t i = 0; i < k; ++i) {
    FieldVector row(N, zero);
    for (std::size_t j = 0; j < N; ++j)
      row[j] = FieldElement::from_rational(f, Rational(out.delta.basis()(i, j)));
    stacked.push_back(row);
  }
  FieldMatrix vkernel = kernel_over_field(field_matrix_from_rows(stacked), one);
  if (vkernel.rows() != m) throw InvalidScheme("internal space has unexpected dimension");

  // Orthogonal (unnormalised) basis of V.
  out.v_basis.clear();
  for (std::size_t i = 0; i < m; ++i) {
    FieldVector v(N, zero);
    for (std::size_t j = 0; j < N; ++j) v[j] = vkernel(i, j);
    for (const auto& prev : out.v_basis) {
      FieldElement coef = detail::dot(v, prev, f) * detail::dot(prev, prev, f).inverse();
      for (std::size_t j = 0; j < N; ++j) v[j] = v[j] - coef * prev[j];
    }
    out.v_basis.push_back(std::move(v));
  }

  // Mixed-basis coordinates on F: solve [delta^T | v^T] xi = x.
  const std::size_t n = out.codim;
  FieldMatrix fcols = detail::mixed_basis_columns(out.delta, out.v_basis, N, f);
  auto f_coords = [&](const FieldVector& x) -> FieldVector {
    auto xi = solve_over_field(fcols, x, one);
    if (!xi) throw InvalidScheme("vector outside the internal space");
    return *xi;
  };

  out.w.clear();
  std::vector<std::vector<Rational>> u_rows;  // pi_U(e_i) in delta coordinates
  for (std::size_t i = 0; i < N; ++i) {
    FieldVector col(N, zero);
    for (std::size_t row = 0; row < N; ++row) col[row] = out.pi_perp[row][i];
    FieldVector wi = f_coords(col);
    std::vector<Rational> urow;
    for (std::size_t t = 0; t < k; ++t) {
      if (!wi[t].is_rational())
        throw DomainError("InternalCheck", "discrete-factor coordinate is irrational");
      urow.push_back(wi[t].as_rational());
    }
    u_rows.push_back(std::move(urow));
    out.w.push_back(std::move(wi));
  }
  out.delta_tilde = RatLattice::from_rows(u_rows, k);

  if (s.shift.empty()) {
    out.u_perp.assign(n, zero);
  } else {
    FieldVector pu(N, zero);
    for (std::size_t row = 0; row < N; ++row) {
      FieldElement v = zero;
      for (std::size_t j = 0; j < N; ++j) v = v + out.pi_perp[row][j] * s.shift[j];
      pu[row] = v;
    }
    out.u_perp = f_coords(pu);
  }

  // The translation group on V: projections of the integer vectors orthogonal
  // to delta.  (Integer vectors with a nonzero component along U would push
  // translated face planes off the singular family, so they act elsewhere.)
  if (k == 0) {
    IntegerMatrix id(N, N, Integer(0));
    for (std::size_t i = 0; i < N; ++i) id(i, i) = 1;
    out.gamma_preimage = id;
  } else {
    RationalMatrix dmat(k, N, Rational(0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < N; ++j) dmat(i, j) = Rational(out.delta.basis()(i, j));
    out.gamma_preimage = integer_kernel(dmat);
  }
  out.gamma_rank = out.gamma_preimage.rows();
  if (out.gamma_rank != N - k)
    throw DomainError("InternalCheck", "translation group has unexpected rank");

  out.gamma.clear();
  for (std::size_t t = 0; t < out.gamma_rank; ++t) {
    FieldVector z(N, zero);
    for (std::size_t j = 0; j < N; ++j)
      z[j] = FieldElement::from_rational(f, Rational(out.gamma_preimage(t, j)));
    FieldVector pz(N, zero);
    for (std::size_t row = 0; row < N; ++row) {
      FieldElement v = zero;
      for (std::size_t j = 0; j < N; ++j) v = v + out.pi_perp[row][j] * z[j];
      pz[row] = v;
    }
    FieldVector xi = f_coords(pz);
    for (std::size_t u = 0; u < k; ++u)
      if (!xi[u].is_zero())
        throw DomainError("InternalCheck", "translation generator leaks into the discrete factor");
    out.gamma.emplace_back(xi.begin() + static_cast<std::ptrdiff_t>(k), xi.end());
  }
  if (rank_over_field(field_matrix_from_rows(out.gamma)) != m)
    throw DomainError("InternalCheck", "translation group does not span the internal space");

  out.nu = make_rational(Integer(out.gamma_rank), Integer(m));
  return out;
}

// F-coordinates (mixed basis) of the internal projection of an arbitrary
// ambient vector.
inline FieldVector internal_coordinates(const SchemeInternal& in, const FieldPtr& f,
                                        const FieldVector& x) {
  if (x.size() != in.ambient) throw InvalidScheme("ambient vector of wrong length");
  const FieldElement zero = FieldElement::zero(f);
  FieldVector px(in.ambient, zero);
  for (std::size_t row = 0; row < in.ambient; ++row) {
    FieldElement v = zero;
    for (std::size_t j = 0; j < in.ambient; ++j) v = v + in.pi_perp[row][j] * x[j];
    px[row] = v;
  }
  FieldMatrix cols = detail::mixed_basis_columns(in.delta, in.v_basis, in.ambient, f);
  auto xi = solve_over_field(cols, px, FieldElement::one(f));
  if (!xi) throw InvalidScheme("vector outside the internal space");
  return *xi;
}

// --- window condition ------------------------------------------------------

// Decide whether some lattice translate of `point` lands in the interior of
// the zonotope spanned by `generators` (rational, ambient dimension k; the
// point may have irrational coordinates).  Exact H-representation membership
// via sign tests; the translate search is a bounded coefficient box around
// the zonotope, bounded outward through interval enclosures.
inline bool window_hits_interior(const FieldPtr& f,
                                 const std::vector<std::vector<Rational>>& generators,
                                 const RatLattice& translations, const FieldVector& point) {
  const std::size_t k = point.size();
  if (k == 0) return true;

  // Facet functionals of the zonotope: kernels of (k-1)-subsets of generators.
  std::vector<std::vector<Rational>> normals;
  if (generators.size() < k) return false;  // cannot span: empty interior
  if (k == 1) {
    normals.push_back({Rational(1)});
  } else {
    std::vector<std::size_t> idx(k - 1);
    for (std::size_t i = 0; i < k - 1; ++i) idx[i] = i;
    do {
      RationalMatrix sel(k - 1, k, Rational(0));
      for (std::size_t i = 0; i < k - 1; ++i)
        for (std::size_t j = 0; j < k; ++j) sel(i, j) = generators[idx[i]][j];
      RationalMatrix ker = kernel_over_field(sel, Rational(1));
      if (ker.rows() != 1) continue;
      std::vector<Rational> nrm(k);
      for (std::size_t j = 0; j < k; ++j) nrm[j] = ker(0, j);
      normals.push_back(std::move(nrm));
    } while (detail::next_combination(idx, generators.size()));
    if (normals.empty()) return false;  // generators do not span: no interior
  }

  struct Facet {
    std::vector<Rational> normal;
    Rational lo, hi;
  };
  std::vector<Facet> facets;
  for (auto& nrm : normals) {
    Rational lo(0), hi(0);
    for (const auto& g : generators) {
      Rational v(0);
      for (std::size_t j = 0; j < k; ++j) v += nrm[j] * g[j];
      if (v > 0) hi += v;
      if (v < 0) lo += v;
    }
    if (lo == hi) return false;  // zonotope is flat: empty interior
    facets.push_back({std::move(nrm), lo, hi});
  }

  // Strict interior test, exact even for irrational coordinates.
  auto strictly_inside = [&](const FieldVector& x) {
    for (const auto& fc : facets) {
      FieldElement v = FieldElement::zero(f);
      for (std::size_t j = 0; j < k; ++j)
        v = v + FieldElement::from_rational(f, fc.normal[j]) * x[j];
      FieldElement a = v - FieldElement::from_rational(f, fc.lo);
      FieldElement b = FieldElement::from_rational(f, fc.hi) - v;
      if (a.is_zero() || b.is_zero()) return false;
      if (field_sign(a) < 0 || field_sign(b) < 0) return false;
    }
    return true;
  };

  const std::size_t rk = translations.rank();
  if (rk == 0) return strictly_inside(point);

  // Bound each coordinate of K - point by the zonotope's per-axis extents;
  // irrational point coordinates are widened outward to rational enclosures.
  std::vector<Rational> axis_lo(k, Rational(0)), axis_hi(k, Rational(0));
  for (std::size_t j = 0; j < k; ++j) {
    Rational glo(0), ghi(0);
    for (const auto& g : generators) {
      if (g[j] > 0) ghi += g[j];
      if (g[j] < 0) glo += g[j];
    }
    axis_lo[j] = glo - field_enclosure(point[j]).second;
    axis_hi[j] = ghi - field_enclosure(point[j]).first;
  }
  // Dual functionals d_t with d_t . basis_row_s = delta_ts (rows of
  // (B B^T)^{-1} B); interval propagation of each through the axis box gives
  // sound bounds on the lattice coefficients of any translate in the box.
  std::vector<std::vector<Rational>> bgram(rk, std::vector<Rational>(rk, Rational(0)));
  for (std::size_t a = 0; a < rk; ++a) {
    auto ra = translations.basis_row(a);
    for (std::size_t b = 0; b < rk; ++b) {
      auto rb = translations.basis_row(b);
      for (std::size_t j = 0; j < k; ++j) bgram[a][b] += ra[j] * rb[j];
    }
  }
  RationalMatrix gm(rk, rk, Rational(0));
  for (std::size_t a = 0; a < rk; ++a)
    for (std::size_t b = 0; b < rk; ++b) gm(a, b) = bgram[a][b];
  std::vector<Rational> c_lo(rk, Rational(0)), c_hi(rk, Rational(0));
  for (std::size_t t = 0; t < rk; ++t) {
    std::vector<Rational> e(rk, Rational(0));
    e[t] = Rational(1);
    auto y = solve_over_field(gm, e, Rational(1));
    if (!y) return false;  // dependent basis rows cannot happen for a lattice
    std::vector<Rational> dual(k, Rational(0));
    for (std::size_t a = 0; a < rk; ++a) {
      auto ra = translations.basis_row(a);
      for (std::size_t j = 0; j < k; ++j) dual[j] += (*y)[a] * ra[j];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (dual[j] > 0) {
        c_lo[t] += dual[j] * axis_lo[j];
        c_hi[t] += dual[j] * axis_hi[j];
      } else if (dual[j] < 0) {
        c_lo[t] += dual[j] * axis_hi[j];
        c_hi[t] += dual[j] * axis_lo[j];
      }
    }
  }

  std::vector<Integer> lo(rk), hi(rk);
  Integer total = 1;
  for (std::size_t t = 0; t < rk; ++t) {
    lo[t] = ceil_rational(c_lo[t]);
    hi[t] = floor_rational(c_hi[t]);
    if (hi[t] < lo[t]) return false;
    total *= hi[t] - lo[t] + 1;
    if (total > 2000000) throw DomainError("EnumerationBudget", "window translate box too large");
  }

  std::vector<Integer> c(rk);
  for (std::size_t t = 0; t < rk; ++t) c[t] = lo[t];
  while (true) {
    FieldVector x(point);
    for (std::size_t t = 0; t < rk; ++t) {
      auto row = translations.basis_row(t);
      for (std::size_t j = 0; j < k; ++j)
        x[j] = x[j] + FieldElement::from_rational(f, Rational(c[t]) * row[j]);
    }
    if (strictly_inside(x)) return true;
    std::size_t t = 0;
    while (t < rk && c[t] == hi[t]) {
      c[t] = lo[t];
      ++t;
    }
    if (t == rk) return false;
    c[t] += 1;
  }
}

inline SchemeDiagnostics validate_scheme(const ProjectionScheme& s) {
  SchemeDiagnostics diag;
  if (!s.field || s.ambient == 0 || s.pattern_dim == 0 || s.pattern_dim >= s.ambient ||
      s.e_basis.size() != s.pattern_dim) {
    diag.add("shape", false, "need a field, 0 < d < N and d physical basis rows");
    return diag;
  }
  for (const auto& row : s.e_basis)
    if (row.size() != s.ambient) {
      diag.add("shape", false, "physical basis row of wrong length");
      return diag;
    }
  if (!s.shift.empty() && s.shift.size() != s.ambient) {
    diag.add("shape", false, "offset of wrong length");
    return diag;
  }
  if (rank_over_field(field_matrix_from_rows(s.e_basis)) != s.pattern_dim) {
    diag.add("shape", false, "physical basis rows are dependent");
    return diag;
  }
  diag.add("shape", true);

  SchemeInternal in;
  try {
    in = derive_internal(s);
  } catch (const DomainError& e) {
    if (e.name() == "RationalDirection") {
      diag.add("irrational-slope", false, e.what());
    } else {
      diag.add("derivation", false, e.what());
    }
    return diag;
  }
  diag.add("derivation", true,
           "rk delta = " + std::to_string(in.rk_delta) +
               ", dim V = " + std::to_string(in.dim_v) +
               ", rk gamma = " + std::to_string(in.gamma_rank));
  diag.add("irrational-slope", true);

  // Window condition: some discrete-factor translate of the offset's U-shadow
  // must land inside the interior of the window's U-shadow.
  if (in.rk_delta == 0) {
    diag.add("window", true, "no discrete factor");
  } else {
    std::vector<std::vector<Rational>> gens;
    for (std::size_t i = 0; i < in.ambient; ++i) {
      std::vector<Rational> g;
      for (std::size_t t = 0; t < in.rk_delta; ++t) g.push_back(in.w[i][t].as_rational());
      gens.push_back(std::move(g));
    }
    FieldVector p(in.u_perp.begin(), in.u_perp.begin() + static_cast<std::ptrdiff_t>(in.rk_delta));
    bool hit = window_hits_interior(s.field, gens, in.delta_tilde, p);
    diag.add("window", hit, hit ? "" : "EmptyWindow: the offset strip misses the window");
  }
  return diag;
}

// --- face orientations and the singular hyperplane family -------------------

struct Orientations {
  std::vector<std::vector<std::size_t>> istar;    // (n-1)-subsets spanning a window face
  std::vector<std::vector<std::size_t>> istar_v;  // those whose face plane cuts V properly
};

inline Orientations enumerate_orientations(const SchemeInternal& in, const FieldPtr& f) {
  Orientations out;
  const std::size_t n = in.codim, m = in.dim_v, N = in.ambient;
  if (n < 2) return out;  // codimension one has no proper face orientations

  std::vector<std::size_t> idx(n - 1);
  for (std::size_t i = 0; i < n - 1; ++i) idx[i] = i;
  do {
    std::vector<FieldVector> rows;
    for (auto i : idx) rows.push_back(in.w[i]);
    if (rank_over_field(field_matrix_from_rows(rows)) != n - 1) continue;
    out.istar.push_back(idx);

    // Does the face hyperplane span(w_J) cut V in dimension m-1?  Append the
    // V unit directions and compare ranks; equivalently V is not contained in
    // the span.  Both characterisations are computed and must agree.
    std::vector<FieldVector> with_v = rows;
    for (std::size_t t = 0; t < m; ++t) {
      FieldVector unit(n, FieldElement::zero(f));
      unit[n - m + t] = FieldElement::one(f);
      with_v.push_back(unit);
    }
    std::size_t joint = rank_over_field(field_matrix_from_rows(with_v));
    bool cuts_by_dim = ((n - 1) + m - joint == m - 1);
    bool cuts_by_containment = joint > n - 1;
    if (cuts_by_dim != cuts_by_containment)
      throw DomainError("InternalCheck", "face orientation characterisations disagree");
    if (cuts_by_dim) out.istar_v.push_back(idx);
  } while (detail::next_combination(idx, N));
  return out;
}

struct PlaneFamily {
  bool finite = true;
  std::vector<std::size_t> witness_subset;  // orientation with an infinite orbit family
  std::vector<HyperplaneClass> classes;     // deduped Gamma-orbit representatives
};

// Build the singular hyperplane family on V: for each face orientation J the
// translates of the face plane cut V in parallel hyperplanes whose offsets
// form a finitely generated group; the translation group reaches a finite
// index subgroup of it (or the family is not finitely classified).
inline PlaneFamily derive_hyperplane_classes(const ProjectionScheme& s, const SchemeInternal& in,
                                             const Orientations& ori,
                                             ArrangementOptions opts = {}) {
  const FieldPtr& f = s.field;
  const std::size_t n = in.codim, m = in.dim_v, k = in.rk_delta;
  const FieldElement zero = FieldElement::zero(f), one = FieldElement::one(f);
  const std::size_t deg = static_cast<std::size_t>(f->degree());

  PlaneFamily out;
  std::vector<HyperplaneClass> raw;
  for (const auto& J : ori.istar_v) {
    // Functional vanishing on the face plane span(w_J).
    FieldMatrix rows(J.size(), n, zero);
    for (std::size_t i = 0; i < J.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) rows(i, j) = in.w[J[i]][j];
    FieldMatrix ker = kernel_over_field(rows, one);
    if (ker.rows() != 1) throw DomainError("InternalCheck", "face functional not unique");
    FieldVector fn(n, zero);
    for (std::size_t j = 0; j < n; ++j) fn[j] = ker(0, j);

    FieldVector n_v(fn.begin() + static_cast<std::ptrdiff_t>(k), fn.end());

    // Offsets of all lattice translates of the face plane, and the subgroup
    // the translation group reaches.
    std::vector<std::vector<Rational>> offset_rows, reach_rows;
    for (std::size_t i = 0; i < in.ambient; ++i) {
      FieldElement v = detail::dot(fn, in.w[i], f);
      if (!v.is_zero()) offset_rows.push_back(rational_coordinates(v));
    }
    for (const auto& g : in.gamma) {
      FieldElement v = detail::dot(n_v, g, f);
      if (!v.is_zero()) reach_rows.push_back(rational_coordinates(v));
    }
    RatLattice offsets = RatLattice::from_rows(offset_rows, deg);
    RatLattice reach = RatLattice::from_rows(reach_rows, deg);
    for (const auto& row : reach_rows)
      if (!offsets.contains(row))
        throw DomainError("InternalCheck", "translation offset escapes the face offset group");

    FieldElement base = zero - detail::dot(fn, in.u_perp, f);
    IndexResult ix = subgroup_index(reach, offsets);
    if (!ix.finite) {
      out.finite = false;
      out.witness_subset = J;
      continue;
    }
    auto reps = coset_representatives(reach, offsets, opts.coset_cap);
    for (const auto& rep : reps) {
      HyperplaneClass hc;
      hc.normal = n_v;
      hc.offset = FieldElement(f, rep) + base;
      hc.provenance = {std::string("faces ") + detail::subset_string(J)};
      raw.push_back(std::move(hc));
    }
  }
  if (!out.finite) return out;

  // Dedupe across orientations by running the classes through the arrangement
  // ingest (same canonical key = same Gamma-orbit).
  Arrangement arr(f, m, in.gamma, std::move(raw), opts);
  out.classes = arr.planes();
  return out;
}

inline Arrangement scheme_arrangement(const ProjectionScheme& s, const SchemeInternal& in,
                                      const PlaneFamily& fam, ArrangementOptions opts = {}) {
  if (!fam.finite) throw InvalidScheme("hyperplane family is not finite");
  return Arrangement(s.field, in.dim_v, in.gamma, fam.classes, opts);
}

// --- codimension one --------------------------------------------------------

// A one-dimensional internal space with a finite union of closed intervals as
// acceptance domain: the only data that matter are the projections of the
// lattice generators and the interval endpoints.
struct Codim1Domain {
  FieldPtr field;
  std::vector<FieldElement> projections;                     // pi'(e_i), length N
  std::vector<std::pair<FieldElement, FieldElement>> intervals;  // closed [lo, hi]
  std::string label;
};

inline void validate_codim1(const Codim1Domain& dom) {
  if (!dom.field) throw InvalidScheme("missing number field");
  if (dom.projections.empty()) throw InvalidScheme("no lattice projections");
  if (dom.intervals.empty()) throw InvalidScheme("no acceptance intervals");
  std::vector<std::pair<FieldElement, FieldElement>> iv = dom.intervals;
  std::sort(iv.begin(), iv.end(), [](const auto& a, const auto& b) {
    return field_cmp(a.first, b.first) < 0;
  });
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (field_cmp(iv[i].first, iv[i].second) >= 0)
      throw InvalidScheme("interval with empty interior");
    if (i + 1 < iv.size() && field_cmp(iv[i].second, iv[i + 1].first) >= 0)
      throw InvalidScheme("intervals overlap");
  }
}

// The boundary points as a one-dimensional arrangement: level-0 classes are
// the lattice orbits of the endpoints.
inline Arrangement codim1_arrangement(const Codim1Domain& dom, ArrangementOptions opts = {}) {
  validate_codim1(dom);
  const FieldPtr& f = dom.field;
  std::vector<FieldVector> gamma;
  for (const auto& p : dom.projections) gamma.push_back({p});
  std::vector<HyperplaneClass> planes;
  for (const auto& [lo, hi] : dom.intervals) {
    planes.push_back({{FieldElement::one(f)}, lo, {"interval endpoint"}});
    planes.push_back({{FieldElement::one(f)}, hi, {"interval endpoint"}});
  }
  return Arrangement(f, 1, gamma, std::move(planes), opts);
}

inline std::size_t codim1_orbit_count(const Codim1Domain& dom) {
  return codim1_arrangement(dom).planes().size();
}

// For a genuine scheme of codimension one the window is the projected unit
// cube: a single interval whose endpoints are the summed negative and
// positive generator projections.
inline Codim1Domain codim1_domain(const ProjectionScheme& s, const SchemeInternal& in) {
  if (in.codim != 1 || in.rk_delta != 0)
    throw InvalidScheme("not an aperiodic codimension-one scheme");
  const FieldPtr& f = s.field;
  Codim1Domain dom;
  dom.field = f;
  dom.label = s.label;
  FieldElement lo = FieldElement::zero(f), hi = FieldElement::zero(f);
  for (std::size_t i = 0; i < in.ambient; ++i) {
    FieldElement v = in.w[i][0];
    dom.projections.push_back(v);
    int sg = v.is_zero() ? 0 : field_sign(v);
    if (sg > 0) hi = hi + v;
    if (sg < 0) lo = lo + v;
  }
  dom.intervals = {{lo + in.u_perp[0], hi + in.u_perp[0]}};
  return dom;
}

}  // namespace projtop
