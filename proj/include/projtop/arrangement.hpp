// Affine hyperplane arrangements over a real number field, acted on by a
// finitely generated group of translations.  The central computation: classify
// the singular affine subspaces (intersections of plane translates) up to
// translation, level by level, together with the relative ("seen from inside
// one class") tables that feed the rank formulas.
//
// Frame conventions:
//   * V = F^m with F = Q(theta) a real number field; vectors are coordinate
//     tuples over F.
//   * Gamma is given by r generators in V, Z-independent (rank r as a group,
//     checked via the rational expansion of coordinates).
//   * A hyperplane class is (normal n, offset c): the translate family
//     { {x : <n,x> = c + n(g)} : g in Gamma }.
//   * Group-theoretic objects (stabilizers) live in Z^r, coordinates taken
//     with respect to the Gamma generators.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projtop/integers.hpp"
#include "projtop/lattice.hpp"
#include "projtop/matrix.hpp"
#include "projtop/number_field.hpp"

namespace projtop {

class InvalidArrangement : public DomainError {
 public:
  explicit InvalidArrangement(const std::string& what) : DomainError("InvalidArrangement", what) {}
};

struct HyperplaneClass {
  FieldVector normal;
  FieldElement offset;
  std::vector<std::string> provenance;  // where this class came from (input index, orientation...)
};

// Scale so the first nonzero coefficient of the normal is 1; the offset
// scales along.  Gives each direction a unique representative.
inline void normalize_functional(FieldVector& normal, FieldElement& offset) {
  for (const auto& c : normal) {
    if (c.is_zero()) continue;
    FieldElement inv = c.inverse();
    for (auto& x : normal) x = x * inv;
    offset = offset * inv;
    return;
  }
  throw InvalidArrangement("hyperplane with zero normal");
}

// One translation class of singular l-dimensional affine subspaces.
struct SingularClass {
  std::size_t level = 0;    // dimension of the subspace
  FieldMatrix direction;    // level x m, reduced row echelon form (canonical)
  FieldVector point;        // one representative point
  Lattice stabilizer;       // {c in Z^r : sum c_j gamma_j parallel to the subspace}
  std::string key;          // canonical identifier (direction + residue of the offset)
  std::vector<std::vector<std::size_t>> generating_subsets;  // witnesses: plane index sets
};

struct LevelResult {
  bool finite = true;
  std::vector<SingularClass> classes;        // sorted by key
  std::vector<std::size_t> witness_subset;   // independent subset with infinite coset family
};

struct ArrangementOptions {
  std::size_t subset_cap = 200000;  // independent generating subsets examined per level
  std::size_t coset_cap = 100000;   // coset representatives enumerated per subgroup split
};

namespace detail {

inline std::string field_row_string(const FieldVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += to_string(v[i]);
  }
  return s;
}

inline std::string field_matrix_string(const FieldMatrix& m) {
  std::string s;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) s += ";";
    s += field_row_string(m.row(i));
  }
  return s;
}

// Advance a k-subset of {0..n-1} in lexicographic order; false when done.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx[i] + (k - i) < n) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

struct SubArrangement;

class Arrangement {
 public:
  Arrangement(FieldPtr field, std::size_t dim_v, std::vector<FieldVector> gamma,
              std::vector<HyperplaneClass> planes, ArrangementOptions opts = {},
              bool top_level = true)
      : field_(std::move(field)), m_(dim_v), gamma_(std::move(gamma)), opts_(opts) {
    if (!field_) throw InvalidArrangement("missing number field");
    if (m_ == 0) throw InvalidArrangement("ambient dimension must be positive");
    deg_ = static_cast<std::size_t>(field_->degree());
    for (const auto& g : gamma_)
      if (g.size() != m_) throw InvalidArrangement("group generator of wrong dimension");
    r_ = gamma_.size();

    // Generators must be independent over Z; over a number field that is
    // exactly Q-independence of the coefficient expansions.
    if (r_ > 0) {
      std::vector<std::vector<Rational>> rows;
      for (const auto& g : gamma_) rows.push_back(rational_coordinates(g));
      if (span_rank(rows) != r_)
        throw InvalidArrangement("group generators are dependent over Z");
    }

    if (top_level) {
      if (r_ < m_)
        throw InvalidArrangement("group rank below ambient dimension");
      std::vector<FieldVector> normals;
      for (const auto& p : planes) normals.push_back(p.normal);
      if (planes.empty() || rank_over_field(field_matrix_from_rows(normals)) != m_)
        throw InvalidArrangement("plane normals do not span the ambient space");
    }

    ingest(std::move(planes));
  }

  const FieldPtr& field() const { return field_; }
  std::size_t dim() const { return m_; }
  std::size_t degree() const { return deg_; }
  std::size_t group_rank() const { return r_; }
  const std::vector<FieldVector>& gamma() const { return gamma_; }
  const std::vector<HyperplaneClass>& planes() const { return planes_; }
  const ArrangementOptions& options() const { return opts_; }

  // n_i(gamma_j)
  const FieldElement& value(std::size_t plane, std::size_t gen) const {
    return values_[plane][gen];
  }
  // n_i(Gamma) as a subgroup of Q^deg
  const RatLattice& offset_group(std::size_t plane) const { return offset_groups_[plane]; }

  // Gamma itself, expanded to Q^{m*deg}.
  RatLattice expanded_group() const {
    std::vector<std::vector<Rational>> rows;
    for (const auto& g : gamma_) rows.push_back(rational_coordinates(g));
    return RatLattice::from_rows(rows, m_ * deg_);
  }

  // Stabilizer of the intersection direction of the given planes:
  // {c in Z^r : n_i(sum c_j gamma_j) = 0 for all i in the set}.
  Lattice stabilizer_of(const std::vector<std::size_t>& plane_ids) const {
    RationalMatrix mat(plane_ids.size() * deg_, r_, Rational(0));
    for (std::size_t t = 0; t < plane_ids.size(); ++t)
      for (std::size_t j = 0; j < r_; ++j) {
        const std::vector<Rational> block = rational_coordinates(value(plane_ids[t], j));
        for (std::size_t a = 0; a < deg_; ++a) mat(t * deg_ + a, j) = block[a];
      }
    return Lattice::from_rows(integer_kernel(mat));
  }

  // V-images of a stabilizer sublattice of Z^r.
  std::vector<FieldVector> group_images(const Lattice& stab) const {
    std::vector<FieldVector> out;
    for (std::size_t i = 0; i < stab.rank(); ++i) {
      FieldVector v(m_, FieldElement::zero(field_));
      for (std::size_t j = 0; j < r_; ++j) {
        Rational c(stab.basis()(i, j));
        if (sgn(c) == 0) continue;
        v = vec_add(v, vec_scale(FieldElement::from_rational(field_, c), gamma_[j]));
      }
      out.push_back(std::move(v));
    }
    return out;
  }

  // Canonical identifier of the translation class of (point + rowspace(dir)).
  // dir must be in reduced row echelon form.  Quotient coordinates: kill the
  // pivot coordinates with the direction rows, keep the complement; reduce
  // the result modulo the projected group.
  std::string class_key(std::size_t level, const FieldMatrix& dir, const FieldVector& point) const {
    std::vector<std::size_t> pivots = rref_pivots(dir);
    std::vector<std::size_t> comp;
    {
      std::vector<bool> is_pivot(m_, false);
      for (auto p : pivots) is_pivot[p] = true;
      for (std::size_t j = 0; j < m_; ++j)
        if (!is_pivot[j]) comp.push_back(j);
    }
    auto project = [&](const FieldVector& x) {
      FieldVector red = x;
      for (std::size_t t = 0; t < pivots.size(); ++t) {
        FieldElement c = red[pivots[t]];
        if (c.is_zero()) continue;
        red = vec_sub(red, vec_scale(c, dir.row(t)));
      }
      FieldVector out;
      for (auto j : comp) out.push_back(red[j]);
      return out;
    };
    std::vector<std::vector<Rational>> rows;
    for (const auto& g : gamma_) rows.push_back(rational_coordinates(project(g)));
    RatLattice quot = RatLattice::from_rows(rows, comp.size() * deg_);
    std::vector<Rational> residue = quot.reduce_mod(rational_coordinates(project(point)));
    return "L" + std::to_string(level) + "|" + detail::field_matrix_string(dir) + "|" +
           to_string(residue);
  }

  // Two singular classes are one translation class iff their canonical keys
  // agree (same direction, offset difference in the projected group).
  bool equivalent(const SingularClass& a, const SingularClass& b) const {
    if (a.level != b.level) return false;
    return class_key(a.level, a.direction, a.point) == class_key(b.level, b.direction, b.point);
  }

  // All translation classes of singular l-spaces.  A singular l-space is cut
  // out by an independent set of m-l plane translates; its class is the coset
  // of the diagonal group D = {(n_i(g))_i : g in Gamma} inside the product
  // P = prod_i n_i(Gamma).  Infinite index anywhere means the level is
  // infinite and the witness subset is reported.
  LevelResult enumerate_level(std::size_t level) const {
    if (level >= m_) throw InvalidArrangement("level must be below the ambient dimension");
    const std::size_t k = m_ - level;
    LevelResult out;
    std::map<std::string, SingularClass> pool;
    if (k > planes_.size()) return out;

    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::size_t examined = 0;
    do {
      // independence over the field
      std::vector<FieldVector> normals;
      for (auto i : idx) normals.push_back(planes_[i].normal);
      FieldMatrix nm = field_matrix_from_rows(normals);
      if (rank_over_field(nm) != k) continue;
      if (++examined > opts_.subset_cap)
        throw DomainError("Incomplete",
                          "generating-subset cap exceeded at level " + std::to_string(level));

      // coset split of the diagonal inside the product of offset groups
      std::vector<std::vector<Rational>> prows, drows;
      for (std::size_t t = 0; t < k; ++t) {
        const RatLattice& og = offset_groups_[idx[t]];
        for (std::size_t b = 0; b < og.rank(); ++b) {
          std::vector<Rational> row(k * deg_, Rational(0));
          std::vector<Rational> basis = og.basis_row(b);
          for (std::size_t a = 0; a < deg_; ++a) row[t * deg_ + a] = basis[a];
          prows.push_back(std::move(row));
        }
      }
      for (std::size_t j = 0; j < r_; ++j) {
        std::vector<Rational> row;
        row.reserve(k * deg_);
        for (std::size_t t = 0; t < k; ++t) {
          std::vector<Rational> block = rational_coordinates(value(idx[t], j));
          row.insert(row.end(), block.begin(), block.end());
        }
        drows.push_back(std::move(row));
      }
      RatLattice product = RatLattice::from_rows(prows, k * deg_);
      RatLattice diagonal = RatLattice::from_rows(drows, k * deg_);
      IndexResult ir = subgroup_index(diagonal, product);
      if (!ir.finite) {
        out.finite = false;
        out.witness_subset = idx;
        out.classes.clear();
        return out;
      }

      FieldMatrix dir = kernel_over_field(nm, FieldElement::one(field_));
      rref_in_place(dir);
      Lattice stab = stabilizer_of(idx);

      std::vector<std::vector<Rational>> reps = coset_representatives(diagonal, product, opts_.coset_cap);
      for (const auto& rep : reps) {
        FieldVector target(k, FieldElement::zero(field_));
        for (std::size_t t = 0; t < k; ++t) {
          std::vector<Rational> block(rep.begin() + static_cast<long>(t * deg_),
                                      rep.begin() + static_cast<long>((t + 1) * deg_));
          target[t] = FieldElement(field_, block) + planes_[idx[t]].offset;
        }
        auto x = solve_over_field(nm, target, FieldElement::one(field_));
        if (!x) throw InvalidArrangement("independent system unexpectedly inconsistent");
        SingularClass sc;
        sc.level = level;
        sc.direction = dir;
        sc.point = *x;
        sc.stabilizer = stab;
        sc.key = class_key(level, dir, sc.point);
        sc.generating_subsets = {idx};
        auto [it, inserted] = pool.emplace(sc.key, std::move(sc));
        if (!inserted) it->second.generating_subsets.push_back(idx);
      }
    } while (detail::next_combination(idx, planes_.size()));

    out.classes.reserve(pool.size());
    for (auto& [key, sc] : pool) out.classes.push_back(std::move(sc));
    return out;
  }

  // The arrangement a singular class sees inside itself: its stabilizer acting
  // on the class's affine frame, cut by the traces of all non-parallel plane
  // classes.  Plane translates meeting the frame are split into stabilizer
  // orbits; each orbit is one plane class of the sub-arrangement.
  SubArrangement sub_arrangement(const SingularClass& theta) const;

  // Embed a singular class of a sub-arrangement back into V.
  SingularClass embed(const SubArrangement& sub, const SingularClass& local) const;

  // Decomposition of the normal directions into the finest groups that are
  // pairwise "orthogonal" in span: pick a greedy field basis among the
  // distinct directions, link basis members that co-occur in the support of
  // any direction's coordinates, take connected components.  Returns groups
  // of plane indices.
  std::vector<std::vector<std::size_t>> indecomposable_components() const {
    std::vector<FieldVector> dirs;
    std::vector<std::size_t> dir_of_plane(planes_.size());
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      std::string k = detail::field_row_string(planes_[i].normal);
      auto it = seen.find(k);
      if (it == seen.end()) {
        seen.emplace(k, dirs.size());
        dir_of_plane[i] = dirs.size();
        dirs.push_back(planes_[i].normal);
      } else {
        dir_of_plane[i] = it->second;
      }
    }

    // greedy basis over the field
    std::vector<std::size_t> basis;
    std::vector<FieldVector> basis_rows;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      std::vector<FieldVector> trial = basis_rows;
      trial.push_back(dirs[d]);
      if (rank_over_field(field_matrix_from_rows(trial)) > basis_rows.size()) {
        basis.push_back(d);
        basis_rows.push_back(dirs[d]);
      }
    }

    std::vector<std::size_t> parent(basis.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

    // solve every direction against the basis; co-support links basis members
    FieldMatrix bt(m_, basis.size(), FieldElement::zero(field_));
    for (std::size_t c = 0; c < basis.size(); ++c)
      for (std::size_t j = 0; j < m_; ++j) bt(j, c) = basis_rows[c][j];
    std::vector<std::size_t> comp_of_dir(dirs.size());
    std::vector<std::vector<std::size_t>> support_of_dir(dirs.size());
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      auto c = solve_over_field(bt, dirs[d], FieldElement::one(field_));
      if (!c) throw InvalidArrangement("direction outside its own basis span");
      std::vector<std::size_t>& sup = support_of_dir[d];
      for (std::size_t b = 0; b < basis.size(); ++b)
        if (!(*c)[b].is_zero()) sup.push_back(b);
      if (sup.empty()) throw InvalidArrangement("zero direction in component analysis");
      for (std::size_t s = 1; s < sup.size(); ++s) unite(sup[0], sup[s]);
    }
    for (std::size_t d = 0; d < dirs.size(); ++d) comp_of_dir[d] = find(support_of_dir[d][0]);

    // rank additivity safety net: components must split the total span
    {
      std::map<std::size_t, std::vector<FieldVector>> by_comp;
      for (std::size_t d = 0; d < dirs.size(); ++d) by_comp[comp_of_dir[d]].push_back(dirs[d]);
      std::size_t total = 0;
      for (auto& [c, rows] : by_comp) total += rank_over_field(field_matrix_from_rows(rows));
      if (total != rank_over_field(field_matrix_from_rows(dirs)))
        throw InvalidArrangement("component ranks fail to add up");
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < planes_.size(); ++i)
      groups[comp_of_dir[dir_of_plane[i]]].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [c, g] : groups) out.push_back(std::move(g));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
  }

  // Group of components of Gamma along the frame decomposition of a
  // transversal: V = dir(W_A) + dir(W_{T\A}), project Gamma onto the first
  // summand.  Returns the images and their rank as an abelian group.
  struct ProjectedGroup {
    std::vector<FieldVector> images;
    std::size_t rank = 0;
  };
  ProjectedGroup projected_group(const std::vector<std::size_t>& transversal,
                                 const std::vector<std::size_t>& a_subset) const {
    FieldMatrix ka = direction_of(a_subset);
    std::vector<std::size_t> rest;
    for (auto t : transversal)
      if (std::find(a_subset.begin(), a_subset.end(), t) == a_subset.end()) rest.push_back(t);
    FieldMatrix kb = direction_of(rest);
    if (ka.rows() + kb.rows() != m_)
      throw InvalidArrangement("transversal frames do not decompose the space");
    FieldMatrix frame(m_, m_, FieldElement::zero(field_));
    for (std::size_t i = 0; i < ka.rows(); ++i)
      for (std::size_t j = 0; j < m_; ++j) frame(j, i) = ka(i, j);
    for (std::size_t i = 0; i < kb.rows(); ++i)
      for (std::size_t j = 0; j < m_; ++j) frame(j, ka.rows() + i) = kb(i, j);
    ProjectedGroup out;
    std::vector<std::vector<Rational>> rows;
    for (const auto& g : gamma_) {
      auto c = solve_over_field(frame, g, FieldElement::one(field_));
      if (!c) throw InvalidArrangement("transversal frame fails to span");
      FieldVector img(m_, FieldElement::zero(field_));
      for (std::size_t i = 0; i < ka.rows(); ++i)
        img = vec_add(img, vec_scale((*c)[i], ka.row(i)));
      rows.push_back(rational_coordinates(img));
      out.images.push_back(std::move(img));
    }
    out.rank = rows.empty() ? 0 : span_rank(rows);
    return out;
  }

  // Orbit count of a point under the group generated by Gamma moving along a
  // transversal's frame lines: cosets of Gamma inside sum_i Gamma_{T minus i}.
  struct PointOrbitResult {
    bool finite = true;
    Integer count = 0;
    std::vector<FieldVector> points;
  };
  PointOrbitResult point_orbits_on(const std::vector<std::size_t>& transversal,
                                   const FieldVector& p) const {
    if (transversal.size() != m_)
      throw InvalidArrangement("point orbits need a transversal of full size");
    std::vector<std::vector<Rational>> sum_rows, gamma_rows;
    for (std::size_t i = 0; i < m_; ++i) {
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < m_; ++j)
        if (j != i) others.push_back(transversal[j]);
      // projection onto the frame line dir(W_{T minus i}) along ker(n_i)
      ProjectedGroup pg = projected_group(transversal, others);
      for (const auto& img : pg.images) sum_rows.push_back(rational_coordinates(img));
    }
    for (const auto& g : gamma_) gamma_rows.push_back(rational_coordinates(g));
    RatLattice total = RatLattice::from_rows(sum_rows, m_ * deg_);
    RatLattice base = RatLattice::from_rows(gamma_rows, m_ * deg_);
    PointOrbitResult out;
    IndexResult ir = subgroup_index(base, total);
    if (!ir.finite) {
      out.finite = false;
      return out;
    }
    out.count = ir.index;
    for (const auto& rep : coset_representatives(base, total, opts_.coset_cap)) {
      FieldVector shift = field_vector_from_rational_blocks(field_, rep);
      out.points.push_back(vec_add(p, shift));
    }
    return out;
  }

  // Direction of the intersection of the given plane classes (kernel of their
  // normals), canonical RREF rows.
  FieldMatrix direction_of(const std::vector<std::size_t>& plane_ids) const {
    FieldMatrix nm(plane_ids.size(), m_, FieldElement::zero(field_));
    for (std::size_t i = 0; i < plane_ids.size(); ++i)
      for (std::size_t j = 0; j < m_; ++j) nm(i, j) = planes_[plane_ids[i]].normal[j];
    FieldMatrix dir = kernel_over_field(nm, FieldElement::one(field_));
    rref_in_place(dir);
    return dir;
  }

 private:
  static std::vector<std::size_t> rref_pivots(const FieldMatrix& m) {
    std::vector<std::size_t> pivots;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::size_t j = 0;
      while (j < m.cols() && m(i, j).is_zero()) ++j;
      if (j == m.cols()) throw InvalidArrangement("zero row in a direction matrix");
      pivots.push_back(j);
    }
    return pivots;
  }

  void ingest(std::vector<HyperplaneClass> raw) {
    struct Pending {
      HyperplaneClass plane;
      FieldVector values;
      RatLattice group;
    };
    std::map<std::string, Pending> pool;
    for (auto& p : raw) {
      normalize_functional(p.normal, p.offset);
      FieldVector vals;
      std::vector<std::vector<Rational>> rows;
      for (std::size_t j = 0; j < r_; ++j) {
        FieldElement v = apply_functional(p.normal, gamma_[j]);
        rows.push_back(rational_coordinates(v));
        vals.push_back(std::move(v));
      }
      RatLattice og = rows.empty() ? RatLattice::zero(deg_) : RatLattice::from_rows(rows, deg_);
      std::vector<Rational> residue = og.reduce_mod(rational_coordinates(p.offset));
      std::string key = detail::field_row_string(p.normal) + "|" + to_string(residue);
      auto it = pool.find(key);
      if (it == pool.end()) {
        // canonical representative: the reduced offset
        p.offset = FieldElement(field_, residue);
        pool.emplace(key, Pending{std::move(p), std::move(vals), std::move(og)});
      } else {
        auto& prov = it->second.plane.provenance;
        prov.insert(prov.end(), p.provenance.begin(), p.provenance.end());
      }
    }
    for (auto& [key, pending] : pool) {
      planes_.push_back(std::move(pending.plane));
      values_.push_back(std::move(pending.values));
      offset_groups_.push_back(std::move(pending.group));
    }
  }

  FieldPtr field_;
  std::size_t m_ = 0;
  std::size_t deg_ = 0;
  std::size_t r_ = 0;
  std::vector<FieldVector> gamma_;
  ArrangementOptions opts_;
  std::vector<HyperplaneClass> planes_;
  std::vector<FieldVector> values_;
  std::vector<RatLattice> offset_groups_;
};

// Result of cutting all other plane classes down to the frame of one singular
// class: an arrangement inside F^level whose group is that class's stabilizer.
struct SubArrangement {
  bool finite = true;
  std::size_t witness_plane = 0;        // plane whose orbit split had infinite index
  std::optional<Arrangement> arr;
  FieldMatrix frame;                    // level x m: rows embed frame coords into V
  FieldVector origin;                   // base point in V
};

inline SubArrangement Arrangement::sub_arrangement(const SingularClass& theta) const {
  if (theta.level == 0) throw InvalidArrangement("point classes have no sub-arrangement");
  SubArrangement sub;
  sub.frame = theta.direction;
  sub.origin = theta.point;
  const std::size_t kp = theta.level;
  std::vector<std::size_t> pivots = rref_pivots(theta.direction);

  // stabilizer images in frame coordinates (pivot extraction against RREF rows)
  std::vector<FieldVector> images = group_images(theta.stabilizer);
  std::vector<FieldVector> sub_gamma;
  for (const auto& sigma : images) {
    FieldVector coords;
    for (std::size_t t = 0; t < kp; ++t) coords.push_back(sigma[pivots[t]]);
    // the image must reconstruct inside the direction span
    FieldVector rebuilt(m_, FieldElement::zero(field_));
    for (std::size_t t = 0; t < kp; ++t)
      rebuilt = vec_add(rebuilt, vec_scale(coords[t], theta.direction.row(t)));
    if (!vec_is_zero(vec_sub(rebuilt, sigma)))
      throw InvalidArrangement("stabilizer image escaped its direction span");
    sub_gamma.push_back(std::move(coords));
  }

  std::vector<HyperplaneClass> sub_planes;
  for (std::size_t i = 0; i < planes_.size(); ++i) {
    FieldVector trace(kp, FieldElement::zero(field_));
    bool nonzero = false;
    for (std::size_t t = 0; t < kp; ++t) {
      trace[t] = apply_functional(planes_[i].normal, theta.direction.row(t));
      nonzero = nonzero || !trace[t].is_zero();
    }
    if (!nonzero) continue;  // parallel family: cuts nothing inside the frame

    // offsets of the translates of plane i, seen from theta's origin, split
    // into orbits of n_i(stabilizer)
    std::vector<std::vector<Rational>> srows;
    for (const auto& sigma : images)
      srows.push_back(rational_coordinates(apply_functional(planes_[i].normal, sigma)));
    RatLattice stab_values = RatLattice::from_rows(srows, deg_);
    IndexResult ir = subgroup_index(stab_values, offset_groups_[i]);
    if (!ir.finite) {
      sub.finite = false;
      sub.witness_plane = i;
      return sub;
    }
    FieldElement base = planes_[i].offset - apply_functional(planes_[i].normal, theta.point);
    std::vector<std::vector<Rational>> reps =
        coset_representatives(stab_values, offset_groups_[i], opts_.coset_cap);
    for (const auto& rep : reps) {
      HyperplaneClass hp;
      hp.normal = trace;
      hp.offset = base + FieldElement(field_, rep);
      hp.provenance = {"global:" + std::to_string(i)};
      sub_planes.push_back(std::move(hp));
    }
  }

  sub.arr.emplace(field_, kp, std::move(sub_gamma), std::move(sub_planes), opts_,
                  /*top_level=*/false);
  return sub;
}

inline SingularClass Arrangement::embed(const SubArrangement& sub,
                                        const SingularClass& local) const {
  SingularClass g;
  g.level = local.level;
  const std::size_t kp = sub.frame.rows();
  FieldMatrix gdir(local.level, m_, FieldElement::zero(field_));
  for (std::size_t i = 0; i < local.level; ++i)
    for (std::size_t j = 0; j < m_; ++j) {
      FieldElement acc = FieldElement::zero(field_);
      for (std::size_t t = 0; t < kp; ++t) acc = acc + local.direction(i, t) * sub.frame(t, j);
      gdir(i, j) = acc;
    }
  rref_in_place(gdir);
  g.direction = std::move(gdir);
  FieldVector p = sub.origin;
  for (std::size_t t = 0; t < kp; ++t)
    p = vec_add(p, vec_scale(local.point[t], sub.frame.row(t)));
  g.point = std::move(p);
  g.key = class_key(g.level, g.direction, g.point);
  return g;
}

// A singular class of a sub-arrangement together with the global class it
// embeds into.
struct RelativeClass {
  SingularClass local;
  std::size_t global_id = 0;
};

// The full orbit catalogue: all levels, plus for every class of positive
// level the classes it sees inside itself, tied back to global identifiers.
struct OrbitTables {
  std::size_t dim = 0;
  std::vector<std::vector<SingularClass>> levels;  // levels[l], l = 0..dim-1
  // relatives[l][c][j]: level-j classes inside class c of level l (j < l)
  std::vector<std::vector<std::vector<std::vector<RelativeClass>>>> relatives;

  std::size_t count(std::size_t level) const { return levels[level].size(); }
};

struct TablesResult {
  bool finite = true;
  std::string witness;  // human-readable reason when infinite
  OrbitTables tables;
};

inline TablesResult build_orbit_tables(const Arrangement& arr) {
  TablesResult res;
  OrbitTables& t = res.tables;
  t.dim = arr.dim();
  t.levels.resize(arr.dim());
  std::vector<std::map<std::string, std::size_t>> index(arr.dim());
  for (std::size_t l = 0; l < arr.dim(); ++l) {
    LevelResult lr = arr.enumerate_level(l);
    if (!lr.finite) {
      res.finite = false;
      std::string subset;
      for (auto i : lr.witness_subset) subset += (subset.empty() ? "" : ",") + std::to_string(i);
      res.witness = "infinitely many classes at level " + std::to_string(l) +
                    " (witness planes " + subset + ")";
      return res;
    }
    t.levels[l] = std::move(lr.classes);
    for (std::size_t c = 0; c < t.levels[l].size(); ++c) index[l].emplace(t.levels[l][c].key, c);
  }

  t.relatives.resize(arr.dim());
  for (std::size_t l = 1; l < arr.dim(); ++l) {
    t.relatives[l].resize(t.levels[l].size());
    for (std::size_t c = 0; c < t.levels[l].size(); ++c) {
      SubArrangement sub = arr.sub_arrangement(t.levels[l][c]);
      if (!sub.finite) {
        res.finite = false;
        res.witness = "infinite trace split of plane " + std::to_string(sub.witness_plane) +
                      " inside class " + std::to_string(c) + " of level " + std::to_string(l);
        return res;
      }
      t.relatives[l][c].resize(l);
      for (std::size_t j = 0; j < l; ++j) {
        LevelResult lr = sub.arr->enumerate_level(j);
        if (!lr.finite) {
          res.finite = false;
          res.witness = "infinitely many relative classes at level " + std::to_string(j) +
                        " inside class " + std::to_string(c) + " of level " + std::to_string(l);
          return res;
        }
        for (auto& local : lr.classes) {
          SingularClass global = arr.embed(sub, local);
          auto it = index[j].find(global.key);
          if (it == index[j].end())
            throw InvalidArrangement("relative class failed to match a global class");
          t.relatives[l][c][j].push_back(RelativeClass{std::move(local), it->second});
        }
      }
    }
  }
  return res;
}

// Euler characteristic via the chain sum over nested singular classes,
// evaluated by dynamic programming on the orbit tables: A = -1 for point
// classes, A(X) = -sum of A over the global classes of everything X sees
// inside itself; e is (-1)^dim times the total.
inline Integer euler_chain(const OrbitTables& t) {
  std::vector<std::vector<Integer>> a(t.levels.size());
  Integer total = 0;
  for (std::size_t l = 0; l < t.levels.size(); ++l) {
    a[l].resize(t.levels[l].size());
    for (std::size_t c = 0; c < t.levels[l].size(); ++c) {
      Integer s = 0;
      if (l == 0) {
        s = -1;
      } else {
        for (std::size_t j = 0; j < l; ++j)
          for (const auto& rc : t.relatives[l][c][j]) s += a[j][rc.global_id];
        s = -s;
      }
      a[l][c] = s;
      total += s;
    }
  }
  return (t.levels.size() % 2 == 0) ? total : -total;
}

}  // namespace projtop
