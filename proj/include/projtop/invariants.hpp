// Rank computations on top of the orbit tables: cohomology ranks for ambient
// dimensions 1-3, the Euler characteristic (chain sum cross-checked against
// the closed expressions), K-theoretic ranks, and the obstruction tests that
// detect infinitely generated cohomology before any table is built.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "projtop/arrangement.hpp"

namespace projtop {

// Rank of the subgroup of the p-th exterior power of Z^ambient_rank spanned
// by the p-th powers of the given sublattices (Pluecker coordinates of all
// p-subsets of each basis).
inline std::size_t wedge_span_rank(const std::vector<Lattice>& subs, std::size_t p,
                                   std::size_t ambient_rank) {
  if (p == 0) return subs.empty() ? 0 : 1;
  std::vector<std::vector<Rational>> rows;
  for (const auto& s : subs) {
    if (s.rank() < p) continue;
    std::vector<std::size_t> idx(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = i;
    do {
      IntegerMatrix sel(p, ambient_rank, Integer(0));
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < ambient_rank; ++j) sel(i, j) = s.basis()(idx[i], j);
      std::vector<Integer> w = wedge_coordinates(sel);
      std::vector<Rational> qrow;
      qrow.reserve(w.size());
      for (auto& x : w) qrow.emplace_back(Rational(x));
      rows.push_back(std::move(qrow));
    } while (detail::next_combination(idx, s.rank()));
  }
  if (rows.empty()) return 0;
  return span_rank(rows);
}

struct RankReport {
  std::size_t codim = 0;       // ambient dimension of the arrangement
  std::size_t group_rank = 0;  // r
  Rational nu = Rational(0);   // r / codim
  bool formulas_apply = false;
  std::vector<std::string> notes;
  std::vector<Integer> level_counts;  // L_0 .. L_{m-1}
  std::vector<Integer> d;             // D_0 .. D_pmax (top cohomology first)
  Integer euler = 0;
  Integer k0 = 0, k1 = 0;
  bool free_abelian = true;
  std::vector<Integer> aux;  // span-rank corrections, aux[i] = value at p = i+1
  Integer l_tilde1 = 0;      // only meaningful in dimension 3
};

inline std::pair<Integer, Integer> ktheory_ranks(const std::vector<Integer>& d) {
  Integer k0 = 0, k1 = 0;
  for (std::size_t p = 0; p < d.size(); ++p) ((p % 2 == 0) ? k0 : k1) += d[p];
  return {k0, k1};
}

namespace detail {

// Hard internal consistency checks; a failure here is a bug, not bad input.
inline void check_rank_report(const RankReport& rep) {
  Integer alt = 0;
  for (std::size_t p = 0; p < rep.d.size(); ++p) {
    if (rep.d[p] < 0)
      throw DomainError("InternalCheck", "negative cohomology rank D_" + std::to_string(p));
    alt += (p % 2 == 0) ? rep.d[p] : -rep.d[p];
  }
  if (alt != rep.euler)
    throw DomainError("InternalCheck", "alternating rank sum disagrees with the Euler number");
}

}  // namespace detail

// Closed rank formulas; `tr` must be the tables of `arr`.  When the finite
// formulas do not apply (infinite family, rank divisibility or stabilizer
// conformance failure, dimension > 3) the report says so in `notes` and
// leaves `d` empty; level counts and the chain Euler number are still filled
// in whenever the tables themselves are finite.
inline RankReport compute_ranks(const Arrangement& arr, const TablesResult& tr) {
  RankReport rep;
  const std::size_t m = arr.dim();
  const std::size_t r = arr.group_rank();
  rep.codim = m;
  rep.group_rank = r;
  rep.nu = make_rational(Integer(r), Integer(m));
  if (!tr.finite) {
    rep.notes.push_back("orbit family is infinite: " + tr.witness);
    rep.free_abelian = false;
    return rep;
  }
  const OrbitTables& t = tr.tables;
  for (std::size_t l = 0; l < m; ++l) rep.level_counts.push_back(Integer(t.count(l)));
  rep.euler = euler_chain(t);

  if (r % m != 0) {
    rep.notes.push_back("group rank " + std::to_string(r) + " is not a multiple of dimension " +
                        std::to_string(m) + "; the cohomology is infinitely generated");
    rep.free_abelian = false;
    return rep;
  }
  const std::size_t nu = r / m;

  for (std::size_t l = 1; l < m; ++l)
    for (const auto& c : t.levels[l])
      if (c.stabilizer.rank() != l * nu) {
        rep.notes.push_back("a level-" + std::to_string(l) + " class has stabilizer rank " +
                            std::to_string(c.stabilizer.rank()) + " instead of " +
                            std::to_string(l * nu) +
                            "; the cohomology is infinitely generated");
        rep.free_abelian = false;
        return rep;
      }

  const Integer L0 = rep.level_counts[0];
  auto C = [](std::size_t n, std::size_t k) {
    return binomial(static_cast<long>(n), static_cast<long>(k));
  };
  if (m == 1) {
    // one-dimensional ambient space: L0 point classes, value group of rank nu
    rep.d.push_back(Integer(nu) - 1 + L0);
    for (std::size_t p = 1; p + 1 <= nu; ++p) rep.d.push_back(C(nu, p + 1));
    if (rep.euler != L0)
      throw DomainError("InternalCheck", "chain Euler number disagrees in dimension 1");
    rep.formulas_apply = true;
  } else if (m == 2) {
    const Integer L1 = rep.level_counts[1];
    // Euler number, closed form: every line class contributes its own point
    // count against the global one
    Integer e = -L0;
    for (std::size_t c = 0; c < t.levels[1].size(); ++c)
      e += Integer(t.relatives[1][c][0].size());
    if (e != rep.euler)
      throw DomainError("InternalCheck", "chain Euler number disagrees with the closed form");

    std::vector<Lattice> line_stabs;
    for (const auto& c : t.levels[1]) line_stabs.push_back(c.stabilizer);
    std::vector<Integer> rp(2 * nu + 2, Integer(0));  // rp[p], p = 1 .. 2nu-1
    for (std::size_t p = 1; p + 1 <= 2 * nu; ++p)
      rp[p] = Integer(wedge_span_rank(line_stabs, p + 1, r));
    for (std::size_t p = 1; p + 1 <= 2 * nu; ++p) rep.aux.push_back(rp[p]);

    rep.d.push_back(C(2 * nu, 2) - Integer(2 * nu) + 1 +
                    L1 * (Integer(nu) - 1) + e - rp[1]);
    const std::size_t pmax = 2 * nu - 2;
    for (std::size_t p = 1; p <= pmax; ++p)
      rep.d.push_back(C(2 * nu, p + 2) + L1 * C(nu, p + 1) -
                      rp[p + 1] - rp[p]);
    rep.formulas_apply = true;
  } else if (m == 3) {
    const Integer L1 = rep.level_counts[1];
    const Integer L2 = rep.level_counts[2];

    // relative counts and the closed Euler form
    Integer sum_l0_lines = 0;
    for (std::size_t c = 0; c < t.levels[1].size(); ++c)
      sum_l0_lines += Integer(t.relatives[1][c][0].size());
    Integer e = L0 - sum_l0_lines;
    Integer sum_l1_planes = 0;
    for (std::size_t c = 0; c < t.levels[2].size(); ++c) {
      sum_l1_planes += Integer(t.relatives[2][c][1].size());
      e -= Integer(t.relatives[2][c][0].size());
      for (const auto& rc : t.relatives[2][c][1])
        e += Integer(t.relatives[1][rc.global_id][0].size());
    }
    if (e != rep.euler)
      throw DomainError("InternalCheck", "chain Euler number disagrees with the closed form");
    rep.l_tilde1 = -L1 + sum_l1_planes;

    std::vector<Lattice> line_stabs, plane_stabs;
    for (const auto& c : t.levels[1]) line_stabs.push_back(c.stabilizer);
    for (const auto& c : t.levels[2]) plane_stabs.push_back(c.stabilizer);

    const std::size_t pmax = 3 * nu - 3;
    std::vector<Integer> bigr(pmax + 3, Integer(0));  // bigr[p], p = 1 .. pmax+1
    for (std::size_t p = 1; p <= pmax + 1; ++p) {
      Integer val = Integer(wedge_span_rank(plane_stabs, p + 2, r)) -
                    Integer(wedge_span_rank(line_stabs, p + 1, r));
      for (std::size_t c = 0; c < t.levels[2].size(); ++c) {
        std::vector<Lattice> seen;
        std::vector<std::size_t> ids;
        for (const auto& rc : t.relatives[2][c][1]) {
          if (std::find(ids.begin(), ids.end(), rc.global_id) != ids.end()) continue;
          ids.push_back(rc.global_id);
          seen.push_back(t.levels[1][rc.global_id].stabilizer);
        }
        val += Integer(wedge_span_rank(seen, p + 1, r));
      }
      bigr[p] = val;
      rep.aux.push_back(val);
    }

    rep.d.push_back(C(3 * nu, 3) - C(3 * nu, 2) +
                    Integer(3 * nu) - 1 +
                    L2 * (C(2 * nu, 2) - Integer(2 * nu) + 1) +
                    rep.l_tilde1 * (Integer(nu) - 1) + e - bigr[1]);
    for (std::size_t p = 1; p <= pmax; ++p)
      rep.d.push_back(C(3 * nu, p + 3) + L2 * C(2 * nu, p + 2) +
                      rep.l_tilde1 * C(nu, p + 1) - bigr[p + 1] - bigr[p]);
    rep.formulas_apply = true;
  } else {
    rep.notes.push_back("no closed rank formula implemented for ambient dimension " +
                        std::to_string(m) +
                        "; level counts and the Euler number are still exact");
    return rep;
  }

  detail::check_rank_report(rep);
  auto [k0, k1] = ktheory_ranks(rep.d);
  rep.k0 = k0;
  rep.k1 = k1;
  return rep;
}

// --- obstruction tests -------------------------------------------------------

struct ObstructionCheckItem {
  std::string rule;
  std::string status;  // pass | fail | skipped
  std::string detail;
};

struct ObstructionReport {
  std::string verdict;  // NO_OBSTRUCTION | INFINITELY_GENERATED | UNKNOWN
  std::vector<ObstructionCheckItem> checks;
  std::vector<std::string> notes;
};

// Necessary conditions for finitely generated cohomology, cheapest first:
//   rank-divisibility          dim V must divide rk Gamma
//   stabilizer-rank-conformance  every independent subset A must have
//                              rk Gamma^A = (m-|A|) * nu  (needs an
//                              indecomposable direction family)
//   point-orbit-rank-gap       projections along transversal frames must not
//                              outrank the matching stabilizers, and point
//                              orbits on transversals must be finite
// Any failure proves infinite generation; all passes mean no obstruction was
// found (the checks are necessary, not sufficient, conditions).
inline ObstructionReport obstruction_check(const Arrangement& arr) {
  ObstructionReport rep;
  const std::size_t m = arr.dim();
  const std::size_t r = arr.group_rank();
  bool failed = false;
  bool skipped = false;

  if (r % m != 0) {
    rep.checks.push_back({"rank-divisibility", "fail",
                          "rk Gamma = " + std::to_string(r) + " is not a multiple of dim V = " +
                              std::to_string(m)});
    rep.verdict = "INFINITELY_GENERATED";
    return rep;
  }
  rep.checks.push_back({"rank-divisibility", "pass",
                        "rk Gamma = " + std::to_string(r) + " = " + std::to_string(r / m) +
                            " * dim V"});
  const std::size_t nu = r / m;

  auto components = arr.indecomposable_components();
  const bool indecomposable = components.size() == 1;
  rep.checks.push_back({"indecomposability", indecomposable ? "pass" : "fail",
                        std::to_string(components.size()) + " direction component(s)"});

  auto subset_string = [](const std::vector<std::size_t>& s) {
    std::string out;
    for (auto i : s) out += (out.empty() ? "" : ",") + std::to_string(i);
    return out;
  };

  if (!indecomposable) {
    rep.checks.push_back({"stabilizer-rank-conformance", "skipped",
                          "requires an indecomposable direction family"});
    skipped = true;
  } else {
    bool conforms = true;
    std::string detail;
    try {
      std::size_t examined = 0;
      for (std::size_t size = 1; size <= m && conforms; ++size) {
        if (size > arr.planes().size()) break;
        std::vector<std::size_t> idx(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        do {
          std::vector<FieldVector> normals;
          for (auto i : idx) normals.push_back(arr.planes()[i].normal);
          if (rank_over_field(field_matrix_from_rows(normals)) != size) continue;
          if (++examined > arr.options().subset_cap)
            throw DomainError("Incomplete", "conformance subset cap exceeded");
          const std::size_t expected = (m - size) * nu;
          const std::size_t actual = arr.stabilizer_of(idx).rank();
          if (actual != expected) {
            conforms = false;
            detail = "subset {" + subset_string(idx) + "}: rk Gamma^A = " +
                     std::to_string(actual) + ", expected " + std::to_string(expected);
            break;
          }
        } while (detail::next_combination(idx, arr.planes().size()));
      }
      rep.checks.push_back({"stabilizer-rank-conformance", conforms ? "pass" : "fail",
                            conforms ? "all independent subsets conform" : detail});
      if (!conforms) failed = true;
    } catch (const DomainError& e) {
      rep.checks.push_back({"stabilizer-rank-conformance", "skipped", e.what()});
      skipped = true;
    }
  }

  // point-orbit probes over transversals
  {
    bool ok = true;
    std::string detail;
    try {
      std::size_t examined = 0;
      if (arr.planes().size() >= m) {
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < m; ++i) idx[i] = i;
        do {
          std::vector<FieldVector> normals;
          for (auto i : idx) normals.push_back(arr.planes()[i].normal);
          if (rank_over_field(field_matrix_from_rows(normals)) != m) continue;
          if (++examined > arr.options().subset_cap)
            throw DomainError("Incomplete", "transversal cap exceeded");
          // projections along the frame must not outrank the stabilizers
          for (std::size_t size = 1; size < m && ok; ++size) {
            std::vector<std::size_t> pick(size);
            for (std::size_t i = 0; i < size; ++i) pick[i] = i;
            do {
              std::vector<std::size_t> a;
              for (auto p : pick) a.push_back(idx[p]);
              const std::size_t stab_rank = arr.stabilizer_of(a).rank();
              const std::size_t proj_rank = arr.projected_group(idx, a).rank;
              if (stab_rank < proj_rank) {
                ok = false;
                detail = "transversal {" + subset_string(idx) + "}, subset {" +
                         subset_string(a) + "}: rk Gamma^A = " + std::to_string(stab_rank) +
                         " < rk Gamma_A = " + std::to_string(proj_rank);
                break;
              }
            } while (detail::next_combination(pick, m));
          }
          if (!ok) break;
          FieldVector origin(m, FieldElement::zero(arr.field()));
          auto orbits = arr.point_orbits_on(idx, origin);
          if (!orbits.finite) {
            ok = false;
            detail = "transversal {" + subset_string(idx) +
                     "}: infinitely many point orbits along the frame";
            break;
          }
        } while (detail::next_combination(idx, arr.planes().size()));
      }
      rep.checks.push_back({"point-orbit-rank-gap", ok ? "pass" : "fail",
                            ok ? "no rank gaps along transversal frames" : detail});
      if (!ok) failed = true;
    } catch (const DomainError& e) {
      rep.checks.push_back({"point-orbit-rank-gap", "skipped", e.what()});
      skipped = true;
    }
  }

  if (m >= 2)
    rep.notes.push_back(
        "for defining data in generic position the cohomology of a pattern of this "
        "codimension is infinitely generated; genericity itself is not decided here");

  if (failed)
    rep.verdict = "INFINITELY_GENERATED";
  else if (skipped)
    rep.verdict = "UNKNOWN";
  else
    rep.verdict = "NO_OBSTRUCTION";
  return rep;
}

}  // namespace projtop
