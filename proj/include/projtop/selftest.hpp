#pragma once

// Built-in self-test: the golden icosahedral arrangement numbers, the
// one-dimensional acceptance constructions, an Euler cross-check and a seeded
// exact-linear-algebra property battery.  All reference data are embedded so
// the test runs location-independently; everything is deterministic for a
// fixed seed.

#include <projtop/invariants.hpp>
#include <projtop/scheme.hpp>

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace projtop {

namespace detail {

struct SelftestState {
  std::ostream& os;
  std::size_t checked = 0;
  std::size_t failed = 0;

  void check(bool pass, const std::string& what) {
    ++checked;
    if (!pass) {
      ++failed;
      os << "  FAIL: " << what << "\n";
    }
  }
};

// The six-fold symmetric arrangement on a three-dimensional internal space
// over Z[tau], tau^2 = tau + 1: six group generators and fifteen plane
// classes, all offsets zero.  Entries are (rational, tau) coefficient pairs.
inline Arrangement golden_icosahedral_arrangement(FieldPtr f) {
  static const long gamma_data[6][3][2] = {
      {{0, 1}, {1, 0}, {0, 0}}, {{0, -1}, {1, 0}, {0, 0}}, {{0, 0}, {0, 1}, {-1, 0}},
      {{0, 0}, {0, 1}, {1, 0}}, {{1, 0}, {0, 0}, {0, -1}}, {{1, 0}, {0, 0}, {0, 1}},
  };
  static const long normal_data[15][3][2] = {
      {{0, 0}, {0, 0}, {1, 0}},    {{0, 0}, {1, 0}, {0, 0}},    {{1, 0}, {0, -1}, {-1, -1}},
      {{1, 0}, {0, -1}, {1, -1}},  {{1, 0}, {0, -1}, {1, 1}},   {{1, 0}, {0, -1}, {-1, 1}},
      {{1, 0}, {0, 0}, {0, 0}},    {{1, 0}, {2, -1}, {1, -1}},  {{1, 0}, {2, -1}, {-1, 1}},
      {{1, 0}, {-2, 1}, {1, -1}},  {{1, 0}, {-2, 1}, {-1, 1}},  {{1, 0}, {0, 1}, {-1, -1}},
      {{1, 0}, {0, 1}, {1, -1}},   {{1, 0}, {0, 1}, {1, 1}},    {{1, 0}, {0, 1}, {-1, 1}},
  };
  auto el = [&](const long (&c)[2]) {
    return FieldElement(f, {Rational(c[0]), Rational(c[1])});
  };
  std::vector<FieldVector> gamma;
  for (const auto& row : gamma_data) gamma.push_back({el(row[0]), el(row[1]), el(row[2])});
  std::vector<HyperplaneClass> planes;
  for (const auto& row : normal_data) {
    HyperplaneClass h;
    h.normal = {el(row[0]), el(row[1]), el(row[2])};
    h.offset = FieldElement::zero(f);
    planes.push_back(std::move(h));
  }
  return Arrangement(std::move(f), 3, std::move(gamma), std::move(planes));
}

inline void selftest_golden(SelftestState& st) {
  auto f = std::make_shared<const NumberField>(std::vector<Integer>{-1, -1, 1}, Rational(1),
                                               Rational(2));
  Arrangement arr = golden_icosahedral_arrangement(f);
  TablesResult tr = build_orbit_tables(arr);
  st.check(tr.finite, "golden orbit tables are finite");
  if (!tr.finite) return;
  const OrbitTables& t = tr.tables;
  st.check(t.count(0) == 32, "golden L_0 = 32");
  st.check(t.count(1) == 46, "golden L_1 = 46");
  st.check(t.count(2) == 15, "golden L_2 = 15");

  // line classes grouped by the number of plane directions through them
  std::size_t in2 = 0, in3 = 0, in5 = 0;
  for (const auto& c : t.levels[1]) {
    std::size_t hits = 0;
    for (const auto& p : arr.planes()) {
      FieldElement dot = FieldElement::zero(f);
      for (std::size_t j = 0; j < 3; ++j) dot = dot + p.normal[j] * c.direction(0, j);
      if (dot.is_zero()) ++hits;
    }
    if (hits == 2) ++in2;
    if (hits == 3) ++in3;
    if (hits == 5) ++in5;
  }
  st.check(in2 == 30 && in3 == 10 && in5 == 6, "golden line split 30 + 10 + 6");

  // relative counts: 8 line and 8 point classes per plane class, relative
  // point total 24 per plane class, 152 over all line classes
  bool rel_ok = true;
  for (std::size_t c = 0; c < t.levels[2].size(); ++c) {
    if (t.relatives[2][c][1].size() != 8 || t.relatives[2][c][0].size() != 8) rel_ok = false;
    std::size_t sum = 0;
    for (const auto& rc : t.relatives[2][c][1]) sum += t.relatives[1][rc.global_id][0].size();
    if (sum != 24) rel_ok = false;
  }
  st.check(rel_ok, "golden relative counts per plane class (8, 8, 24)");
  std::size_t total = 0;
  for (std::size_t c = 0; c < t.levels[1].size(); ++c) total += t.relatives[1][c][0].size();
  st.check(total == 152, "golden relative point total 152");

  bool stabs_ok = true;
  for (const auto& c : t.levels[1]) stabs_ok = stabs_ok && c.stabilizer.rank() == 2;
  for (const auto& c : t.levels[2]) stabs_ok = stabs_ok && c.stabilizer.rank() == 4;
  st.check(stabs_ok, "golden stabilizer ranks (lines 2, planes 4)");

  RankReport rep = compute_ranks(arr, tr);
  st.check(rep.formulas_apply, "golden formulas apply");
  st.check(rep.l_tilde1 == 74, "golden relative line count 74");
  st.check(rep.aux.size() >= 2 && rep.aux[0] == 69 && rep.aux[1] == 9,
           "golden span-rank corrections (69, 9)");
  st.check(rep.euler == 120, "golden euler characteristic 120");
  std::vector<Integer> want = {Integer(180), Integer(71), Integer(12), Integer(1)};
  st.check(rep.d == want, "golden cohomology ranks (180, 71, 12, 1)");
  st.check(rep.k0 == 192 && rep.k1 == 72, "golden k-theory ranks (192, 72)");
  st.check(obstruction_check(arr).verdict == "NO_OBSTRUCTION", "golden verdict NO_OBSTRUCTION");
}

inline void selftest_codim1(SelftestState& st) {
  auto f = std::make_shared<const NumberField>(std::vector<Integer>{-1, -1, 1}, Rational(1),
                                               Rational(2));
  auto el = [&](long a, long b) { return FieldElement(f, {Rational(a), Rational(b)}); };

  Codim1Domain fib;
  fib.field = f;
  fib.projections = {el(1, 0), el(0, 1)};
  fib.intervals = {{el(0, 0), el(1, 1)}};
  st.check(codim1_orbit_count(fib) == 1, "one-interval domain has one endpoint class");
  Arrangement arr = codim1_arrangement(fib);
  RankReport rep = compute_ranks(arr, build_orbit_tables(arr));
  std::vector<Integer> want = {Integer(2), Integer(1)};
  st.check(rep.d == want, "one-interval ranks (2, 1)");
  st.check(rep.k0 == 2 && rep.k1 == 1, "one-interval k-theory (2, 1)");

  Codim1Domain two;
  two.field = f;
  two.projections = {el(1, 0), el(0, 1)};
  two.intervals = {{el(0, 0), FieldElement(f, {Rational(1, 2)})}, {el(1, 0), el(1, 1)}};
  st.check(codim1_orbit_count(two) == 2, "two-interval domain has two endpoint classes");
  Arrangement arr2 = codim1_arrangement(two);
  RankReport rep2 = compute_ranks(arr2, build_orbit_tables(arr2));
  std::vector<Integer> want2 = {Integer(3), Integer(1)};
  st.check(rep2.d == want2, "two-interval ranks (3, 1)");
}

// The alternating sum of the closed-formula ranks must reproduce the chain
// Euler number computed independently from the orbit tables.
inline void selftest_euler(SelftestState& st) {
  auto f = std::make_shared<const NumberField>(std::vector<Integer>{-1, -1, 1}, Rational(1),
                                               Rational(2));
  std::vector<std::pair<std::string, Arrangement>> cases;
  cases.emplace_back("icosahedral", golden_icosahedral_arrangement(f));
  {
    auto el = [&](long a, long b) { return FieldElement(f, {Rational(a), Rational(b)}); };
    Codim1Domain fib;
    fib.field = f;
    fib.projections = {el(1, 0), el(0, 1)};
    fib.intervals = {{el(0, 0), el(1, 1)}};
    cases.emplace_back("one-interval", codim1_arrangement(fib));
  }
  for (auto& [name, arr] : cases) {
    TablesResult tr = build_orbit_tables(arr);
    RankReport rep = compute_ranks(arr, tr);
    if (!rep.formulas_apply) {
      st.check(false, name + ": formulas unexpectedly inapplicable");
      continue;
    }
    Integer alt = 0;
    for (std::size_t p = 0; p < rep.d.size(); ++p) alt += (p % 2 == 0) ? rep.d[p] : -rep.d[p];
    st.check(alt == rep.euler, name + ": alternating rank sum equals the Euler number");
    st.check(rep.euler == euler_chain(tr.tables), name + ": Euler number matches the chain sum");
  }
}

inline void selftest_linear_algebra(SelftestState& st, std::uint64_t seed, std::size_t rounds) {
  std::mt19937_64 rng(seed);
  auto entry = [&]() { return Integer(static_cast<long>(rng() % 41) - 20); };
  bool hnf_ok = true, snf_ok = true, kernel_ok = true, index_ok = true;

  for (std::size_t round = 0; round < rounds; ++round) {
    const std::size_t rows = 1 + rng() % 8, cols = 1 + rng() % 8;
    IntegerMatrix m(rows, cols, Integer(0));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = entry();

    HnfResult h = hnf(m);
    if (!(mat_mul(h.u, m) == h.h)) hnf_ok = false;
    if (abs(det_bareiss(h.u)) != 1) hnf_ok = false;
    for (std::size_t p = 0; p < h.pivot_cols.size(); ++p) {
      const Integer& pivot = h.h(p, h.pivot_cols[p]);
      if (pivot <= 0) hnf_ok = false;
      for (std::size_t i = 0; i < p; ++i) {
        const Integer& above = h.h(i, h.pivot_cols[p]);
        if (above < 0 || above >= pivot) hnf_ok = false;
      }
    }

    SnfResult s = snf(m);
    if (!(mat_mul(mat_mul(s.u, m), s.v) == s.s)) snf_ok = false;
    if (abs(det_bareiss(s.u)) != 1 || abs(det_bareiss(s.v)) != 1) snf_ok = false;
    if (s.rank != h.rank) snf_ok = false;
    for (std::size_t i = 0; i < s.s.rows(); ++i)
      for (std::size_t j = 0; j < s.s.cols(); ++j) {
        if (i != j && s.s(i, j) != 0) snf_ok = false;
        if (i == j && s.s(i, j) < 0) snf_ok = false;
      }
    for (std::size_t i = 0; i + 1 < std::min(s.s.rows(), s.s.cols()); ++i) {
      const Integer &a = s.s(i, i), &b = s.s(i + 1, i + 1);
      if (a == 0 && b != 0) snf_ok = false;
      if (a != 0 && b % a != 0) snf_ok = false;
    }

    // kernel rows annihilate the matrix and form a saturated sublattice
    IntegerMatrix k = integer_kernel(m);
    if (k.rows() + h.rank != cols) kernel_ok = false;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t kr = 0; kr < k.rows(); ++kr) {
        Integer dot = 0;
        for (std::size_t j = 0; j < cols; ++j) dot += m(i, j) * k(kr, j);
        if (dot != 0) kernel_ok = false;
      }
    if (k.rows() > 0) {
      SnfResult ks = snf(k);
      for (std::size_t i = 0; i < ks.rank; ++i)
        if (ks.s(i, i) != 1) kernel_ok = false;
    }

    // index of a diagonally scaled sublattice is the product of the scales,
    // and is invariant under unimodular changes of the sublattice basis
    if (h.rank > 0) {
      std::vector<std::vector<Integer>> sup_rows;
      for (std::size_t p = 0; p < h.rank; ++p) sup_rows.push_back(h.h.row(p));
      IntegerMatrix sup_m(sup_rows);
      Integer expected = 1;
      IntegerMatrix sub_m = sup_m;
      for (std::size_t p = 0; p < h.rank; ++p) {
        Integer scale(1 + static_cast<long>(rng() % 5));
        expected *= scale;
        for (std::size_t j = 0; j < cols; ++j) sub_m(p, j) *= scale;
      }
      // random unimodular recombination of the sublattice rows
      for (std::size_t step = 0; step < 2 * h.rank; ++step) {
        std::size_t a = rng() % h.rank, b = rng() % h.rank;
        if (a == b) continue;
        Integer c(static_cast<long>(rng() % 7) - 3);
        for (std::size_t j = 0; j < cols; ++j) sub_m(a, j) += c * sub_m(b, j);
      }
      Lattice sup = Lattice::from_rows(sup_m), sub = Lattice::from_rows(sub_m);
      IndexResult ix = subgroup_index(sub, sup);
      if (!ix.finite || ix.index != expected) index_ok = false;
    }
  }
  st.check(hnf_ok, "echelon factorization identities");
  st.check(snf_ok, "diagonal factorization identities and divisibility chain");
  st.check(kernel_ok, "kernel annihilation and saturation");
  st.check(index_ok, "subgroup index value and basis invariance");
}

}  // namespace detail

// Runs the full self-test; returns true iff every check passed.
inline bool run_selftest(std::uint64_t seed, std::size_t rounds, std::ostream& os) {
  detail::SelftestState st{os};
  os << "[1/4] golden icosahedral arrangement\n";
  detail::selftest_golden(st);
  os << "[2/4] one-dimensional acceptance domains\n";
  detail::selftest_codim1(st);
  os << "[3/4] euler cross-check\n";
  detail::selftest_euler(st);
  os << "[4/4] exact linear algebra battery (" << rounds << " rounds, seed " << seed << ")\n";
  detail::selftest_linear_algebra(st, seed, rounds);
  os << st.checked - st.failed << "/" << st.checked << " checks passed\n";
  return st.failed == 0;
}

}  // namespace projtop
