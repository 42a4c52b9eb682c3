#pragma once

// Pipeline driver and machine-readable reports.  run_pipeline() takes a
// loaded input file through derivation, orbit enumeration, rank computation
// and the obstruction tests; the json_* builders render the results with
// every count as an exact decimal string.  Reports carry no timing or
// environment data, so repeated runs on the same input are byte-identical.

#include <projtop/invariants.hpp>
#include <projtop/io.hpp>

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace projtop {

using Json = nlohmann::ordered_json;

inline constexpr int report_schema_version = 1;
inline constexpr const char* tool_version = "0.1.0";

// --- exact scalar rendering --------------------------------------------------

inline std::string decimal(const Integer& v) { return v.get_str(); }
inline std::string decimal(std::size_t v) { return std::to_string(v); }

inline Json json_element(const FieldElement& e) {
  Json out = Json::array();
  for (const auto& c : e.coeffs()) out.push_back(to_string(c));
  return out;
}

inline Json json_field_vector(const FieldVector& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(json_element(e));
  return out;
}

inline Json json_integer_rows(const IntegerMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(decimal(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

// --- pipeline ----------------------------------------------------------------

// Everything the reporting commands need, computed once.  For scheme payloads
// the scheme is first validated and derived; arrangement payloads go straight
// to orbit enumeration; acceptance-interval payloads pass through the
// one-dimensional construction.
struct PipelineResult {
  InputFile input;
  std::optional<std::size_t> pattern_dim;  // known only for scheme payloads
  std::optional<SchemeInternal> internal;
  std::optional<PlaneFamily> family;
  std::optional<std::size_t> orientation_count;
  std::optional<Arrangement> arrangement;
  std::optional<TablesResult> tables;
  std::optional<RankReport> ranks;
  ObstructionReport obstruction;
};

inline PipelineResult run_pipeline(InputFile in, ArrangementOptions opts = {}) {
  PipelineResult res;
  res.input = std::move(in);
  const InputFile& file = res.input;

  if (file.scheme) {
    const ProjectionScheme& s = *file.scheme;
    SchemeDiagnostics diag = validate_scheme(s);
    if (!diag.ok) {
      std::string detail;
      for (const auto& c : diag.checks)
        if (!c.pass) detail += (detail.empty() ? "" : "; ") + c.check + ": " + c.detail;
      throw InvalidScheme(detail);
    }
    res.pattern_dim = s.pattern_dim;
    res.internal = derive_internal(s);
    const SchemeInternal& internal = *res.internal;
    if (internal.codim == 1) {
      res.arrangement = codim1_arrangement(codim1_domain(s, internal), opts);
    } else {
      Orientations ori = enumerate_orientations(internal, s.field);
      res.orientation_count = ori.istar_v.size();
      res.family = derive_hyperplane_classes(s, internal, ori, opts);
      if (res.family->finite) res.arrangement = scheme_arrangement(s, internal, *res.family, opts);
    }
  } else if (file.arrangement) {
    const ArrangementInput& a = *file.arrangement;
    res.arrangement = Arrangement(file.field, a.dim_v, a.gamma, a.planes, opts);
  } else {
    res.arrangement = codim1_arrangement(*file.codim1, opts);
  }

  if (res.arrangement) {
    res.tables = build_orbit_tables(*res.arrangement);
    res.ranks = compute_ranks(*res.arrangement, *res.tables);
  }

  // Obstruction verdict: the scheme-level family test and the orbit-family
  // finiteness are necessary conditions on top of the group-theoretic checks.
  ObstructionReport ob;
  bool failed = false;
  if (res.family) {
    if (!res.family->finite) {
      ob.checks.push_back({"hyperplane-family-finiteness", "fail",
                           "infinitely many parallel hyperplane classes for face subset {" +
                               detail::subset_string(res.family->witness_subset) + "}"});
      failed = true;
    } else {
      ob.checks.push_back({"hyperplane-family-finiteness", "pass",
                           decimal(res.family->classes.size()) + " hyperplane class(es)"});
    }
  }
  if (res.arrangement) {
    ObstructionReport inner = obstruction_check(*res.arrangement);
    for (auto& c : inner.checks) ob.checks.push_back(std::move(c));
    for (auto& n : inner.notes) ob.notes.push_back(std::move(n));
    if (inner.verdict == "INFINITELY_GENERATED") failed = true;
    if (res.tables) {
      if (!res.tables->finite) {
        ob.checks.push_back({"orbit-family-finiteness", "fail", res.tables->witness});
        failed = true;
      } else {
        ob.checks.push_back({"orbit-family-finiteness", "pass", "all orbit families are finite"});
      }
    }
    ob.verdict = failed ? "INFINITELY_GENERATED" : inner.verdict;
  } else {
    ob.verdict = failed ? "INFINITELY_GENERATED" : "UNKNOWN";
  }
  res.obstruction = std::move(ob);
  return res;
}

// --- report sections -----------------------------------------------------------

inline Json report_header(const InputFile& in) {
  Json out;
  out["schema_version"] = report_schema_version;
  out["tool_version"] = tool_version;
  Json input;
  input["path"] = in.source_path;
  input["digest"] = in.digest;
  input["label"] = in.label;
  input["payload"] = in.payload_name();
  out["input"] = std::move(input);
  return out;
}

inline Json json_derived(const PipelineResult& res) {
  Json out;
  if (res.internal) {
    const SchemeInternal& in = *res.internal;
    out["N"] = decimal(in.ambient);
    out["d"] = decimal(in.pattern_dim);
    out["codim"] = decimal(in.codim);
    out["rk_delta"] = decimal(in.rk_delta);
    out["dim_v"] = decimal(in.dim_v);
    out["rk_gamma"] = decimal(in.gamma_rank);
    out["nu"] = to_string(in.nu);
    if (res.orientation_count) out["face_orientations"] = decimal(*res.orientation_count);
    if (res.family && res.family->finite)
      out["hyperplane_classes"] = decimal(res.family->classes.size());
  } else if (res.arrangement) {
    const Arrangement& arr = *res.arrangement;
    out["dim_v"] = decimal(arr.dim());
    out["rk_gamma"] = decimal(arr.group_rank());
    out["nu"] = to_string(make_rational(Integer(arr.group_rank()), Integer(arr.dim())));
    out["hyperplane_classes"] = decimal(arr.planes().size());
  }
  return out;
}

inline Json json_hypotheses(const PipelineResult& res) {
  Json out;
  if (res.family) out["hyperplane_family_finite"] = res.family->finite;
  if (res.tables) out["orbit_tables_finite"] = res.tables->finite;
  if (res.ranks) out["closed_formulas_apply"] = res.ranks->formulas_apply;
  return out;
}

inline Json json_orbit_summary(const TablesResult& tr) {
  Json out;
  out["finite"] = tr.finite;
  if (!tr.finite) {
    out["witness"] = tr.witness;
    return out;
  }
  const OrbitTables& t = tr.tables;
  Json counts = Json::array();
  for (std::size_t l = 0; l < t.levels.size(); ++l) counts.push_back(decimal(t.count(l)));
  out["level_counts"] = std::move(counts);
  Json rel = Json::array();
  for (std::size_t l = 1; l < t.levels.size(); ++l) {
    Json sums = Json::array();
    for (std::size_t j = 0; j < l; ++j) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < t.levels[l].size(); ++c) total += t.relatives[l][c][j].size();
      sums.push_back(decimal(total));
    }
    Json entry;
    entry["level"] = decimal(l);
    entry["relative_class_totals"] = std::move(sums);
    rel.push_back(std::move(entry));
  }
  out["relative_sums"] = std::move(rel);
  return out;
}

inline Json json_ranks(const RankReport& rep, std::optional<std::size_t> pattern_dim) {
  Json out;
  out["dim_v"] = decimal(rep.codim);
  out["rk_gamma"] = decimal(rep.group_rank);
  out["nu"] = to_string(rep.nu);
  out["formulas_apply"] = rep.formulas_apply;
  if (!rep.level_counts.empty()) {
    Json counts = Json::array();
    for (const auto& v : rep.level_counts) counts.push_back(decimal(v));
    out["level_counts"] = std::move(counts);
    out["euler"] = decimal(rep.euler);
  }
  if (rep.formulas_apply) {
    Json d = Json::array();
    for (const auto& v : rep.d) d.push_back(decimal(v));
    out["d"] = std::move(d);
    out["k0"] = decimal(rep.k0);
    out["k1"] = decimal(rep.k1);
    out["free_abelian"] = rep.free_abelian;
    if (!rep.aux.empty()) {
      Json aux = Json::array();
      for (const auto& v : rep.aux) aux.push_back(decimal(v));
      out["span_rank_corrections"] = std::move(aux);
    }
    if (rep.codim == 3) out["l_tilde1"] = decimal(rep.l_tilde1);
  }
  Json notes = Json::array();
  for (const auto& n : rep.notes) notes.push_back(n);
  if (rep.formulas_apply && (!pattern_dim || *pattern_dim != 3))
    notes.push_back(
        "K-theory parity (even cohomology degrees into K0) follows the convention fixed on "
        "the three-dimensional icosahedral example");
  out["notes"] = std::move(notes);
  return out;
}

inline Json json_obstruction(const ObstructionReport& rep) {
  Json out;
  out["verdict"] = rep.verdict;
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json item;
    item["rule"] = c.rule;
    item["status"] = c.status;
    item["detail"] = c.detail;
    checks.push_back(std::move(item));
  }
  out["checks"] = std::move(checks);
  Json notes = Json::array();
  for (const auto& n : rep.notes) notes.push_back(n);
  out["notes"] = std::move(notes);
  return out;
}

// Full orbit catalogue: per level the classes with direction, stabilizer and
// witness planes; for positive levels the relative classes they contain,
// grouped by global identifier with multiplicities.
inline Json json_orbit_tables(const TablesResult& tr) {
  Json out;
  out["finite"] = tr.finite;
  if (!tr.finite) {
    out["witness"] = tr.witness;
    return out;
  }
  const OrbitTables& t = tr.tables;
  Json levels = Json::array();
  for (std::size_t l = 0; l < t.levels.size(); ++l) {
    Json classes = Json::array();
    for (std::size_t c = 0; c < t.levels[l].size(); ++c) {
      const SingularClass& sc = t.levels[l][c];
      Json item;
      item["id"] = decimal(c);
      item["level"] = decimal(l);
      Json dir = Json::array();
      for (std::size_t i = 0; i < sc.direction.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < sc.direction.cols(); ++j)
          row.push_back(json_element(sc.direction(i, j)));
        dir.push_back(std::move(row));
      }
      item["direction"] = std::move(dir);
      item["point"] = json_field_vector(sc.point);
      item["stabilizer_rank"] = decimal(sc.stabilizer.rank());
      item["stabilizer_basis"] = json_integer_rows(sc.stabilizer.basis());
      Json witness = Json::array();
      if (!sc.generating_subsets.empty())
        for (auto p : sc.generating_subsets.front()) witness.push_back(decimal(p));
      item["witness_planes"] = std::move(witness);
      if (l > 0) {
        Json contains = Json::array();
        for (std::size_t j = 0; j < l; ++j) {
          // group repeated global children as multiplicities
          std::vector<std::pair<std::size_t, std::size_t>> mult;
          for (const auto& rc : t.relatives[l][c][j]) {
            bool found = false;
            for (auto& [gid, count] : mult)
              if (gid == rc.global_id) {
                ++count;
                found = true;
                break;
              }
            if (!found) mult.emplace_back(rc.global_id, 1);
          }
          std::sort(mult.begin(), mult.end());
          for (const auto& [gid, count] : mult) {
            Json child;
            child["level"] = decimal(j);
            child["id"] = decimal(gid);
            child["multiplicity"] = decimal(count);
            contains.push_back(std::move(child));
          }
        }
        item["contains"] = std::move(contains);
      }
      classes.push_back(std::move(item));
    }
    levels.push_back(std::move(classes));
  }
  out["levels"] = std::move(levels);
  return out;
}

// --- full command reports ------------------------------------------------------

inline Json invariants_report(const PipelineResult& res) {
  Json out = report_header(res.input);
  out["derived"] = json_derived(res);
  out["hypotheses"] = json_hypotheses(res);
  if (res.tables) out["orbit_summary"] = json_orbit_summary(*res.tables);
  if (res.ranks) out["ranks"] = json_ranks(*res.ranks, res.pattern_dim);
  out["obstruction"] = json_obstruction(res.obstruction);
  return out;
}

inline Json arrangement_report(const PipelineResult& res) {
  Json out = report_header(res.input);
  out["derived"] = json_derived(res);
  if (res.arrangement) {
    Json planes = Json::array();
    for (const auto& p : res.arrangement->planes()) {
      Json item;
      item["normal"] = json_field_vector(p.normal);
      item["offset"] = json_element(p.offset);
      Json prov = Json::array();
      for (const auto& s : p.provenance) prov.push_back(s);
      item["provenance"] = std::move(prov);
      planes.push_back(std::move(item));
    }
    out["hyperplane_classes"] = std::move(planes);
  }
  if (res.tables) out["orbit_tables"] = json_orbit_tables(*res.tables);
  return out;
}

inline Json obstruction_report(const PipelineResult& res) {
  Json out = report_header(res.input);
  out["derived"] = json_derived(res);
  out["obstruction"] = json_obstruction(res.obstruction);
  return out;
}

}  // namespace projtop
