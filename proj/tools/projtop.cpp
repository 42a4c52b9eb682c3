// Command-line front end: validate inputs, compute invariant reports, dump
// orbit catalogues, run the obstruction tests, generate point patterns and
// run the built-in self-test.
//
// Exit codes: 0 success, 1 domain error (structured JSON on stderr), 2 usage.

#include <projtop/pattern.hpp>
#include <projtop/report.hpp>
#include <projtop/selftest.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace projtop;

struct Options {
  std::string file;
  bool json = false;
  std::string out;
  std::string radius;
  std::string offset;
  std::string format = "csv";
  std::string svg_axes = "0,1";
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t subset_cap = 200000;
  std::size_t coset_cap = 100000;
};

ArrangementOptions arrangement_options(const Options& opt) {
  ArrangementOptions a;
  a.subset_cap = opt.subset_cap;
  a.coset_cap = opt.coset_cap;
  return a;
}

void emit(const Json& report, const Options& opt) {
  if (opt.out.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream os(opt.out, std::ios::binary);
  if (!os) throw IOFailure("cannot write '" + opt.out + "'");
  os << report.dump(2) << "\n";
  std::cout << "report written to " << opt.out << "\n";
}

// Comma-separated field elements; each element is a rational "p/q" or a
// semicolon-joined ascending coefficient list ("0;1/2" is (1/2)*x).
FieldVector parse_offset(const std::string& text, const FieldPtr& f, std::size_t len) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != len)
    throw DomainError("ParseError",
                      "offset needs " + std::to_string(len) + " comma-separated entries");
  FieldVector out;
  for (const auto& part : parts) {
    std::vector<Rational> coeffs;
    std::string piece;
    for (char c : part + ";") {
      if (c == ';') {
        coeffs.push_back(parse_rational(piece.empty() ? "0" : piece));
        piece.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        piece += c;
      }
    }
    if (coeffs.size() > static_cast<std::size_t>(f->degree()))
      throw DomainError("ParseError", "offset entry longer than the field degree");
    out.push_back(FieldElement(f, std::move(coeffs)));
  }
  return out;
}

int cmd_validate(const Options& opt) {
  InputFile file = load_input_file(opt.file);
  std::cout << "input: " << file.source_path << "\n";
  std::cout << "digest: " << file.digest << "\n";
  std::cout << "payload: " << file.payload_name();
  if (!file.label.empty()) std::cout << " (label \"" << file.label << "\")";
  std::cout << "\n";

  if (file.scheme) {
    SchemeDiagnostics diag = validate_scheme(*file.scheme);
    for (const auto& c : diag.checks) {
      std::cout << "check " << c.check << ": " << (c.pass ? "ok" : "FAIL");
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }
    if (!diag.ok) {
      std::cout << "invalid\n";
      return 1;
    }
    SchemeInternal in = derive_internal(*file.scheme);
    std::cout << "derived: N=" << in.ambient << " d=" << in.pattern_dim
              << " rk_delta=" << in.rk_delta << " dim_v=" << in.dim_v
              << " rk_gamma=" << in.gamma_rank << " nu=" << to_string(in.nu) << "\n";
  } else if (file.arrangement) {
    const ArrangementInput& a = *file.arrangement;
    Arrangement arr(file.field, a.dim_v, a.gamma, a.planes, arrangement_options(opt));
    std::cout << "check arrangement-consistency: ok (dim_v=" << arr.dim()
              << " rk_gamma=" << arr.group_rank() << " classes=" << arr.planes().size() << ")\n";
  } else {
    validate_codim1(*file.codim1);
    std::cout << "check acceptance-intervals: ok (" << file.codim1->projections.size()
              << " projections, " << file.codim1->intervals.size() << " intervals)\n";
  }
  std::cout << "valid\n";
  return 0;
}

void print_human_invariants(const PipelineResult& res) {
  const InputFile& file = res.input;
  std::cout << "input: " << file.source_path << " (digest " << file.digest << ")\n";
  if (!file.label.empty()) std::cout << "label: " << file.label << "\n";
  if (res.internal) {
    const SchemeInternal& in = *res.internal;
    std::cout << "scheme: N=" << in.ambient << " d=" << in.pattern_dim << " codim=" << in.codim
              << " | rk_delta=" << in.rk_delta << " dim_v=" << in.dim_v
              << " rk_gamma=" << in.gamma_rank << " nu=" << to_string(in.nu) << "\n";
    if (res.family && res.family->finite)
      std::cout << "hyperplane classes: " << res.family->classes.size() << "\n";
  } else if (res.arrangement) {
    std::cout << "arrangement: dim_v=" << res.arrangement->dim()
              << " rk_gamma=" << res.arrangement->group_rank()
              << " classes=" << res.arrangement->planes().size() << "\n";
  }
  if (res.family && !res.family->finite) {
    std::cout << "hyperplane family: INFINITE (face subset {"
              << detail::subset_string(res.family->witness_subset) << "})\n";
  }
  if (res.ranks) {
    const RankReport& rep = *res.ranks;
    if (!rep.level_counts.empty()) {
      std::cout << "orbit classes by level:";
      for (std::size_t l = 0; l < rep.level_counts.size(); ++l)
        std::cout << " L_" << l << "=" << rep.level_counts[l].get_str();
      std::cout << "\n";
      if (rep.codim == 3) std::cout << "relative line count: " << rep.l_tilde1.get_str() << "\n";
      std::cout << "euler characteristic: " << rep.euler.get_str() << "\n";
    }
    if (!rep.aux.empty()) {
      std::cout << "span-rank corrections:";
      for (std::size_t i = 0; i < rep.aux.size(); ++i)
        std::cout << " p=" << (i + 1) << ": " << rep.aux[i].get_str();
      std::cout << "\n";
    }
    if (rep.formulas_apply) {
      std::cout << "cohomology ranks:";
      for (std::size_t p = 0; p < rep.d.size(); ++p)
        std::cout << " D_" << p << "=" << rep.d[p].get_str();
      std::cout << "\n";
      std::cout << "k-theory ranks: K_0=" << rep.k0.get_str() << " K_1=" << rep.k1.get_str()
                << "\n";
    }
    for (const auto& n : rep.notes) std::cout << "note: " << n << "\n";
  }
  std::cout << "obstruction verdict: " << res.obstruction.verdict << "\n";
}

int cmd_invariants(const Options& opt) {
  PipelineResult res = run_pipeline(load_input_file(opt.file), arrangement_options(opt));
  if (opt.json || !opt.out.empty()) {
    emit(invariants_report(res), opt);
  } else {
    print_human_invariants(res);
  }
  return 0;
}

int cmd_arrangement(const Options& opt) {
  PipelineResult res = run_pipeline(load_input_file(opt.file), arrangement_options(opt));
  if (opt.json) {
    emit(arrangement_report(res), opt);
    return 0;
  }
  const InputFile& file = res.input;
  std::cout << "input: " << file.source_path << " (digest " << file.digest << ")\n";
  if (!res.arrangement) {
    std::cout << "hyperplane family: INFINITE (face subset {"
              << detail::subset_string(res.family->witness_subset) << "})\n";
    return 0;
  }
  const Arrangement& arr = *res.arrangement;
  std::cout << "dim_v=" << arr.dim() << " rk_gamma=" << arr.group_rank() << "\n";
  std::cout << "hyperplane classes (" << arr.planes().size() << "):\n";
  for (std::size_t i = 0; i < arr.planes().size(); ++i) {
    const HyperplaneClass& p = arr.planes()[i];
    std::cout << "  [" << i << "] normal=(";
    for (std::size_t j = 0; j < p.normal.size(); ++j)
      std::cout << (j ? ", " : "") << to_string(p.normal[j]);
    std::cout << ") offset=" << to_string(p.offset);
    for (const auto& s : p.provenance) std::cout << "  # " << s;
    std::cout << "\n";
  }
  if (!res.tables->finite) {
    std::cout << "orbit tables: INFINITE (" << res.tables->witness << ")\n";
    return 0;
  }
  const OrbitTables& t = res.tables->tables;
  for (std::size_t l = 0; l < t.levels.size(); ++l) {
    std::cout << "level " << l << " classes (" << t.count(l) << "):\n";
    for (std::size_t c = 0; c < t.levels[l].size(); ++c) {
      const SingularClass& sc = t.levels[l][c];
      std::cout << "  [" << c << "] stabilizer rank " << sc.stabilizer.rank();
      if (!sc.generating_subsets.empty()) {
        std::cout << ", planes {";
        const auto& w = sc.generating_subsets.front();
        for (std::size_t j = 0; j < w.size(); ++j) std::cout << (j ? "," : "") << w[j];
        std::cout << "}";
      }
      if (l > 0) {
        std::cout << ", contains";
        for (std::size_t j = 0; j < l; ++j)
          std::cout << " " << t.relatives[l][c][j].size() << " level-" << j;
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_obstruction(const Options& opt) {
  PipelineResult res = run_pipeline(load_input_file(opt.file), arrangement_options(opt));
  if (opt.json) {
    emit(obstruction_report(res), opt);
    return 0;
  }
  std::cout << "input: " << res.input.source_path << " (digest " << res.input.digest << ")\n";
  std::cout << "verdict: " << res.obstruction.verdict << "\n";
  for (const auto& c : res.obstruction.checks)
    std::cout << "check " << c.rule << ": " << c.status
              << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
  for (const auto& n : res.obstruction.notes) std::cout << "note: " << n << "\n";
  return 0;
}

int cmd_pattern(const Options& opt) {
  InputFile file = load_input_file(opt.file);
  if (!file.scheme)
    throw DomainError("UnsupportedPayload", "pattern generation needs a [scheme] input");
  const ProjectionScheme& s = *file.scheme;
  SchemeDiagnostics diag = validate_scheme(s);
  if (!diag.ok) {
    std::string detail;
    for (const auto& c : diag.checks)
      if (!c.pass) detail += (detail.empty() ? "" : "; ") + c.check + ": " + c.detail;
    throw InvalidScheme(detail);
  }
  SchemeInternal in = derive_internal(s);

  Rational radius = parse_rational(opt.radius);
  FieldVector u = s.shift;
  if (!opt.offset.empty()) u = parse_offset(opt.offset, s.field, s.ambient);
  if (u.empty()) u.assign(s.ambient, FieldElement::zero(s.field));

  PointPattern pat = generate_pattern(s, in, u, radius);

  std::ofstream os(opt.out, std::ios::binary);
  if (!os) throw IOFailure("cannot write '" + opt.out + "'");
  if (opt.format == "svg") {
    std::size_t a = 0, b = 1;
    if (std::sscanf(opt.svg_axes.c_str(), "%zu,%zu", &a, &b) != 2)
      throw DomainError("ParseError", "svg axes must be two comma-separated indices");
    export_svg(s, pat, os, {a, b});
  } else {
    export_csv(pat, os);
  }
  std::cout << "pattern: " << pat.strip_points.size() << " points within radius "
            << to_string(radius) << "; window facets: "
            << zonotope_facets(s, in).facet_count() << "; written to " << opt.out << "\n";
  return 0;
}

int cmd_selftest(const Options& opt) {
  std::cout << "seed: " << opt.seed << "\n";
  if (opt.threads != 1)
    std::cout << "threads: requested " << opt.threads << ", running serially for determinism\n";
  bool ok = run_selftest(opt.seed, 1000, std::cout);
  std::cout << (ok ? "selftest passed\n" : "selftest FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Topological invariants of cut-and-project point patterns"};
  app.require_subcommand(1);

  auto add_caps = [&](CLI::App* cmd) {
    cmd->add_option("--subset-cap", opt.subset_cap, "independent subsets examined per level");
    cmd->add_option("--coset-cap", opt.coset_cap, "coset representatives enumerated per split");
  };

  CLI::App* validate = app.add_subcommand("validate", "check an input file");
  validate->add_option("file", opt.file, "input TOML file")->required();
  add_caps(validate);

  CLI::App* invariants = app.add_subcommand("invariants", "compute the full invariant report");
  invariants->add_option("file", opt.file, "input TOML file")->required();
  invariants->add_flag("--json", opt.json, "emit machine-readable JSON");
  invariants->add_option("--out", opt.out, "write the JSON report to a file");
  add_caps(invariants);

  CLI::App* arrangement = app.add_subcommand("arrangement", "dump the orbit catalogue");
  arrangement->add_option("file", opt.file, "input TOML file")->required();
  arrangement->add_flag("--json", opt.json, "emit machine-readable JSON");
  add_caps(arrangement);

  CLI::App* obstruction = app.add_subcommand("obstruction", "run the finiteness obstruction tests");
  obstruction->add_option("file", opt.file, "input TOML file")->required();
  obstruction->add_flag("--json", opt.json, "emit machine-readable JSON");
  add_caps(obstruction);

  CLI::App* pattern = app.add_subcommand("pattern", "generate the point pattern");
  pattern->add_option("file", opt.file, "input TOML file")->required();
  pattern->add_option("--radius", opt.radius, "physical window radius (rational)")->required();
  pattern->add_option("--offset", opt.offset, "override the lattice shift u");
  pattern->add_option("--format", opt.format, "csv or svg")
      ->check(CLI::IsMember({"csv", "svg"}));
  pattern->add_option("--out", opt.out, "output file")->required();
  pattern->add_option("--svg-axes", opt.svg_axes, "projection axes for 3-d SVG (default 0,1)");

  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in golden suite");
  selftest->add_option("--seed", opt.seed, "seed for the randomized batteries");
  selftest->add_option("--threads", opt.threads, "worker cap (runs serially regardless)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(opt);
    if (app.got_subcommand(invariants)) return cmd_invariants(opt);
    if (app.got_subcommand(arrangement)) return cmd_arrangement(opt);
    if (app.got_subcommand(obstruction)) return cmd_obstruction(opt);
    if (app.got_subcommand(pattern)) return cmd_pattern(opt);
    if (app.got_subcommand(selftest)) return cmd_selftest(opt);
  } catch (const projtop::DomainError& e) {
    Json err;
    err["error"] = e.name();
    err["detail"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    Json err;
    err["error"] = "Internal";
    err["detail"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
