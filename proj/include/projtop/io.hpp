#pragma once

// Input file handling: the versioned TOML format with a [field] table and
// exactly one payload table ([scheme], [arrangement] or [codim1]), plus the
// content digest used to tie reports back to their inputs.

#include <projtop/pattern.hpp>
#include <projtop/scheme.hpp>
#include <projtop/toml.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace projtop {

struct IOFailure : DomainError {
  explicit IOFailure(const std::string& what) : DomainError("IOFailure", what) {}
};

// FNV-1a, 64 bit, over the raw file bytes; rendered as 16 hex digits.
inline std::string content_digest(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

struct ArrangementInput {
  std::size_t dim_v = 0;
  std::vector<FieldVector> gamma;
  std::vector<HyperplaneClass> planes;
};

struct InputFile {
  std::string source_path;
  std::string digest;
  FieldPtr field;
  std::string label;
  std::optional<ProjectionScheme> scheme;
  std::optional<ArrangementInput> arrangement;
  std::optional<Codim1Domain> codim1;

  const char* payload_name() const {
    if (scheme) return "scheme";
    if (arrangement) return "arrangement";
    return "codim1";
  }
};

namespace detail {

[[noreturn]] inline void input_fail(const TomlValue& at, const std::string& what) {
  throw DomainError("ParseError", "line " + std::to_string(at.line) + ": " + what);
}

inline const TomlValue& required(const TomlValue& table, const std::string& key) {
  const TomlValue* v = table.find(key);
  if (!v) input_fail(table, "missing key '" + key + "'");
  return *v;
}

inline void reject_unknown(const TomlValue& table, std::vector<std::string> allowed) {
  for (const auto& [key, value] : table.table)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      input_fail(value, "unknown key '" + key + "'");
}

inline Integer toml_integer(const TomlValue& v) {
  if (!v.is_integer()) input_fail(v, "expected an integer");
  return v.integer;
}

inline std::size_t toml_size(const TomlValue& v) {
  Integer i = toml_integer(v);
  if (i < 0) input_fail(v, "expected a nonnegative integer");
  return static_cast<std::size_t>(i.get_ui());
}

// Rationals are written as integers or "p/q" strings.
inline Rational toml_rational(const TomlValue& v) {
  if (v.is_integer()) return Rational(v.integer);
  if (v.is_string()) {
    try {
      return parse_rational(v.string);
    } catch (const DomainError& e) {
      input_fail(v, e.what());
    }
  }
  input_fail(v, "expected an integer or a \"p/q\" string");
}

// A field element is a rational scalar or an ascending coefficient list.
inline FieldElement toml_element(const TomlValue& v, const FieldPtr& f) {
  if (v.is_array()) {
    if (v.array.size() > static_cast<std::size_t>(f->degree()))
      input_fail(v, "coefficient list longer than the field degree");
    std::vector<Rational> coeffs;
    for (const auto& c : v.array) coeffs.push_back(toml_rational(c));
    return FieldElement(f, std::move(coeffs));
  }
  return FieldElement::from_rational(f, toml_rational(v));
}

inline FieldVector toml_vector(const TomlValue& v, const FieldPtr& f, std::size_t len,
                               const char* what) {
  if (!v.is_array() || v.array.size() != len)
    input_fail(v, std::string(what) + " must be an array of length " + std::to_string(len));
  FieldVector out;
  for (const auto& entry : v.array) out.push_back(toml_element(entry, f));
  return out;
}

inline FieldPtr load_field(const TomlValue& root) {
  const TomlValue* ft = root.find("field");
  if (!ft || !ft->is_table()) throw DomainError("ParseError", "missing [field] table");
  reject_unknown(*ft, {"min_poly", "root_interval"});
  const TomlValue& poly = required(*ft, "min_poly");
  if (!poly.is_array() || poly.array.size() < 2)
    input_fail(poly, "min_poly needs at least two ascending integer coefficients");
  std::vector<Integer> coeffs;
  for (const auto& c : poly.array) coeffs.push_back(toml_integer(c));
  const TomlValue& iv = required(*ft, "root_interval");
  if (!iv.is_array() || iv.array.size() != 2)
    input_fail(iv, "root_interval must be [lo, hi]");
  return std::make_shared<const NumberField>(std::move(coeffs), toml_rational(iv.array[0]),
                                             toml_rational(iv.array[1]));
}

}  // namespace detail

inline InputFile load_input(const std::string& text, const std::string& source_path = "") {
  TomlValue root = parse_toml(text);
  detail::reject_unknown(root, {"schema_version", "field", "scheme", "arrangement", "codim1"});

  const TomlValue& version = detail::required(root, "schema_version");
  if (!version.is_integer() || version.integer != 1)
    throw DomainError("UnsupportedVersion", "this tool reads schema_version = 1");

  InputFile out;
  out.source_path = source_path;
  out.digest = content_digest(text);
  out.field = detail::load_field(root);
  const FieldPtr& f = out.field;

  int payloads = 0;
  for (const char* name : {"scheme", "arrangement", "codim1"}) {
    const TomlValue* t = root.find(name);
    if (!t) continue;
    if (!t->is_table()) detail::input_fail(*t, std::string("[") + name + "] must be a table");
    ++payloads;
  }
  if (payloads != 1)
    throw DomainError("ParseError", "exactly one of [scheme], [arrangement], [codim1] required");

  if (const TomlValue* st = root.find("scheme")) {
    detail::reject_unknown(*st, {"N", "d", "E_basis", "u", "label"});
    ProjectionScheme s;
    s.field = f;
    s.ambient = detail::toml_size(detail::required(*st, "N"));
    s.pattern_dim = detail::toml_size(detail::required(*st, "d"));
    if (s.ambient == 0 || s.pattern_dim == 0 || s.pattern_dim >= s.ambient)
      detail::input_fail(*st, "need 0 < d < N");
    const TomlValue& eb = detail::required(*st, "E_basis");
    // stored row-per-lattice-coordinate (N rows of d entries), columns span E
    if (!eb.is_array() || eb.array.size() != s.ambient)
      detail::input_fail(eb, "E_basis must have N rows");
    s.e_basis.assign(s.pattern_dim, FieldVector(s.ambient, FieldElement::zero(f)));
    for (std::size_t i = 0; i < s.ambient; ++i) {
      FieldVector row = detail::toml_vector(eb.array[i], f, s.pattern_dim, "E_basis row");
      for (std::size_t j = 0; j < s.pattern_dim; ++j) s.e_basis[j][i] = row[j];
    }
    if (const TomlValue* u = st->find("u"))
      s.shift = detail::toml_vector(*u, f, s.ambient, "u");
    if (const TomlValue* label = st->find("label")) {
      if (!label->is_string()) detail::input_fail(*label, "label must be a string");
      s.label = label->string;
    }
    out.label = s.label;
    out.scheme = std::move(s);
  } else if (const TomlValue* at = root.find("arrangement")) {
    detail::reject_unknown(*at, {"dim_v", "gamma", "hyperplanes", "label"});
    ArrangementInput a;
    a.dim_v = detail::toml_size(detail::required(*at, "dim_v"));
    const TomlValue& gm = detail::required(*at, "gamma");
    if (!gm.is_array() || gm.array.empty())
      detail::input_fail(gm, "gamma must be a nonempty array of vectors");
    for (const auto& row : gm.array)
      a.gamma.push_back(detail::toml_vector(row, f, a.dim_v, "gamma row"));
    const TomlValue& hp = detail::required(*at, "hyperplanes");
    if (!hp.is_array() || hp.array.empty())
      detail::input_fail(hp, "hyperplanes must be a nonempty array");
    for (const auto& entry : hp.array) {
      if (!entry.is_table()) detail::input_fail(entry, "hyperplane entries are tables");
      detail::reject_unknown(entry, {"normal", "offset"});
      HyperplaneClass h;
      h.normal = detail::toml_vector(detail::required(entry, "normal"), f, a.dim_v, "normal");
      h.offset = entry.find("offset") ? detail::toml_element(*entry.find("offset"), f)
                                      : FieldElement::zero(f);
      a.planes.push_back(std::move(h));
    }
    if (const TomlValue* label = at->find("label")) {
      if (!label->is_string()) detail::input_fail(*label, "label must be a string");
      out.label = label->string;
    }
    out.arrangement = std::move(a);
  } else {
    const TomlValue* ct = root.find("codim1");
    detail::reject_unknown(*ct, {"projections", "intervals", "label"});
    Codim1Domain dom;
    dom.field = f;
    const TomlValue& pr = detail::required(*ct, "projections");
    if (!pr.is_array() || pr.array.empty())
      detail::input_fail(pr, "projections must be a nonempty array");
    for (const auto& p : pr.array) dom.projections.push_back(detail::toml_element(p, f));
    const TomlValue& iv = detail::required(*ct, "intervals");
    if (!iv.is_array() || iv.array.empty())
      detail::input_fail(iv, "intervals must be a nonempty array of [lo, hi] pairs");
    for (const auto& pair : iv.array) {
      if (!pair.is_array() || pair.array.size() != 2)
        detail::input_fail(pair, "each interval is a [lo, hi] pair");
      dom.intervals.emplace_back(detail::toml_element(pair.array[0], f),
                                 detail::toml_element(pair.array[1], f));
    }
    if (const TomlValue* label = ct->find("label")) {
      if (!label->is_string()) detail::input_fail(*label, "label must be a string");
      dom.label = label->string;
    }
    out.label = dom.label;
    out.codim1 = std::move(dom);
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOFailure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IOFailure("cannot read '" + path + "'");
  return ss.str();
}

inline InputFile load_input_file(const std::string& path) {
  return load_input(read_file(path), path);
}

}  // namespace projtop
