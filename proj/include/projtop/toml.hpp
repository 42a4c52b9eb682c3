#pragma once

// A strict subset of TOML, just large enough for the input files this tool
// reads: tables, arrays of tables, inline tables, (nested) arrays, strings,
// integers and booleans.  Floats are rejected on purpose -- every numeric
// input is exact, rationals travel as "p/q" strings.  Errors carry the
// 1-based line and column of the offending character.

#include <projtop/integers.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace projtop {

struct TomlError : DomainError {
  TomlError(std::size_t line, std::size_t col, const std::string& what)
      : DomainError("ParseError",
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                        what),
        line(line),
        col(col) {}
  std::size_t line, col;
};

struct TomlValue {
  enum class Kind { Integer, String, Boolean, Array, Table };
  Kind kind = Kind::Table;
  Integer integer = 0;
  std::string string;
  bool boolean = false;
  std::vector<TomlValue> array;
  std::map<std::string, TomlValue> table;
  std::size_t line = 0, col = 0;  // where the value started, for diagnostics

  bool is_table() const { return kind == Kind::Table; }
  bool is_array() const { return kind == Kind::Array; }
  bool is_integer() const { return kind == Kind::Integer; }
  bool is_string() const { return kind == Kind::String; }

  const TomlValue* find(const std::string& key) const {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
  }
};

namespace detail {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : text_(text) {}

  TomlValue parse() {
    TomlValue root;
    root.kind = TomlValue::Kind::Table;
    TomlValue* current = &root;
    skip_blank();
    while (!eof()) {
      if (peek() == '[') {
        current = header(root);
      } else {
        key_value(*current);
      }
      skip_blank();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw TomlError(line_, col_, what); }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  // Horizontal whitespace and comments; newlines only when `lines` is set.
  void skip_space(bool lines) {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        take();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') take();
      } else if (c == '\n' && lines) {
        take();
      } else {
        break;
      }
    }
  }
  void skip_blank() { skip_space(true); }

  void expect_line_end() {
    skip_space(false);
    if (eof()) return;
    if (peek() != '\n') fail("expected end of line");
    take();
  }

  static bool bare_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  }

  std::string bare_key() {
    skip_space(false);
    std::string key;
    while (!eof() && bare_char(peek())) key += take();
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_key()};
    skip_space(false);
    while (!eof() && peek() == '.') {
      take();
      parts.push_back(bare_key());
      skip_space(false);
    }
    return parts;
  }

  // [a.b] selects (creating as needed); [[a.b]] appends a table to an array.
  TomlValue* header(TomlValue& root) {
    take();  // '['
    bool array_of_tables = !eof() && peek() == '[';
    if (array_of_tables) take();
    auto parts = dotted_key();
    if (eof() || take() != ']') fail("expected ']'");
    if (array_of_tables && (eof() || take() != ']')) fail("expected ']]'");
    expect_line_end();

    TomlValue* node = &root;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string& part = parts[i];
      bool last = i + 1 == parts.size();
      auto it = node->table.find(part);
      if (it == node->table.end()) {
        TomlValue fresh;
        fresh.kind = (last && array_of_tables) ? TomlValue::Kind::Array : TomlValue::Kind::Table;
        fresh.line = line_;
        it = node->table.emplace(part, std::move(fresh)).first;
        if (last && !array_of_tables) return &it->second;
      } else if (last && !array_of_tables) {
        fail("table '" + part + "' defined twice");
      }
      TomlValue& entry = it->second;
      if (last && array_of_tables) {
        if (!entry.is_array()) fail("'" + part + "' is not an array of tables");
        TomlValue elem;
        elem.kind = TomlValue::Kind::Table;
        elem.line = line_;
        entry.array.push_back(std::move(elem));
        return &entry.array.back();
      }
      if (entry.is_array()) {
        if (entry.array.empty()) fail("'" + part + "' has no elements");
        node = &entry.array.back();
      } else if (entry.is_table()) {
        node = &entry;
      } else {
        fail("'" + part + "' is not a table");
      }
    }
    return node;
  }

  void key_value(TomlValue& table) {
    std::string key = bare_key();
    skip_space(false);
    if (eof() || take() != '=') fail("expected '=' after key '" + key + "'");
    TomlValue value = parse_value();
    if (!table.table.emplace(key, std::move(value)).second)
      fail("key '" + key + "' defined twice");
    expect_line_end();
  }

  TomlValue parse_value() {
    skip_space(false);
    if (eof()) fail("expected a value");
    TomlValue v;
    v.line = line_;
    v.col = col_;
    char c = peek();
    if (c == '"') {
      v.kind = TomlValue::Kind::String;
      v.string = parse_string();
    } else if (c == '[') {
      v.kind = TomlValue::Kind::Array;
      take();
      skip_space(true);
      while (!eof() && peek() != ']') {
        v.array.push_back(parse_value());
        skip_space(true);
        if (!eof() && peek() == ',') {
          take();
          skip_space(true);
        } else {
          break;
        }
      }
      if (eof() || take() != ']') fail("expected ']'");
    } else if (c == '{') {
      v.kind = TomlValue::Kind::Table;
      take();
      skip_space(true);
      while (!eof() && peek() != '}') {
        std::string key = bare_key();
        skip_space(false);
        if (eof() || take() != '=') fail("expected '=' in inline table");
        if (!v.table.emplace(key, parse_value()).second)
          fail("key '" + key + "' defined twice");
        skip_space(true);
        if (!eof() && peek() == ',') {
          take();
          skip_space(true);
        } else {
          break;
        }
      }
      if (eof() || take() != '}') fail("expected '}'");
    } else if (c == 't' || c == 'f') {
      v.kind = TomlValue::Kind::Boolean;
      std::string word;
      while (!eof() && bare_char(peek())) word += take();
      if (word == "true")
        v.boolean = true;
      else if (word == "false")
        v.boolean = false;
      else
        fail("unknown literal '" + word + "'");
    } else if (c == '+' || c == '-' || (c >= '0' && c <= '9')) {
      v.kind = TomlValue::Kind::Integer;
      std::string digits;
      digits += take();
      while (!eof() && peek() >= '0' && peek() <= '9') digits += take();
      if (!eof() && (peek() == '.' || peek() == 'e' || peek() == 'E'))
        fail("floats are not supported; use \"p/q\" strings for exact rationals");
      if (digits == "+" || digits == "-") fail("expected digits");
      v.integer = Integer(digits);
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    return v;
  }

  std::string parse_string() {
    take();  // opening quote
    std::string out;
    while (true) {
      if (eof()) fail("unterminated string");
      char c = take();
      if (c == '"') break;
      if (c == '\n') fail("unterminated string");
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        char e = take();
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  const std::string& text_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

}  // namespace detail

inline TomlValue parse_toml(const std::string& text) { return detail::TomlParser(text).parse(); }

}  // namespace projtop
