#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace depsvm::toml {

/// Minimal TOML reader covering what the config files use: [table] headers,
/// bare keys, strings, numbers, booleans, and (nested) inline arrays.
/// Parse errors carry the line number.

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, double, std::string, Array> data;
  int line = 0;  // where the value was written

  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  bool as_bool() const;
  double as_number() const;
  const std::string& as_string() const;
  const Array& as_array() const;
};

struct Table {
  std::map<std::string, Value> values;
  std::map<std::string, Table> tables;
  int line = 0;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  const Value& at(const std::string& key) const;
  const Table* table(const std::string& name) const;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int line_);
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

/// Parses a single value literal (used by --set overrides).
Value parse_value(const std::string& text);

/// Sets doc.<dotted.path> = value, creating intermediate tables.
void set_path(Table& doc, const std::string& dotted, const Value& value);

std::string serialize(const Table& doc);

}  // namespace depsvm::toml
