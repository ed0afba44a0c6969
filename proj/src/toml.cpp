#include "depsvm/toml.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace depsvm::toml {

ParseError::ParseError(const std::string& msg, int line_)
    : std::runtime_error("toml: line " + std::to_string(line_) + ": " + msg), line(line_) {}

bool Value::as_bool() const {
  if (!is_bool()) throw ParseError("expected a boolean", line);
  return std::get<bool>(data);
}
double Value::as_number() const {
  if (!is_number()) throw ParseError("expected a number", line);
  return std::get<double>(data);
}
const std::string& Value::as_string() const {
  if (!is_string()) throw ParseError("expected a string", line);
  return std::get<std::string>(data);
}
const Array& Value::as_array() const {
  if (!is_array()) throw ParseError("expected an array", line);
  return std::get<Array>(data);
}

const Value& Table::at(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ParseError("missing key '" + key + "'", line);
  return it->second;
}

const Table* Table::table(const std::string& name) const {
  auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }
  // whitespace, newlines and comments
  void skip_ws_all() {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (c == '#') {
        while (!done() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& cur) {
  std::string key;
  while (!cur.done() && is_bare_key_char(cur.peek())) key += cur.take();
  if (key.empty()) throw ParseError("expected a key", cur.line);
  return key;
}

Value parse_value_at(Cursor& cur);

Value parse_array(Cursor& cur) {
  const int line = cur.line;
  cur.take();  // '['
  Array items;
  cur.skip_ws_all();
  while (!cur.done() && cur.peek() != ']') {
    items.push_back(parse_value_at(cur));
    cur.skip_ws_all();
    if (!cur.done() && cur.peek() == ',') {
      cur.take();
      cur.skip_ws_all();
    }
  }
  if (cur.done()) throw ParseError("unterminated array", line);
  cur.take();  // ']'
  Value v;
  v.data = std::move(items);
  v.line = line;
  return v;
}

Value parse_string(Cursor& cur) {
  const int line = cur.line;
  const char quote = cur.take();
  std::string s;
  while (!cur.done() && cur.peek() != quote) {
    char c = cur.take();
    if (c == '\\' && quote == '"' && !cur.done()) {
      const char e = cur.take();
      switch (e) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        default: throw ParseError("unsupported escape", cur.line);
      }
    }
    if (c == '\n') throw ParseError("unterminated string", line);
    s += c;
  }
  if (cur.done()) throw ParseError("unterminated string", line);
  cur.take();
  Value v;
  v.data = std::move(s);
  v.line = line;
  return v;
}

Value parse_value_at(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) throw ParseError("expected a value", cur.line);
  const char c = cur.peek();
  if (c == '[') return parse_array(cur);
  if (c == '"' || c == '\'') return parse_string(cur);

  const int line = cur.line;
  std::string token;
  while (!cur.done()) {
    const char t = cur.peek();
    if (t == ',' || t == ']' || t == '\n' || t == '#' || t == ' ' || t == '\t' || t == '\r')
      break;
    token += cur.take();
  }
  if (token.empty()) throw ParseError("expected a value", line);
  Value v;
  v.line = line;
  if (token == "true") {
    v.data = true;
    return v;
  }
  if (token == "false") {
    v.data = false;
    return v;
  }
  try {
    std::size_t used = 0;
    const double num = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    v.data = num;
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse value '" + token + "'", line);
  }
}

}  // namespace

Table parse(const std::string& text) {
  Cursor cur{text};
  Table doc;
  Table* current = &doc;
  while (true) {
    cur.skip_ws_all();
    if (cur.done()) break;
    if (cur.peek() == '[') {
      const int line = cur.line;
      cur.take();
      std::string path;
      while (!cur.done() && cur.peek() != ']' && cur.peek() != '\n') path += cur.take();
      if (cur.done() || cur.peek() != ']')
        throw ParseError("unterminated table header", line);
      cur.take();
      current = &doc;
      std::stringstream ss(path);
      std::string part;
      while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ParseError("empty table name component", line);
        current = &current->tables[part];
        if (current->line == 0) current->line = line;
      }
      continue;
    }
    const int line = cur.line;
    const std::string key = parse_bare_key(cur);
    cur.skip_ws_inline();
    if (cur.done() || cur.take() != '=')
      throw ParseError("expected '=' after key '" + key + "'", line);
    Value v = parse_value_at(cur);
    if (current->values.count(key))
      throw ParseError("duplicate key '" + key + "'", line);
    current->values.emplace(key, std::move(v));
    cur.skip_ws_inline();
    if (!cur.done() && cur.peek() == '#')
      while (!cur.done() && cur.peek() != '\n') cur.take();
    if (!cur.done() && cur.peek() != '\n')
      throw ParseError("trailing characters after value for '" + key + "'", cur.line);
  }
  return doc;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Value parse_value(const std::string& text) {
  Cursor cur{text};
  Value v = parse_value_at(cur);
  cur.skip_ws_inline();
  if (!cur.done()) throw ParseError("trailing characters in value", cur.line);
  return v;
}

void set_path(Table& doc, const std::string& dotted, const Value& value) {
  std::stringstream ss(dotted);
  std::vector<std::string> parts;
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw std::runtime_error("override: empty key path");
  Table* current = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) current = &current->tables[parts[i]];
  current->values[parts.back()] = value;
}

namespace {

void serialize_value(std::string& out, const Value& v) {
  if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.as_number());
    out += buf;
  } else if (v.is_string()) {
    out += '"';
    out += v.as_string();
    out += '"';
  } else {
    out += '[';
    const Array& arr = v.as_array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (i) out += ", ";
      serialize_value(out, arr[i]);
    }
    out += ']';
  }
}

void serialize_table(std::string& out, const Table& t, const std::string& prefix) {
  for (const auto& [key, value] : t.values) {
    out += key;
    out += " = ";
    serialize_value(out, value);
    out += '\n';
  }
  for (const auto& [name, sub] : t.tables) {
    const std::string path = prefix.empty() ? name : prefix + "." + name;
    out += "\n[";
    out += path;
    out += "]\n";
    serialize_table(out, sub, path);
  }
}

}  // namespace

std::string serialize(const Table& doc) {
  std::string out;
  serialize_table(out, doc, "");
  return out;
}

}  // namespace depsvm::toml
