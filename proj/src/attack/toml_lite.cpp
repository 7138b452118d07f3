#include "bassim/attack/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace bassim::toml {

const Value* find(const Table& table, const std::string& key) {
  for (const auto& [k, v] : table)
    if (k == key) return &v;
  return nullptr;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expected<Table, ParseError> run() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        const int header_line = line_;
        const bool array = s_.compare(pos_, 2, "[[") == 0;
        pos_ += array ? 2 : 1;
        std::vector<std::string> path;
        if (!parse_key_path(path)) return fail_result();
        skip_ws();
        if (array ? s_.compare(pos_, 2, "]]") != 0 : peek() != ']') return error("unterminated table header");
        pos_ += array ? 2 : 1;
        if (!end_of_line()) return fail_result();
        current = open_table(root, path, array, header_line);
        if (!current) return fail_result();
        continue;
      }
      std::vector<std::string> key;
      if (!parse_key_path(key)) return fail_result();
      skip_ws();
      if (peek() != '=') return error("expected '=' after key");
      ++pos_;
      skip_ws();
      const int key_line = line_;
      Value v;
      if (!parse_value(v)) return fail_result();
      if (!end_of_line()) return fail_result();
      Table* target = current;
      for (std::size_t i = 0; i + 1 < key.size(); ++i) {
        target = descend(*target, key[i], key_line);
        if (!target) return fail_result();
      }
      if (find(*target, key.back())) return error_at(key_line, "duplicate key '" + key.back() + "'");
      target->emplace_back(key.back(), std::move(v));
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_ws_comments_newlines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      break;
    }
  }
  bool end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return true;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
      return true;
    }
    return fail("unexpected trailing characters");
  }

  bool fail(std::string message) {
    if (!err_) err_ = ParseError{line_, std::move(message)};
    return false;
  }
  Expected<Table, ParseError> fail_result() { return Unexpected{err_.value_or(ParseError{line_, "parse error"})}; }
  Expected<Table, ParseError> error(std::string message) {
    fail(std::move(message));
    return fail_result();
  }
  Expected<Table, ParseError> error_at(int line, std::string message) {
    err_ = ParseError{line, std::move(message)};
    return fail_result();
  }

  bool parse_key_path(std::vector<std::string>& path) {
    while (true) {
      skip_ws();
      std::string part;
      if (peek() == '"' || peek() == '\'') {
        Value v;
        if (!parse_string(v)) return false;
        part = v.str();
      } else {
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
          part += s_[pos_++];
        if (part.empty()) return fail("expected a key");
      }
      path.push_back(part);
      skip_ws();
      if (peek() != '.') return true;
      ++pos_;
    }
  }

  Table* descend(Table& table, const std::string& key, int line) {
    for (auto& [k, v] : table) {
      if (k != key) continue;
      if (v.is_table()) return &v.table();
      if (v.is_array() && !v.arr().empty() && v.arr().back().is_table())
        return &std::get<Table>(std::get<Array>(v.data).back().data);
      err_ = ParseError{line, "key '" + key + "' is not a table"};
      return nullptr;
    }
    table.emplace_back(key, Value{Table{}, false, line});
    return &table.back().second.table();
  }

  Table* open_table(Table& root, const std::vector<std::string>& path, bool array, int line) {
    Table* t = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      t = descend(*t, path[i], line);
      if (!t) return nullptr;
    }
    const std::string& last = path.back();
    for (auto& [k, v] : *t) {
      if (k != last) continue;
      if (array) {
        if (!v.is_array()) {
          err_ = ParseError{line, "'" + last + "' is not an array of tables"};
          return nullptr;
        }
        auto& a = std::get<Array>(v.data);
        a.push_back(Value{Table{}, false, line});
        return &std::get<Table>(a.back().data);
      }
      err_ = ParseError{line, "table '" + last + "' defined twice"};
      return nullptr;
    }
    if (array) {
      t->emplace_back(last, Value{Array{Value{Table{}, false, line}}, false, line});
      return &std::get<Table>(std::get<Array>(t->back().second.data).back().data);
    }
    t->emplace_back(last, Value{Table{}, false, line});
    return &t->back().second.table();
  }

  bool parse_string(Value& out) {
    const char q = s_[pos_++];
    std::string v;
    while (true) {
      if (eof() || peek() == '\n') return fail("unterminated string");
      char c = s_[pos_++];
      if (c == q) break;
      if (c == '\\' && q == '"') {
        if (eof()) return fail("unterminated escape");
        char e = s_[pos_++];
        switch (e) {
          case 'n': v += '\n'; break;
          case 't': v += '\t'; break;
          case '"': v += '"'; break;
          case '\\': v += '\\'; break;
          default: return fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      v += c;
    }
    out = Value{std::move(v), false, line_};
    return true;
  }

  bool parse_value(Value& out) {
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string(out);
    if (c == '[') return parse_array(out);
    if (c == '{') return parse_inline_table(out);
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      out = Value{true, false, line_};
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      out = Value{false, false, line_};
      return true;
    }
    return parse_number(out);
  }

  bool parse_number(Value& out) {
    std::string text;
    bool integer = true;
    while (!eof()) {
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
        text += c;
      } else if (c == '.' || c == 'e' || c == 'E') {
        integer = false;
        text += c;
      } else if (c != '_') {
        break;
      }
      ++pos_;
    }
    if (text.empty()) return fail("expected a value");
    const char* b = text.data() + (text[0] == '+' ? 1 : 0);
    double d = 0;
    auto [ptr, ec] = std::from_chars(b, text.data() + text.size(), d);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(d))
      return fail("invalid number '" + text + "'");
    out = Value{d, integer, line_};
    return true;
  }

  bool parse_array(Value& out) {
    const int start = line_;
    ++pos_;
    Array items;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) return fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        break;
      }
      Value v;
      if (!parse_value(v)) return false;
      items.push_back(std::move(v));
      skip_ws_comments_newlines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        break;
      }
      return fail("expected ',' or ']' in array");
    }
    out = Value{std::move(items), false, start};
    return true;
  }

  bool parse_inline_table(Value& out) {
    const int start = line_;
    ++pos_;
    Table t;
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      out = Value{std::move(t), false, start};
      return true;
    }
    while (true) {
      std::vector<std::string> key;
      if (!parse_key_path(key)) return false;
      if (key.size() != 1) return fail("dotted keys are not supported in inline tables");
      skip_ws();
      if (peek() != '=') return fail("expected '=' in inline table");
      ++pos_;
      skip_ws();
      Value v;
      if (!parse_value(v)) return false;
      if (find(t, key[0])) return fail("duplicate key '" + key[0] + "'");
      t.emplace_back(key[0], std::move(v));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        break;
      }
      return fail("expected ',' or '}' in inline table");
    }
    out = Value{std::move(t), false, start};
    return true;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::optional<ParseError> err_;
};

}  // namespace

Expected<Table, ParseError> parse(const std::string& text) { return Parser(text).run(); }

}  // namespace bassim::toml
