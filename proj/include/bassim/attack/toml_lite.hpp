#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bassim/util/expected.hpp"

namespace bassim::toml {

struct Value;
using Array = std::vector<Value>;
// Insertion-ordered; keys are unique within a table.
using Table = std::vector<std::pair<std::string, Value>>;

struct Value {
  std::variant<std::string, double, bool, Array, Table> data;
  bool integer = false;  // number written without fraction/exponent
  int line = 0;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_table() const { return std::holds_alternative<Table>(data); }
  const std::string& str() const { return std::get<std::string>(data); }
  double num() const { return std::get<double>(data); }
  bool boolean() const { return std::get<bool>(data); }
  const Array& arr() const { return std::get<Array>(data); }
  const Table& table() const { return std::get<Table>(data); }
  Table& table() { return std::get<Table>(data); }
};

const Value* find(const Table& table, const std::string& key);

struct ParseError {
  int line = 0;
  std::string message;
};

// Subset of TOML: [tables], [[arrays of tables]], dotted table headers,
// bare/quoted keys, basic and literal strings, integers, floats, booleans,
// arrays (multi-line allowed) and inline tables.
Expected<Table, ParseError> parse(const std::string& text);

// Quoted TOML basic string.
std::string quote(const std::string& s);

}  // namespace bassim::toml
