#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace catchjit::minilang {

struct Value;

using List = std::vector<Value>;

// Insertion-ordered string-keyed map. Equality is order sensitive.
struct Map {
  std::vector<std::string> keys;
  std::vector<Value> values;

  const Value* find(std::string_view key) const;
  Value* find(std::string_view key);
  void set(std::string key, Value value);
  bool erase(std::string_view key);
  size_t size() const { return keys.size(); }

  friend bool operator==(const Map& a, const Map& b);
};

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

enum class ValueKind { Null, Int, Bool, Text, List, Map };

struct Value {
  std::variant<Null, std::int64_t, bool, std::string, List, Map> data;

  Value() : data(Null{}) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(static_cast<std::int64_t>(v)) {}
  Value(bool v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(List v) : data(std::move(v)) {}
  Value(Map v) : data(std::move(v)) {}

  ValueKind kind() const { return static_cast<ValueKind>(data.index()); }
  bool is_null() const { return kind() == ValueKind::Null; }
  bool is_int() const { return kind() == ValueKind::Int; }
  bool is_bool() const { return kind() == ValueKind::Bool; }
  bool is_text() const { return kind() == ValueKind::Text; }
  bool is_list() const { return kind() == ValueKind::List; }
  bool is_map() const { return kind() == ValueKind::Map; }

  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  const std::string& as_text() const { return std::get<std::string>(data); }
  const List& as_list() const { return std::get<List>(data); }
  List& as_list() { return std::get<List>(data); }
  const Map& as_map() const { return std::get<Map>(data); }
  Map& as_map() { return std::get<Map>(data); }

  friend bool operator==(const Value& a, const Value& b) { return a.data == b.data; }
};

std::string_view kind_name(ValueKind kind);

// Source-literal rendering: the result re-parses to an expression that
// evaluates to an equal value.
std::string to_literal(const Value& value);

// Quoted, escaped text literal.
std::string quote_text(std::string_view text);

// Same key/value pairs, different order (recursively equal otherwise).
bool same_pairs_different_order(const Value& a, const Value& b);

}  // namespace catchjit::minilang
