#include "minilang/value.hpp"

#include <algorithm>
#include <cstdio>

namespace catchjit::minilang {

const Value* Map::find(std::string_view key) const {
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return &values[i];
  }
  return nullptr;
}

Value* Map::find(std::string_view key) {
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return &values[i];
  }
  return nullptr;
}

void Map::set(std::string key, Value value) {
  if (Value* existing = find(key)) {
    *existing = std::move(value);
    return;
  }
  keys.push_back(std::move(key));
  values.push_back(std::move(value));
}

bool Map::erase(std::string_view key) {
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) {
      keys.erase(keys.begin() + static_cast<std::ptrdiff_t>(i));
      values.erase(values.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
  }
  return false;
}

bool operator==(const Map& a, const Map& b) {
  return a.keys == b.keys && a.values == b.values;
}

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Null: return "null";
    case ValueKind::Int: return "int";
    case ValueKind::Bool: return "bool";
    case ValueKind::Text: return "text";
    case ValueKind::List: return "list";
    case ValueKind::Map: return "map";
  }
  return "?";
}

std::string quote_text(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string to_literal(const Value& value) {
  switch (value.kind()) {
    case ValueKind::Null: return "null";
    case ValueKind::Int: return std::to_string(value.as_int());
    case ValueKind::Bool: return value.as_bool() ? "true" : "false";
    case ValueKind::Text: return quote_text(value.as_text());
    case ValueKind::List: {
      std::string out = "[";
      const auto& items = value.as_list();
      for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += to_literal(items[i]);
      }
      return out + "]";
    }
    case ValueKind::Map: {
      const auto& m = value.as_map();
      if (m.size() == 0) return "{}";
      std::string out = "{";
      for (size_t i = 0; i < m.size(); ++i) {
        if (i) out += ", ";
        out += quote_text(m.keys[i]) + ": " + to_literal(m.values[i]);
      }
      return out + "}";
    }
  }
  return "null";
}

bool same_pairs_different_order(const Value& a, const Value& b) {
  if (!a.is_map() || !b.is_map()) return false;
  const auto& ma = a.as_map();
  const auto& mb = b.as_map();
  if (ma.size() != mb.size() || ma == mb) return false;
  for (size_t i = 0; i < ma.size(); ++i) {
    const Value* other = mb.find(ma.keys[i]);
    if (!other || !(*other == ma.values[i])) return false;
  }
  return true;
}

}  // namespace catchjit::minilang
