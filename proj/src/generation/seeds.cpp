#include <algorithm>
#include <map>
#include <set>

#include "generation/generation.hpp"
#include "minilang/parser.hpp"

namespace catchjit::generation {

using minilang::Expr;
using minilang::ExprKind;
using minilang::FunctionDecl;
using minilang::List;
using minilang::Map;
using minilang::Stmt;
using minilang::StmtKind;

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::Int: return "int";
    case ParamType::Bool: return "bool";
    case ParamType::Text: return "text";
    case ParamType::List: return "list";
    case ParamType::Map: return "map";
  }
  return "int";
}

namespace {

const FunctionDecl* find_function(const ProgramSet& programs, const std::string& name) {
  for (const auto& [file, program] : programs) {
    if (const auto* fn = program.find(name)) return fn;
  }
  return nullptr;
}

std::optional<ParamType> literal_type(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: return ParamType::Int;
    case ExprKind::BoolLit: return ParamType::Bool;
    case ExprKind::TextLit: return ParamType::Text;
    case ExprKind::ListLit: return ParamType::List;
    case ExprKind::MapLit: return ParamType::Map;
    default: return std::nullopt;
  }
}

class TypeVotes {
 public:
  TypeVotes(const ProgramSet& programs, const FunctionDecl& fn, int depth)
      : programs_(programs), fn_(fn), depth_(depth) {
    votes_.assign(fn.params.size(), {});
  }

  std::vector<ParamType> run() {
    block(fn_.body);
    std::vector<ParamType> out;
    for (const auto& v : votes_) {
      ParamType best = ParamType::Int;
      double best_score = 0.0;
      for (const auto& [type, score] : v) {
        if (score > best_score) {
          best = type;
          best_score = score;
        }
      }
      out.push_back(best);
    }
    return out;
  }

 private:
  int param_index(const Expr& e) const {
    if (e.kind != ExprKind::Var) return -1;
    for (size_t i = 0; i < fn_.params.size(); ++i) {
      if (fn_.params[i] == e.text) return static_cast<int>(i);
    }
    return -1;
  }

  void vote(const Expr& e, ParamType type, double weight = 1.0) {
    int i = param_index(e);
    if (i >= 0) votes_[static_cast<size_t>(i)][type] += weight;
  }

  void block(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      if (s.kind == StmtKind::If || s.kind == StmtKind::While) vote(s.exprs[0], ParamType::Bool);
      if (s.kind == StmtKind::Assign && s.exprs[0].kind == ExprKind::Index) index_target(s.exprs[0]);
      for (const auto& e : s.exprs) expr(e);
      block(s.body);
      block(s.else_body);
    }
  }

  void index_target(const Expr& e) {
    const Expr& key = e.args[1];
    vote(e.args[0], key.kind == ExprKind::TextLit ? ParamType::Map : ParamType::List);
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Unary:
        vote(e.args[0], e.text == "!" ? ParamType::Bool : ParamType::Int);
        break;
      case ExprKind::Binary: binary(e); break;
      case ExprKind::Index: {
        const Expr& key = e.args[1];
        if (key.kind == ExprKind::TextLit) {
          vote(e.args[0], ParamType::Map);
        } else {
          vote(e.args[0], ParamType::List);
          vote(key, ParamType::Int);
        }
        break;
      }
      case ExprKind::Call: call(e); break;
      default: break;
    }
    for (const auto& a : e.args) expr(a);
  }

  void binary(const Expr& e) {
    const std::string& op = e.text;
    const Expr& l = e.args[0];
    const Expr& r = e.args[1];
    if (op == "&&" || op == "||") {
      vote(l, ParamType::Bool);
      vote(r, ParamType::Bool);
      return;
    }
    auto lt = literal_type(l), rt = literal_type(r);
    if (op == "==" || op == "!=") {
      if (rt) vote(l, *rt);
      if (lt) vote(r, *lt);
      return;
    }
    ParamType fallback = ParamType::Int;
    if ((lt && *lt == ParamType::Text) || (rt && *rt == ParamType::Text)) fallback = ParamType::Text;
    if (op == "+" && ((lt && *lt == ParamType::List) || (rt && *rt == ParamType::List))) fallback = ParamType::List;
    vote(l, fallback, 0.75);
    vote(r, fallback, 0.75);
  }

  void call(const Expr& e) {
    const std::string& n = e.text;
    if (e.args.empty()) return;
    const Expr& a0 = e.args[0];
    if (n == "keys" || n == "has" || n == "get" || n == "set" || n == "remove") {
      vote(a0, ParamType::Map);
      if (e.args.size() > 1) vote(e.args[1], ParamType::Text);
    } else if (n == "push" || n == "pop" || n == "first" || n == "last") {
      vote(a0, ParamType::List);
    } else if (n == "len") {
      vote(a0, ParamType::List, 0.5);
    } else if (n == "range" || n == "abs" || n == "min" || n == "max") {
      for (const auto& a : e.args) vote(a, ParamType::Int);
    } else if (!minilang::is_intrinsic(n) && depth_ < 3) {
      const FunctionDecl* callee = find_function(programs_, n);
      if (!callee || callee == &fn_) return;
      auto types = TypeVotes(programs_, *callee, depth_ + 1).run();
      for (size_t i = 0; i < e.args.size() && i < types.size(); ++i) vote(e.args[i], types[i], 0.5);
    }
  }

  const ProgramSet& programs_;
  const FunctionDecl& fn_;
  int depth_;
  std::vector<std::map<ParamType, double>> votes_;
};

void harvest_expr(const Expr& e, Harvest& h, bool key_position) {
  if (e.kind == ExprKind::IntLit) h.ints.push_back(e.int_value);
  if (e.kind == ExprKind::TextLit) (key_position ? h.keys : h.texts).push_back(e.text);
  if (e.kind == ExprKind::MapLit) {
    for (const auto& k : e.keys) h.keys.push_back(k);
  }
  bool map_call = e.kind == ExprKind::Call &&
                  (e.text == "has" || e.text == "get" || e.text == "set" || e.text == "remove");
  for (size_t i = 0; i < e.args.size(); ++i) {
    bool key = (e.kind == ExprKind::Index && i == 1) || (map_call && i == 1);
    harvest_expr(e.args[i], h, key);
  }
}

void harvest_block(const std::vector<Stmt>& stmts, Harvest& h) {
  for (const auto& s : stmts) {
    // throw kinds are not inputs
    size_t first = s.kind == StmtKind::Throw ? s.exprs.size() : 0;
    for (size_t i = first; i < s.exprs.size(); ++i) harvest_expr(s.exprs[i], h, false);
    harvest_block(s.body, h);
    harvest_block(s.else_body, h);
  }
}

template <typename T>
void dedupe(std::vector<T>& v) {
  std::vector<T> out;
  for (auto& x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  v = std::move(out);
}

void append_unique(std::vector<Value>& values, const Value& v) {
  if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
}

}  // namespace

std::vector<ParamType> infer_param_types(const ProgramSet& programs, const std::string& function) {
  const FunctionDecl* fn = find_function(programs, function);
  if (!fn) return {};
  return TypeVotes(programs, *fn, 0).run();
}

Harvest harvest_constants(const ProgramSet& programs, const std::string& only_function) {
  Harvest h;
  for (const auto& [file, program] : programs) {
    for (const auto& fn : program.functions) {
      if (!only_function.empty() && fn.name != only_function) continue;
      harvest_block(fn.body, h);
    }
  }
  std::sort(h.ints.begin(), h.ints.end());
  dedupe(h.ints);
  dedupe(h.texts);
  dedupe(h.keys);
  return h;
}

std::vector<Value> seed_values(ParamType type, const Harvest& harvest) {
  std::vector<Value> out;
  switch (type) {
    case ParamType::Int:
      for (std::int64_t v : {-1, 0, 1, 2}) out.emplace_back(v);
      for (auto c : harvest.ints) {
        if (out.size() >= 8) break;
        append_unique(out, Value(c));
      }
      break;
    case ParamType::Bool:
      out.emplace_back(true);
      out.emplace_back(false);
      break;
    case ParamType::Text:
      out.emplace_back("");
      out.emplace_back("x");
      for (const auto& t : harvest.texts) {
        if (out.size() >= 6) break;
        append_unique(out, Value(t));
      }
      for (const auto& t : harvest.keys) {
        if (out.size() >= 6) break;
        append_unique(out, Value(t));
      }
      break;
    case ParamType::List:
      out.emplace_back(List{});
      out.emplace_back(List{Value(1)});
      break;
    case ParamType::Map: {
      out.emplace_back(Map{});
      if (!harvest.keys.empty()) {
        Map m;
        for (const auto& k : harvest.keys) m.set(k, Value(1));
        out.emplace_back(std::move(m));
      }
      break;
    }
  }
  return out;
}

std::vector<ArgTuple> seed_tuples(const std::vector<std::vector<Value>>& per_param, size_t cap) {
  std::vector<ArgTuple> out;
  if (per_param.empty()) {
    out.emplace_back();
    return out;
  }
  size_t max_size = 0;
  for (const auto& p : per_param) {
    if (p.empty()) return out;
    max_size = std::max(max_size, p.size());
  }
  const size_t n = per_param.size();
  for (size_t level = 0; level < max_size && out.size() < cap; ++level) {
    std::vector<size_t> digits(n, 0);
    for (;;) {
      size_t top = *std::max_element(digits.begin(), digits.end());
      if (top == level) {
        ArgTuple t;
        for (size_t i = 0; i < n; ++i) t.push_back(per_param[i][digits[i]]);
        out.push_back(std::move(t));
        if (out.size() >= cap) break;
      }
      size_t i = n;
      while (i-- > 0) {
        size_t limit = std::min(level, per_param[i].size() - 1);
        if (digits[i] < limit) {
          ++digits[i];
          for (size_t j = i + 1; j < n; ++j) digits[j] = 0;
          break;
        }
        if (i == 0) {
          i = n;  // exhausted
          break;
        }
      }
      if (i == n) break;
    }
  }
  return out;
}

std::vector<ArgTuple> default_seeds(const ProgramSet& programs, const std::string& entry, size_t cap) {
  Harvest h = harvest_constants(programs);
  std::vector<std::vector<Value>> per_param;
  for (auto t : infer_param_types(programs, entry)) per_param.push_back(seed_values(t, h));
  return seed_tuples(per_param, cap);
}

std::vector<ArgTuple> mutant_seeds(const ProgramSet& programs, const std::string& entry,
                                   const mutation::Mutant& mutant, size_t cap) {
  Harvest all = harvest_constants(programs);
  Harvest local = harvest_constants(programs, mutant.function);
  std::vector<std::vector<Value>> per_param;
  for (auto t : infer_param_types(programs, entry)) {
    std::vector<Value> values;
    switch (t) {
      case ParamType::Int:
        for (auto c : local.ints) {
          for (std::int64_t d : {-1, 0, 1}) append_unique(values, Value(c + d));
        }
        break;
      case ParamType::Text:
        for (const auto& s : local.texts) append_unique(values, Value(s));
        for (const auto& s : local.keys) append_unique(values, Value(s));
        break;
      case ParamType::List:
        values.emplace_back(List{Value(1), Value(2), Value(3)});
        values.emplace_back(List{Value(3), Value(1), Value(2)});
        break;
      case ParamType::Map:
        for (const auto& k : local.keys) {
          Map m;
          m.set(k, Value(1));
          append_unique(values, Value(std::move(m)));
        }
        break;
      case ParamType::Bool: break;
    }
    for (auto& v : seed_values(t, all)) append_unique(values, v);
    per_param.push_back(std::move(values));
  }
  return seed_tuples(per_param, cap);
}

}  // namespace catchjit::generation
