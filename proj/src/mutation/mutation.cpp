#include "mutation/mutation.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>

#include "minilang/parser.hpp"
#include "minilang/value.hpp"

namespace catchjit::mutation {

using minilang::ExprKind;
using minilang::FunctionDecl;
using minilang::Program;
using minilang::StmtKind;

std::string_view to_string(NodeScope scope) {
  switch (scope) {
    case NodeScope::Any: return "any";
    case NodeScope::LoopCondition: return "loop_condition";
    case NodeScope::IfCondition: return "if_condition";
    case NodeScope::Return: return "return";
  }
  return "any";
}

std::optional<NodeScope> parse_node_scope(std::string_view text) {
  for (auto s : {NodeScope::Any, NodeScope::LoopCondition, NodeScope::IfCondition, NodeScope::Return}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(RiskCategory category) {
  switch (category) {
    case RiskCategory::Boundary: return "boundary";
    case RiskCategory::Boolean: return "boolean";
    case RiskCategory::Container: return "container";
    case RiskCategory::Null: return "null";
    case RiskCategory::Exception: return "exception";
    case RiskCategory::Ordering: return "ordering";
    case RiskCategory::Other: return "other";
  }
  return "other";
}

std::optional<RiskCategory> parse_risk_category(std::string_view text) {
  for (auto c : {RiskCategory::Boundary, RiskCategory::Boolean, RiskCategory::Container, RiskCategory::Null,
                 RiskCategory::Exception, RiskCategory::Ordering, RiskCategory::Other}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

RiskUnmaterializable::RiskUnmaterializable(std::string risk_id, const std::string& reason)
    : std::runtime_error("risk " + risk_id + " is unmaterializable: " + reason), risk_id_(std::move(risk_id)) {}

namespace {

Expr binary_with(const Expr& e, const std::string& op) {
  Expr out = e;
  out.text = op;
  return out;
}

Expr text_lit(std::string text) {
  Expr e;
  e.kind = ExprKind::TextLit;
  e.text = std::move(text);
  return e;
}

Rewrite replace(Expr e, std::string description) {
  Rewrite r;
  r.replacement = std::move(e);
  r.description = std::move(description);
  return r;
}

bool is_relational(const std::string& op) {
  return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
}

std::vector<Rewrite> aor(const NodeRef& n) {
  std::vector<Rewrite> out;
  if (!n.expr || n.expr->kind != ExprKind::Binary) return out;
  static const std::vector<std::string> ops = {"+", "-", "*", "/", "%"};
  const auto& op = n.expr->text;
  if (std::find(ops.begin(), ops.end(), op) == ops.end()) return out;
  for (const auto& o : ops) {
    if (o != op) out.push_back(replace(binary_with(*n.expr, o), "replace '" + op + "' with '" + o + "'"));
  }
  return out;
}

std::vector<Rewrite> ror(const NodeRef& n) {
  std::vector<Rewrite> out;
  if (!n.expr || n.expr->kind != ExprKind::Binary) return out;
  static const std::map<std::string, std::vector<std::string>> table = {
      {"<", {"<=", ">=", ">", "!="}}, {"<=", {"<", ">", ">=", "=="}}, {">", {">=", "<=", "<", "!="}},
      {">=", {">", "<", "<=", "=="}}, {"==", {"!="}},                 {"!=", {"=="}},
  };
  auto it = table.find(n.expr->text);
  if (it == table.end()) return out;
  for (const auto& o : it->second) {
    out.push_back(replace(binary_with(*n.expr, o), "replace '" + n.expr->text + "' with '" + o + "'"));
  }
  return out;
}

std::vector<Rewrite> bool_neg(const NodeRef& n) {
  std::vector<Rewrite> out;
  if (!n.expr) return out;
  const Expr& e = *n.expr;
  if (e.kind == ExprKind::BoolLit) {
    Expr f = e;
    f.bool_value = !e.bool_value;
    out.push_back(replace(f, std::string("replace ") + (e.bool_value ? "true with false" : "false with true")));
    return out;
  }
  if (e.kind == ExprKind::Binary && (e.text == "&&" || e.text == "||")) {
    std::string o = e.text == "&&" ? "||" : "&&";
    out.push_back(replace(binary_with(e, o), "replace '" + e.text + "' with '" + o + "'"));
  }
  if (e.kind == ExprKind::Unary && e.text == "!") {
    out.push_back(replace(e.args[0], "remove negation"));
    return out;
  }
  bool boolean_valued = e.kind == ExprKind::Binary && (is_relational(e.text) || e.text == "&&" || e.text == "||");
  if (n.boolean_context || (n.scope == NodeScope::Return && boolean_valued)) {
    Expr neg;
    neg.kind = ExprKind::Unary;
    neg.text = "!";
    neg.args.push_back(e);
    out.push_back(replace(neg, "negate expression"));
  }
  return out;
}

std::vector<Rewrite> const_perturb(const NodeRef& n) {
  std::vector<Rewrite> out;
  if (!n.expr) return out;
  const Expr& e = *n.expr;
  if (e.kind == ExprKind::IntLit) {
    if (e.int_value < INT64_MAX) {
      Expr up = e;
      up.int_value = e.int_value + 1;
      out.push_back(replace(up, "replace " + std::to_string(e.int_value) + " with " + std::to_string(up.int_value)));
    }
    if (e.int_value > INT64_MIN) {
      Expr down = e;
      down.int_value = e.int_value - 1;
      out.push_back(
          replace(down, "replace " + std::to_string(e.int_value) + " with " + std::to_string(down.int_value)));
    }
  } else if (e.kind == ExprKind::BoolLit) {
    Expr f = e;
    f.bool_value = !e.bool_value;
    out.push_back(replace(f, std::string("replace ") + (e.bool_value ? "true with false" : "false with true")));
  } else if (e.kind == ExprKind::TextLit) {
    if (e.text.empty()) {
      out.push_back(replace(text_lit("x"), "replace \"\" with \"x\""));
    } else {
      out.push_back(replace(text_lit(""), "replace " + minilang::quote_text(e.text) + " with \"\""));
    }
  }
  return out;
}

std::vector<Rewrite> stmt_del(const NodeRef& n) {
  std::vector<Rewrite> out;
  if (!n.stmt) return out;
  Rewrite r;
  r.kind = Rewrite::Kind::DeleteStmt;
  r.description = "delete statement";
  out.push_back(r);
  return out;
}

std::vector<Rewrite> early_return(const NodeRef& n) {
  std::vector<Rewrite> out;
  Rewrite r;
  r.kind = Rewrite::Kind::InsertReturn;
  if (n.is_function_body) {
    r.description = "insert early return null";
    out.push_back(r);
  } else if (n.stmt && (n.stmt->kind == StmtKind::If || n.stmt->kind == StmtKind::While)) {
    r.description = "insert return null in block";
    out.push_back(r);
    if (n.stmt->kind == StmtKind::If && n.stmt->has_else) {
      r.else_block = true;
      r.description = "insert return null in else block";
      out.push_back(r);
    }
  }
  return out;
}

std::vector<Rewrite> key_rename(const NodeRef& n) {
  std::vector<Rewrite> out;
  if (!n.expr) return out;
  const Expr& e = *n.expr;
  if (e.kind == ExprKind::MapLit) {
    for (size_t i = 0; i < e.keys.size(); ++i) {
      std::string renamed = e.keys[i] + "_x";
      if (std::find(e.keys.begin(), e.keys.end(), renamed) != e.keys.end()) continue;
      Expr m = e;
      m.keys[i] = renamed;
      out.push_back(replace(m, "rename key " + minilang::quote_text(e.keys[i]) + " to " +
                                   minilang::quote_text(renamed)));
    }
  } else if (e.kind == ExprKind::TextLit && n.key_position) {
    out.push_back(replace(text_lit(e.text + "_x"), "rename key " + minilang::quote_text(e.text) + " to " +
                                                       minilang::quote_text(e.text + "_x")));
  }
  return out;
}

struct Site {
  std::string file;
  std::string function;
  NodeId node_id;
  NodeRef ref;
};

bool map_key_intrinsic(const std::string& name) {
  return name == "has" || name == "get" || name == "set" || name == "remove";
}

class SiteCollector {
 public:
  SiteCollector(std::string file, std::vector<Site>& out) : file_(std::move(file)), out_(out) {}

  void function(const FunctionDecl& fn) {
    fn_ = fn.name;
    if (!fn.body.empty()) {
      NodeRef body;
      body.is_function_body = true;
      out_.push_back({file_, fn_, fn.id, body});
    }
    block(fn.body, fn.body.size() == 1);
  }

 private:
  void block(const std::vector<Stmt>& stmts, bool sole_function_stmt) {
    for (const auto& s : stmts) stmt(s, sole_function_stmt);
  }

  void stmt(const Stmt& s, bool sole_function_stmt) {
    NodeRef ref;
    ref.stmt = &s;
    // Deleting a function's only statement would leave an empty body.
    if (!sole_function_stmt || s.kind == StmtKind::If || s.kind == StmtKind::While) {
      out_.push_back({file_, fn_, s.id, ref});
    }
    switch (s.kind) {
      case StmtKind::If: expr(s.exprs[0], NodeScope::IfCondition, true, false); break;
      case StmtKind::While: expr(s.exprs[0], NodeScope::LoopCondition, true, false); break;
      case StmtKind::Return:
        if (!s.exprs.empty()) expr(s.exprs[0], NodeScope::Return, false, false);
        break;
      default:
        for (const auto& e : s.exprs) expr(e, NodeScope::Any, false, false);
    }
    block(s.body, false);
    block(s.else_body, false);
  }

  void expr(const Expr& e, NodeScope scope, bool boolean_context, bool key_position) {
    NodeRef ref;
    ref.expr = &e;
    ref.scope = scope;
    ref.boolean_context = boolean_context;
    ref.key_position = key_position;
    out_.push_back({file_, fn_, e.id, ref});
    bool logical = (e.kind == ExprKind::Binary && (e.text == "&&" || e.text == "||")) ||
                   (e.kind == ExprKind::Unary && e.text == "!");
    for (size_t i = 0; i < e.args.size(); ++i) {
      bool key = (e.kind == ExprKind::Index && i == 1) ||
                 (e.kind == ExprKind::Call && i == 1 && map_key_intrinsic(e.text));
      expr(e.args[i], scope, logical, key);
    }
  }

  std::string file_;
  std::string fn_;
  std::vector<Site>& out_;
};

Stmt return_null() {
  Stmt s;
  s.kind = StmtKind::Return;
  Expr n;
  n.kind = ExprKind::NullLit;
  s.exprs.push_back(n);
  return s;
}

bool replace_expr(Expr& e, NodeId id, const Expr& replacement) {
  if (e.id == id) {
    e = replacement;
    return true;
  }
  for (auto& a : e.args) {
    if (replace_expr(a, id, replacement)) return true;
  }
  return false;
}

bool apply_in_block(std::vector<Stmt>& stmts, NodeId id, const Rewrite& r) {
  for (size_t i = 0; i < stmts.size(); ++i) {
    Stmt& s = stmts[i];
    if (s.id == id) {
      if (r.kind == Rewrite::Kind::DeleteStmt) {
        stmts.erase(stmts.begin() + static_cast<long>(i));
      } else if (r.kind == Rewrite::Kind::InsertReturn) {
        auto& target = r.else_block ? s.else_body : s.body;
        target.insert(target.begin(), return_null());
      }
      return true;
    }
    if (r.kind == Rewrite::Kind::ReplaceExpr) {
      for (auto& e : s.exprs) {
        if (replace_expr(e, id, r.replacement)) return true;
      }
    }
    if (apply_in_block(s.body, id, r) || apply_in_block(s.else_body, id, r)) return true;
  }
  return false;
}

bool apply(Program& p, const std::string& function, NodeId id, const Rewrite& r) {
  FunctionDecl* fn = p.find(function);
  if (!fn) return false;
  if (fn->id == id && r.kind == Rewrite::Kind::InsertReturn) {
    fn->body.insert(fn->body.begin(), return_null());
    return true;
  }
  return apply_in_block(fn->body, id, r);
}

struct Candidate {
  Mutant mutant;
  std::string printed;
};

using SiteFilter = std::function<bool(const Site&, const MutationOperator&)>;

std::vector<Mutant> collect(const ProgramSet& programs, const std::vector<MutationOperator>& operators,
                            const SiteFilter& filter) {
  std::vector<Site> sites;
  for (const auto& [file, program] : programs) {
    SiteCollector collector(file, sites);
    for (const auto& fn : program.functions) collector.function(fn);
  }
  std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
    return a.file != b.file ? a.file < b.file : a.node_id < b.node_id;
  });
  std::vector<const MutationOperator*> ops;
  for (const auto& op : operators) ops.push_back(&op);
  std::sort(ops.begin(), ops.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<Mutant> out;
  std::set<std::string> seen;
  for (const auto& site : sites) {
    const Program& base = programs.at(site.file);
    for (const auto* op : ops) {
      if (filter && !filter(site, *op)) continue;
      auto rewrites = op->rewrites(site.ref);
      for (size_t v = 0; v < rewrites.size(); ++v) {
        Program edited = base;
        if (!apply(edited, site.function, site.node_id, rewrites[v])) continue;
        std::string printed = minilang::print(edited);
        Program reparsed;
        try {
          reparsed = minilang::parse(printed);
        } catch (const minilang::SyntaxError&) {
          continue;
        }
        if (minilang::node_diff_count(base, reparsed) != 1) continue;
        ProgramSet mutated = programs;
        mutated[site.file] = std::move(reparsed);
        try {
          minilang::validate(mutated);
        } catch (const minilang::ValidationError&) {
          continue;
        }
        if (!seen.insert(site.file + "\n" + printed).second) continue;
        Mutant m;
        m.id = site.file + ":" + std::to_string(site.node_id) + ":" + op->id + ":" + std::to_string(v);
        m.base = programs;
        m.mutated = std::move(mutated);
        m.operator_id = op->id;
        m.node_id = site.node_id;
        m.file = site.file;
        m.function = site.function;
        m.variant = static_cast<int>(v);
        m.description = rewrites[v].description + " in " + site.function;
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

bool canonical_less(const Mutant& a, const Mutant& b) {
  if (a.file != b.file) return a.file < b.file;
  if (a.node_id != b.node_id) return a.node_id < b.node_id;
  if (a.operator_id != b.operator_id) return a.operator_id < b.operator_id;
  return a.variant < b.variant;
}

std::vector<Mutant> round_robin(std::vector<Mutant> all, int budget) {
  if (budget <= 0) throw std::invalid_argument("mutant budget must be positive");
  if (static_cast<int>(all.size()) <= budget) return all;
  std::map<std::string, std::vector<size_t>> by_op;
  for (size_t i = 0; i < all.size(); ++i) by_op[all[i].operator_id].push_back(i);
  std::vector<size_t> chosen;
  std::map<std::string, size_t> cursor;
  while (static_cast<int>(chosen.size()) < budget) {
    for (const auto& [op, idx] : by_op) {
      if (static_cast<int>(chosen.size()) >= budget) break;
      size_t& c = cursor[op];
      if (c < idx.size()) chosen.push_back(idx[c++]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Mutant> out;
  for (size_t i : chosen) out.push_back(std::move(all[i]));
  return out;
}

}  // namespace

const std::vector<MutationOperator>& default_operators() {
  static const std::vector<MutationOperator> ops = {
      {"aor", "arithmetic operator replacement", aor},
      {"bool_neg", "boolean negation", bool_neg},
      {"const", "constant perturbation", const_perturb},
      {"early_return", "early return insertion", early_return},
      {"key_rename", "map key rename", key_rename},
      {"ror", "relational operator replacement", ror},
      {"stmt_del", "statement deletion", stmt_del},
  };
  return ops;
}

std::vector<MutationOperator> select_operators(const std::vector<std::string>& ids) {
  std::vector<MutationOperator> out;
  for (const auto& op : default_operators()) {
    if (std::find(ids.begin(), ids.end(), op.id) != ids.end()) out.push_back(op);
  }
  return out;
}

std::vector<Mutant> all_mutants(const ProgramSet& programs, const std::vector<MutationOperator>& operators) {
  auto out = collect(programs, operators, nullptr);
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<Mutant> enumerate_mutants(const ProgramSet& programs, const std::vector<MutationOperator>& operators,
                                      int budget) {
  return round_robin(all_mutants(programs, operators), budget);
}

std::vector<std::string> operators_for(RiskCategory category) {
  switch (category) {
    case RiskCategory::Boundary: return {"const", "ror"};
    case RiskCategory::Boolean: return {"bool_neg"};
    case RiskCategory::Container: return {"key_rename", "stmt_del"};
    case RiskCategory::Ordering: return {"key_rename", "stmt_del"};
    case RiskCategory::Null: return {"early_return", "stmt_del"};
    case RiskCategory::Exception: return {"early_return", "stmt_del"};
    case RiskCategory::Other: return {"aor", "const", "early_return", "ror"};
  }
  return {};
}

std::vector<Mutant> materialize_risk(const Risk& risk, const ProgramSet& parent,
                                     const std::vector<MutationOperator>& operators, int cap) {
  if (risk.locations.empty()) throw RiskUnmaterializable(risk.id, "no locations");
  auto located = [&](const std::string& file, const std::string& function) {
    for (const auto& loc : risk.locations) {
      if (loc.function == function && (loc.file.empty() || loc.file == file)) return true;
    }
    return false;
  };
  bool any_present = false;
  for (const auto& [file, program] : parent) {
    for (const auto& fn : program.functions) any_present = any_present || located(file, fn.name);
  }
  if (!any_present) throw RiskUnmaterializable(risk.id, "no named function exists in the parent");

  auto wanted = operators_for(risk.category);
  std::vector<MutationOperator> ops;
  for (const auto& op : operators) {
    if (std::find(wanted.begin(), wanted.end(), op.id) != wanted.end()) ops.push_back(op);
  }
  auto filter = [&](const Site& site, const MutationOperator&) {
    if (!located(site.file, site.function)) return false;
    if (risk.scope == NodeScope::Any) return true;
    return site.ref.expr != nullptr && site.ref.scope == risk.scope;
  };
  auto found = collect(parent, ops, filter);
  if (found.empty()) throw RiskUnmaterializable(risk.id, "no operator applies at the named locations");
  std::sort(found.begin(), found.end(), canonical_less);
  auto out = round_robin(std::move(found), cap);
  for (auto& m : out) {
    m.risk_id = risk.id;
    m.id += "@" + risk.id;
  }
  return out;
}

}  // namespace catchjit::mutation
