#include "minilang/ast.hpp"

namespace catchjit::minilang {

const FunctionDecl* Program::find(const std::string& name) const {
  for (const auto& fn : functions) {
    if (fn.name == name) return &fn;
  }
  return nullptr;
}

FunctionDecl* Program::find(const std::string& name) {
  for (auto& fn : functions) {
    if (fn.name == name) return &fn;
  }
  return nullptr;
}

namespace {

int count_expr(const Expr& e) {
  int n = 1;
  for (const auto& a : e.args) n += count_expr(a);
  return n;
}

int count_stmts(const std::vector<Stmt>& stmts) {
  int n = 0;
  for (const auto& s : stmts) {
    n += 1;
    for (const auto& e : s.exprs) n += count_expr(e);
    n += count_stmts(s.body);
    n += count_stmts(s.else_body);
  }
  return n;
}

bool same_label(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.int_value == b.int_value && a.bool_value == b.bool_value &&
         a.text == b.text && a.keys == b.keys && a.args.size() == b.args.size();
}

bool same_label(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.name == b.name && a.has_else == b.has_else &&
         a.exprs.size() == b.exprs.size() && a.body.size() == b.body.size() &&
         a.else_body.size() == b.else_body.size();
}

int diff_expr(const Expr& a, const Expr& b) {
  if (!same_label(a, b)) return 1;
  int n = 0;
  for (size_t i = 0; i < a.args.size(); ++i) n += diff_expr(a.args[i], b.args[i]);
  return n;
}

int diff_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

int diff_stmt(const Stmt& a, const Stmt& b) {
  if (!same_label(a, b)) return 1;
  int n = 0;
  for (size_t i = 0; i < a.exprs.size(); ++i) n += diff_expr(a.exprs[i], b.exprs[i]);
  n += diff_block(a.body, b.body);
  n += diff_block(a.else_body, b.else_body);
  return n;
}

int diff_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return 1;
  int n = 0;
  for (size_t i = 0; i < a.size(); ++i) n += diff_stmt(a[i], b[i]);
  return n;
}

NodeId number_expr(Expr& e, NodeId next) {
  e.id = next++;
  for (auto& a : e.args) next = number_expr(a, next);
  return next;
}

NodeId number_block(std::vector<Stmt>& stmts, NodeId next) {
  for (auto& s : stmts) {
    s.id = next++;
    for (auto& e : s.exprs) next = number_expr(e, next);
    next = number_block(s.body, next);
    next = number_block(s.else_body, next);
  }
  return next;
}

}  // namespace

int Program::node_count() const {
  int n = 0;
  for (const auto& fn : functions) n += 1 + count_stmts(fn.body);
  return n;
}

bool same_ast(const Program& a, const Program& b) { return a.functions == b.functions; }

bool structurally_equal(const Expr& a, const Expr& b) { return diff_expr(a, b) == 0; }
bool structurally_equal(const Stmt& a, const Stmt& b) { return diff_stmt(a, b) == 0; }

bool structurally_equal(const FunctionDecl& a, const FunctionDecl& b) {
  return node_diff_count(a, b) == 0;
}

int node_diff_count(const FunctionDecl& a, const FunctionDecl& b) {
  if (a.name != b.name || a.params != b.params) return 1;
  return diff_block(a.body, b.body);
}

int node_diff_count(const Program& a, const Program& b) {
  if (a.functions.size() != b.functions.size()) return 1;
  int n = 0;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    n += node_diff_count(a.functions[i], b.functions[i]);
  }
  return n;
}

void renumber(Program& program) {
  NodeId next = 1;
  for (auto& fn : program.functions) {
    fn.id = next++;
    next = number_block(fn.body, next);
  }
}

void renumber(std::vector<Stmt>& statements, NodeId first) {
  number_block(statements, first);
}

}  // namespace catchjit::minilang
