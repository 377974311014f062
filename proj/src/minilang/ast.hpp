#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace catchjit::minilang {

using NodeId = int;

enum class ExprKind {
  IntLit,
  BoolLit,
  TextLit,
  NullLit,
  Var,
  Unary,   // op: "!" or "-"
  Binary,  // op: arithmetic, relational, logical
  Call,    // name(args...)
  Index,   // args[0][args[1]]
  ListLit,
  MapLit,  // keys[i]: args[i]
};

struct Expr {
  NodeId id = 0;
  ExprKind kind = ExprKind::NullLit;
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::string text;  // literal text, variable/callee name, operator
  std::vector<std::string> keys;
  std::vector<Expr> args;

  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class StmtKind { Let, Assign, If, While, Return, Throw, ExprStmt };

struct Stmt {
  NodeId id = 0;
  StmtKind kind = StmtKind::ExprStmt;
  std::string name;          // Let target
  std::vector<Expr> exprs;   // Let:[value] Assign:[target,value] If/While:[cond]
                             // Return:[]|[value] Throw:[kind]|[kind,message] ExprStmt:[e]
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;
  bool has_else = false;

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct FunctionDecl {
  NodeId id = 0;
  std::string name;
  std::vector<std::string> params;
  std::vector<Stmt> body;

  friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

// Functions keep their source order; lookup is by name.
struct Program {
  std::vector<FunctionDecl> functions;
  std::string source_text;

  const FunctionDecl* find(const std::string& name) const;
  FunctionDecl* find(const std::string& name);
  int node_count() const;
};

// AST equality (ids included). source_text is not compared.
bool same_ast(const Program& a, const Program& b);

// Structural equality ignoring node ids.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const FunctionDecl& a, const FunctionDecl& b);

// Number of maximal positions at which two trees differ, ignoring ids.
// A node counts once when its own label or child arity differs; children
// of such a node are not visited.
int node_diff_count(const Program& a, const Program& b);
int node_diff_count(const FunctionDecl& a, const FunctionDecl& b);

// Dense pre-order renumbering starting at 1.
void renumber(Program& program);
void renumber(std::vector<Stmt>& statements, NodeId first = 1);

// Program set: file name -> program.
using ProgramSet = std::map<std::string, Program>;

}  // namespace catchjit::minilang
