#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minilang/ast.hpp"

namespace catchjit::mutation {

using minilang::Expr;
using minilang::NodeId;
using minilang::ProgramSet;
using minilang::Stmt;

// Where a node sits relative to its enclosing statement.
enum class NodeScope { Any, LoopCondition, IfCondition, Return };

std::string_view to_string(NodeScope scope);
std::optional<NodeScope> parse_node_scope(std::string_view text);

struct NodeRef {
  const Expr* expr = nullptr;  // exactly one of expr/stmt is set
  const Stmt* stmt = nullptr;
  bool is_function_body = false;  // stmt == nullptr, block owner is the function
  NodeScope scope = NodeScope::Any;
  // The expression is an operand of `&&`, `||`, `!` or a condition.
  bool boolean_context = false;
  // The expression is the key operand of an index or a map intrinsic.
  bool key_position = false;
};

struct Rewrite {
  enum class Kind { ReplaceExpr, DeleteStmt, InsertReturn } kind = Kind::ReplaceExpr;
  Expr replacement;     // ReplaceExpr
  bool else_block = false;  // InsertReturn into the else branch
  std::string description;
};

struct MutationOperator {
  std::string id;
  std::string description;
  // Empty result means the operator does not apply at the node.
  std::function<std::vector<Rewrite>(const NodeRef&)> rewrites;

  bool applicable(const NodeRef& node) const { return !rewrites(node).empty(); }
};

// aor, bool_neg, const, early_return, key_rename, ror, stmt_del; sorted by id.
const std::vector<MutationOperator>& default_operators();
std::vector<MutationOperator> select_operators(const std::vector<std::string>& ids);

struct Mutant {
  std::string id;  // <file>:<node_id>:<operator>:<variant>
  ProgramSet base;
  ProgramSet mutated;
  std::string operator_id;
  NodeId node_id = 0;
  std::string file;
  std::string function;
  int variant = 0;
  std::string description;
  std::optional<std::string> risk_id;
};

inline constexpr int kDefaultMutantBudget = 50;
inline constexpr int kDefaultMutantsPerRisk = 5;

// All valid single-edit mutants ordered by (file, node_id, operator id,
// variant). Each is printed and reparsed before it is accepted.
std::vector<Mutant> all_mutants(const ProgramSet& programs, const std::vector<MutationOperator>& operators);

// At most `budget` mutants. Overflow is resolved by taking mutants
// round-robin across operators; the result keeps the canonical order.
std::vector<Mutant> enumerate_mutants(const ProgramSet& programs, const std::vector<MutationOperator>& operators,
                                      int budget = kDefaultMutantBudget);

enum class RiskCategory { Boundary, Boolean, Container, Null, Exception, Ordering, Other };

std::string_view to_string(RiskCategory category);
std::optional<RiskCategory> parse_risk_category(std::string_view text);

struct RiskLocation {
  std::string file;
  std::string function;

  friend bool operator==(const RiskLocation&, const RiskLocation&) = default;
};

struct Risk {
  std::string id;
  std::string description;
  std::vector<RiskLocation> locations;
  RiskCategory category = RiskCategory::Other;
  NodeScope scope = NodeScope::Any;
};

class RiskUnmaterializable : public std::runtime_error {
 public:
  RiskUnmaterializable(std::string risk_id, const std::string& reason);
  const std::string& risk_id() const { return risk_id_; }

 private:
  std::string risk_id_;
};

// Operator ids a category maps to.
std::vector<std::string> operators_for(RiskCategory category);

// Mutants at the risk's locations and scope, using the category's operators
// intersected with `operators`, capped round-robin at `cap`.
// Throws RiskUnmaterializable.
std::vector<Mutant> materialize_risk(const Risk& risk, const ProgramSet& parent,
                                     const std::vector<MutationOperator>& operators,
                                     int cap = kDefaultMutantsPerRisk);

}  // namespace catchjit::mutation
