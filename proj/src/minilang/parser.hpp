#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minilang/ast.hpp"

namespace catchjit::minilang {

struct SourceLocation {
  int line = 1;
  int column = 1;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(SourceLocation location, std::string expected, std::string found);

  SourceLocation location() const { return location_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourceLocation location_;
  std::string expected_;
  std::string found_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a whole program: zero or more `fn` declarations. Node ids are
// dense and assigned in pre-order. Throws SyntaxError.
Program parse(std::string_view source);

// Parses a bare statement list (the body of a test). Ids start at 1.
std::vector<Stmt> parse_statements(std::string_view source);

Expr parse_expression(std::string_view source);

// Static checks: unique function and parameter names, no shadowed
// intrinsics. Throws ValidationError.
void validate(const Program& program);
void validate(const ProgramSet& programs);

struct TestFileEntry {
  std::string id;
  std::string source;  // canonical statement text
};

// `.test.ml0` files hold `test "<id>" { <statements> }` blocks.
std::vector<TestFileEntry> parse_test_file(std::string_view source);

std::string print(const Program& program);
std::string print(const FunctionDecl& fn);
std::string print_statements(const std::vector<Stmt>& statements, int indent = 0);
std::string print_expr(const Expr& expr);

bool is_intrinsic(std::string_view name);

}  // namespace catchjit::minilang
