#include "minilang/parser.hpp"

#include <array>
#include <charconv>
#include <set>

#include "minilang/value.hpp"

namespace catchjit::minilang {

SyntaxError::SyntaxError(SourceLocation location, std::string expected, std::string found)
    : std::runtime_error("syntax error at " + std::to_string(location.line) + ":" +
                         std::to_string(location.column) + ": expected " + expected + ", found " +
                         found),
      location_(location),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

namespace {

constexpr std::array<std::string_view, 19> kIntrinsics = {
    "assert_eq", "assert_true", "catch_kind", "call_count", "len",  "push", "pop",
    "first",     "last",        "keys",       "has",        "get",  "set",  "remove",
    "str",       "min",         "max",        "abs",        "range"};

enum class Tok { Ident, Int, Text, Punct, Keyword, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_value = 0;
  SourceLocation loc;
};

const std::set<std::string, std::less<>> kKeywords = {"fn",     "let",  "if",    "else", "while",
                                                      "return", "throw", "true", "false", "null",
                                                      "test"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = kKeywords.count(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (c >= '0' && c <= '9') {
        size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
        if (ec != std::errc()) throw SyntaxError(t.loc, "integer literal in range", t.text);
        t.kind = Tok::Int;
      } else if (c == '"') {
        t.kind = Tok::Text;
        t.text = lex_text(t.loc);
      } else {
        t.kind = Tok::Punct;
        static constexpr std::array<std::string_view, 6> two = {"==", "!=", "<=",
                                                                ">=", "&&", "||"};
        std::string_view rest = src_.substr(pos_);
        bool matched = false;
        for (auto op : two) {
          if (rest.substr(0, 2) == op) {
            t.text = std::string(op);
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          static constexpr std::string_view singles = "(){}[],;:=<>+-*/%!";
          if (singles.find(c) == std::string_view::npos) {
            throw SyntaxError(t.loc, "token", std::string("'") + c + "'");
          }
          t.text = std::string(1, c);
          advance();
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string lex_text(SourceLocation loc) {
    advance();  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\n') throw SyntaxError(loc, "closing '\"'", "end of line");
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) break;
        char e = src_[pos_];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw SyntaxError({line_, col_}, "escape sequence", std::string(1, e));
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    if (pos_ >= src_.size()) throw SyntaxError(loc, "closing '\"'", "end of input");
    advance();
    return out;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Text: return quote_text(t.text);
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (!at_end()) p.functions.push_back(function());
    return p;
  }

  std::vector<Stmt> statements_until_end() {
    std::vector<Stmt> out;
    while (!at_end()) out.push_back(statement());
    return out;
  }

  std::vector<TestFileEntry> test_file() {
    std::vector<TestFileEntry> out;
    while (!at_end()) {
      expect_keyword("test");
      if (peek().kind != Tok::Text) throw SyntaxError(peek().loc, "test id text", describe(peek()));
      TestFileEntry entry;
      entry.id = next().text;
      auto body = block();
      if (body.empty()) throw SyntaxError(peek().loc, "at least one statement", "'}'");
      entry.source = print_statements(body);
      out.push_back(std::move(entry));
    }
    return out;
  }

  Expr lone_expression() {
    Expr e = expression();
    if (!at_end()) throw SyntaxError(peek().loc, "end of input", describe(peek()));
    return e;
  }

  bool at_end() const { return toks_[pos_].kind == Tok::End; }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_punct(std::string_view p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().kind == Tok::Keyword && peek().text == k;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) throw SyntaxError(peek().loc, "'" + std::string(p) + "'", describe(peek()));
    next();
  }
  void expect_keyword(std::string_view k) {
    if (!is_keyword(k)) throw SyntaxError(peek().loc, "'" + std::string(k) + "'", describe(peek()));
    next();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) throw SyntaxError(peek().loc, what, describe(peek()));
    return next().text;
  }

  FunctionDecl function() {
    expect_keyword("fn");
    FunctionDecl fn;
    fn.name = expect_ident("function name");
    expect_punct("(");
    if (!is_punct(")")) {
      fn.params.push_back(expect_ident("parameter name"));
      while (is_punct(",")) {
        next();
        fn.params.push_back(expect_ident("parameter name"));
      }
    }
    expect_punct(")");
    fn.body = block();
    return fn;
  }

  std::vector<Stmt> block() {
    expect_punct("{");
    std::vector<Stmt> out;
    while (!is_punct("}")) {
      if (at_end()) throw SyntaxError(peek().loc, "'}'", describe(peek()));
      out.push_back(statement());
    }
    next();
    return out;
  }

  Stmt statement() {
    Stmt s;
    if (is_keyword("let")) {
      next();
      s.kind = StmtKind::Let;
      s.name = expect_ident("variable name");
      expect_punct("=");
      s.exprs.push_back(expression());
      expect_punct(";");
      return s;
    }
    if (is_keyword("if")) return if_statement();
    if (is_keyword("while")) {
      next();
      s.kind = StmtKind::While;
      expect_punct("(");
      s.exprs.push_back(expression());
      expect_punct(")");
      s.body = block();
      return s;
    }
    if (is_keyword("return")) {
      next();
      s.kind = StmtKind::Return;
      if (!is_punct(";")) s.exprs.push_back(expression());
      expect_punct(";");
      return s;
    }
    if (is_keyword("throw")) {
      next();
      s.kind = StmtKind::Throw;
      s.exprs.push_back(expression());
      if (is_punct(",")) {
        next();
        s.exprs.push_back(expression());
      }
      expect_punct(";");
      return s;
    }
    SourceLocation loc = peek().loc;
    Expr e = expression();
    if (is_punct("=")) {
      if (!is_lvalue(e)) throw SyntaxError(loc, "assignable expression", "'='");
      next();
      s.kind = StmtKind::Assign;
      s.exprs.push_back(std::move(e));
      s.exprs.push_back(expression());
      expect_punct(";");
      return s;
    }
    s.kind = StmtKind::ExprStmt;
    s.exprs.push_back(std::move(e));
    expect_punct(";");
    return s;
  }

  static bool is_lvalue(const Expr& e) {
    if (e.kind == ExprKind::Var) return true;
    if (e.kind == ExprKind::Index) return is_lvalue(e.args[0]);
    return false;
  }

  Stmt if_statement() {
    expect_keyword("if");
    Stmt s;
    s.kind = StmtKind::If;
    expect_punct("(");
    s.exprs.push_back(expression());
    expect_punct(")");
    s.body = block();
    if (is_keyword("else")) {
      next();
      s.has_else = true;
      if (is_keyword("if")) {
        s.else_body.push_back(if_statement());
      } else {
        s.else_body = block();
      }
    }
    return s;
  }

  static int binary_precedence(const Token& t) {
    if (t.kind != Tok::Punct) return -1;
    const std::string& op = t.text;
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return -1;
  }

  Expr expression(int min_prec = 1) {
    Expr lhs = unary();
    for (;;) {
      int prec = binary_precedence(peek());
      if (prec < min_prec) return lhs;
      std::string op = next().text;
      Expr rhs = expression(prec + 1);
      Expr bin;
      bin.kind = ExprKind::Binary;
      bin.text = std::move(op);
      bin.args.push_back(std::move(lhs));
      bin.args.push_back(std::move(rhs));
      lhs = std::move(bin);
    }
  }

  Expr unary() {
    if (is_punct("!") || is_punct("-")) {
      Expr u;
      u.kind = ExprKind::Unary;
      u.text = next().text;
      u.args.push_back(unary());
      return u;
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (is_punct("[")) {
      next();
      Expr idx;
      idx.kind = ExprKind::Index;
      idx.args.push_back(std::move(e));
      idx.args.push_back(expression());
      expect_punct("]");
      e = std::move(idx);
    }
    return e;
  }

  Expr primary() {
    const Token& t = peek();
    Expr e;
    switch (t.kind) {
      case Tok::Int:
        e.kind = ExprKind::IntLit;
        e.int_value = next().int_value;
        return e;
      case Tok::Text:
        e.kind = ExprKind::TextLit;
        e.text = next().text;
        return e;
      case Tok::Keyword:
        if (t.text == "true" || t.text == "false") {
          e.kind = ExprKind::BoolLit;
          e.bool_value = next().text == "true";
          return e;
        }
        if (t.text == "null") {
          next();
          e.kind = ExprKind::NullLit;
          return e;
        }
        break;
      case Tok::Ident: {
        std::string name = next().text;
        if (is_punct("(")) {
          next();
          e.kind = ExprKind::Call;
          e.text = std::move(name);
          if (!is_punct(")")) {
            e.args.push_back(expression());
            while (is_punct(",")) {
              next();
              e.args.push_back(expression());
            }
          }
          expect_punct(")");
          return e;
        }
        e.kind = ExprKind::Var;
        e.text = std::move(name);
        return e;
      }
      case Tok::Punct:
        if (t.text == "(") {
          next();
          Expr inner = expression();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") {
          next();
          e.kind = ExprKind::ListLit;
          if (!is_punct("]")) {
            e.args.push_back(expression());
            while (is_punct(",")) {
              next();
              e.args.push_back(expression());
            }
          }
          expect_punct("]");
          return e;
        }
        if (t.text == "{") {
          next();
          e.kind = ExprKind::MapLit;
          if (!is_punct("}")) {
            map_entry(e);
            while (is_punct(",")) {
              next();
              map_entry(e);
            }
          }
          expect_punct("}");
          return e;
        }
        break;
      default:
        break;
    }
    throw SyntaxError(t.loc, "expression", describe(t));
  }

  void map_entry(Expr& e) {
    if (peek().kind != Tok::Text) throw SyntaxError(peek().loc, "text map key", describe(peek()));
    e.keys.push_back(next().text);
    expect_punct(":");
    e.args.push_back(expression());
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

int expr_precedence(const Expr& e) {
  if (e.kind == ExprKind::Binary) {
    const std::string& op = e.text;
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    return 6;
  }
  if (e.kind == ExprKind::Unary) return 7;
  return 8;
}

void print_expr_to(const Expr& e, std::string& out);

void print_operand(const Expr& e, int min_prec, std::string& out) {
  // Negative integer literals only arise from rewrites; print them grouped.
  bool negative_literal = e.kind == ExprKind::IntLit && e.int_value < 0;
  if (expr_precedence(e) < min_prec || (negative_literal && min_prec >= 7)) {
    out += '(';
    print_expr_to(e, out);
    out += ')';
  } else {
    print_expr_to(e, out);
  }
}

void print_list(const std::vector<Expr>& args, std::string& out) {
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_expr_to(args[i], out);
  }
}

void print_expr_to(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::IntLit: out += std::to_string(e.int_value); return;
    case ExprKind::BoolLit: out += e.bool_value ? "true" : "false"; return;
    case ExprKind::TextLit: out += quote_text(e.text); return;
    case ExprKind::NullLit: out += "null"; return;
    case ExprKind::Var: out += e.text; return;
    case ExprKind::Unary:
      out += e.text;
      print_operand(e.args[0], 7, out);
      return;
    case ExprKind::Binary: {
      int prec = expr_precedence(e);
      print_operand(e.args[0], prec, out);
      out += ' ';
      out += e.text;
      out += ' ';
      print_operand(e.args[1], prec + 1, out);
      return;
    }
    case ExprKind::Call:
      out += e.text;
      out += '(';
      print_list(e.args, out);
      out += ')';
      return;
    case ExprKind::Index:
      print_operand(e.args[0], 8, out);
      out += '[';
      print_expr_to(e.args[1], out);
      out += ']';
      return;
    case ExprKind::ListLit:
      out += '[';
      print_list(e.args, out);
      out += ']';
      return;
    case ExprKind::MapLit:
      out += '{';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += quote_text(e.keys[i]);
        out += ": ";
        print_expr_to(e.args[i], out);
      }
      out += '}';
      return;
  }
}

void print_block(const std::vector<Stmt>& stmts, int indent, std::string& out);

void print_stmt(const Stmt& s, int indent, std::string& out, bool continue_else_if = false) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  if (!continue_else_if) out += pad;
  switch (s.kind) {
    case StmtKind::Let:
      out += "let " + s.name + " = ";
      print_expr_to(s.exprs[0], out);
      out += ";\n";
      return;
    case StmtKind::Assign:
      print_expr_to(s.exprs[0], out);
      out += " = ";
      print_expr_to(s.exprs[1], out);
      out += ";\n";
      return;
    case StmtKind::If:
      out += "if (";
      print_expr_to(s.exprs[0], out);
      out += ") {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}";
      if (s.has_else) {
        if (s.else_body.size() == 1 && s.else_body[0].kind == StmtKind::If) {
          out += " else ";
          print_stmt(s.else_body[0], indent, out, true);
          return;
        }
        out += " else {\n";
        print_block(s.else_body, indent + 1, out);
        out += pad + "}";
      }
      out += "\n";
      return;
    case StmtKind::While:
      out += "while (";
      print_expr_to(s.exprs[0], out);
      out += ") {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}\n";
      return;
    case StmtKind::Return:
      out += "return";
      if (!s.exprs.empty()) {
        out += ' ';
        print_expr_to(s.exprs[0], out);
      }
      out += ";\n";
      return;
    case StmtKind::Throw:
      out += "throw ";
      print_expr_to(s.exprs[0], out);
      if (s.exprs.size() > 1) {
        out += ", ";
        print_expr_to(s.exprs[1], out);
      }
      out += ";\n";
      return;
    case StmtKind::ExprStmt:
      print_expr_to(s.exprs[0], out);
      out += ";\n";
      return;
  }
}

void print_block(const std::vector<Stmt>& stmts, int indent, std::string& out) {
  for (const auto& s : stmts) print_stmt(s, indent, out);
}

void check_stmt_names(const std::vector<Stmt>& stmts) {
  for (const auto& s : stmts) {
    if (s.kind == StmtKind::Let && is_intrinsic(s.name)) {
      throw ValidationError("variable '" + s.name + "' shadows an intrinsic");
    }
    check_stmt_names(s.body);
    check_stmt_names(s.else_body);
  }
}

}  // namespace

bool is_intrinsic(std::string_view name) {
  for (auto n : kIntrinsics) {
    if (n == name) return true;
  }
  return false;
}

Program parse(std::string_view source) {
  Parser parser(Lexer(source).run());
  Program program = parser.program();
  program.source_text = std::string(source);
  renumber(program);
  return program;
}

std::vector<Stmt> parse_statements(std::string_view source) {
  Parser parser(Lexer(source).run());
  auto stmts = parser.statements_until_end();
  renumber(stmts, 1);
  return stmts;
}

Expr parse_expression(std::string_view source) {
  Parser parser(Lexer(source).run());
  return parser.lone_expression();
}

std::vector<TestFileEntry> parse_test_file(std::string_view source) {
  Parser parser(Lexer(source).run());
  return parser.test_file();
}

void validate(const Program& program) {
  std::set<std::string> names;
  for (const auto& fn : program.functions) {
    if (is_intrinsic(fn.name)) throw ValidationError("function '" + fn.name + "' shadows an intrinsic");
    if (!names.insert(fn.name).second) throw ValidationError("duplicate function '" + fn.name + "'");
    std::set<std::string> params;
    for (const auto& p : fn.params) {
      if (!params.insert(p).second) {
        throw ValidationError("duplicate parameter '" + p + "' in '" + fn.name + "'");
      }
    }
    check_stmt_names(fn.body);
  }
}

void validate(const ProgramSet& programs) {
  std::set<std::string> names;
  for (const auto& [file, program] : programs) {
    validate(program);
    for (const auto& fn : program.functions) {
      if (!names.insert(fn.name).second) {
        throw ValidationError("function '" + fn.name + "' defined in more than one file (" + file + ")");
      }
    }
  }
}

std::string print(const FunctionDecl& fn) {
  std::string out = "fn " + fn.name + "(";
  for (size_t i = 0; i < fn.params.size(); ++i) {
    if (i) out += ", ";
    out += fn.params[i];
  }
  out += ") {\n";
  print_block(fn.body, 1, out);
  out += "}\n";
  return out;
}

std::string print(const Program& program) {
  std::string out;
  for (size_t i = 0; i < program.functions.size(); ++i) {
    if (i) out += "\n";
    out += print(program.functions[i]);
  }
  return out;
}

std::string print_statements(const std::vector<Stmt>& statements, int indent) {
  std::string out;
  print_block(statements, indent, out);
  return out;
}

std::string print_expr(const Expr& expr) {
  std::string out;
  print_expr_to(expr, out);
  return out;
}

}  // namespace catchjit::minilang
