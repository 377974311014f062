#include "minilang/interpreter.hpp"

#include <map>
#include <unordered_map>

#include "minilang/parser.hpp"

namespace catchjit::minilang {

namespace {

struct Thrown {
  std::string kind;
  std::string message;
  NodeId node_id;
  std::string function;
};

struct AssertionFailed {};
struct StepLimitHit {};

struct ReturnSignal {
  Value value;
};

using Frame = std::map<std::string, Value, std::less<>>;

class Interpreter {
 public:
  Interpreter(const ProgramSet& programs, std::int64_t step_limit) : step_limit_(step_limit) {
    for (const auto& [file, program] : programs) {
      for (const auto& fn : program.functions) functions_.emplace(fn.name, &fn);
    }
  }

  ExecutionTrace& trace() { return trace_; }
  std::int64_t steps() const { return steps_; }

  void run_statements(const std::vector<Stmt>& stmts) {
    frames_.emplace_back();
    function_names_.push_back("<test>");
    exec_block(stmts);
  }

  Value call_entry(const std::string& name, const ArgTuple& args) {
    frames_.emplace_back();
    function_names_.push_back("<test>");
    return call_user(name, args, 0);
  }

  bool has_function(const std::string& name) const { return functions_.count(name) > 0; }

  void record_uncaught(const Thrown& t) {
    TraceEvent e;
    e.kind = TraceEventKind::Exception;
    e.depth = depth();
    e.exception_kind = t.kind;
    e.message = t.message;
    e.node_id = t.node_id;
    e.function = t.function;
    trace_.events.push_back(std::move(e));
  }

  void record_step_limit() {
    TraceEvent e;
    e.kind = TraceEventKind::StepLimitExceeded;
    e.depth = depth();
    trace_.events.push_back(std::move(e));
  }

 private:
  int depth() const { return static_cast<int>(call_stack_depth_); }

  void step() {
    if (steps_ >= step_limit_) throw StepLimitHit{};
    ++steps_;
  }

  [[noreturn]] void raise(const std::string& kind, const std::string& message, NodeId node) {
    throw Thrown{kind, message, node, function_names_.back()};
  }

  [[noreturn]] void type_error(const std::string& what, const Value& v, NodeId node) {
    if (v.is_null()) raise("null_access", what + " on null", node);
    raise("type_mismatch", what + " on " + std::string(kind_name(v.kind())), node);
  }

  Frame& frame() { return frames_.back(); }

  void exec_block(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) exec(s);
  }

  bool condition(const Expr& e) {
    Value v = eval(e);
    if (!v.is_bool()) type_error("condition", v, e.id);
    return v.as_bool();
  }

  void exec(const Stmt& s) {
    step();
    switch (s.kind) {
      case StmtKind::Let:
        frame()[s.name] = eval(s.exprs[0]);
        return;
      case StmtKind::Assign: {
        Value v = eval(s.exprs[1]);
        assign(s.exprs[0], std::move(v));
        return;
      }
      case StmtKind::If:
        if (condition(s.exprs[0])) {
          exec_block(s.body);
        } else {
          exec_block(s.else_body);
        }
        return;
      case StmtKind::While:
        while (condition(s.exprs[0])) {
          exec_block(s.body);
          step();
        }
        return;
      case StmtKind::Return:
        throw ReturnSignal{s.exprs.empty() ? Value() : eval(s.exprs[0])};
      case StmtKind::Throw: {
        Value kind = eval(s.exprs[0]);
        if (!kind.is_text()) type_error("throw", kind, s.id);
        std::string message = kind.as_text();
        if (s.exprs.size() > 1) {
          Value m = eval(s.exprs[1]);
          message = m.is_text() ? m.as_text() : to_literal(m);
        }
        raise(kind.as_text(), message, s.id);
      }
      case StmtKind::ExprStmt:
        eval(s.exprs[0]);
        return;
    }
  }

  Value* lookup(const std::string& name) {
    auto it = frame().find(name);
    return it == frame().end() ? nullptr : &it->second;
  }

  // Returns a pointer to the storage an lvalue designates.
  Value* place(const Expr& target) {
    if (target.kind == ExprKind::Var) {
      Value* slot = lookup(target.text);
      if (!slot) raise("undefined_variable", "variable '" + target.text + "' is not defined", target.id);
      return slot;
    }
    Value* base = place(target.args[0]);
    Value key = eval(target.args[1]);
    if (base->is_list()) {
      if (!key.is_int()) type_error("list index", key, target.id);
      auto& list = base->as_list();
      std::int64_t i = key.as_int();
      if (i < 0 || i >= static_cast<std::int64_t>(list.size())) {
        raise("key_out_of_bounds",
              "index " + std::to_string(i) + " out of range (len " + std::to_string(list.size()) + ")",
              target.id);
      }
      return &list[static_cast<size_t>(i)];
    }
    if (base->is_map()) {
      if (!key.is_text()) type_error("map key", key, target.id);
      auto& map = base->as_map();
      if (!map.find(key.as_text())) map.set(key.as_text(), Value());
      return map.find(key.as_text());
    }
    type_error("index assignment", *base, target.id);
  }

  void assign(const Expr& target, Value v) { *place(target) = std::move(v); }

  Value eval(const Expr& e) {
    step();
    switch (e.kind) {
      case ExprKind::IntLit: return Value(e.int_value);
      case ExprKind::BoolLit: return Value(e.bool_value);
      case ExprKind::TextLit: return Value(e.text);
      case ExprKind::NullLit: return Value();
      case ExprKind::Var: {
        Value* v = lookup(e.text);
        if (!v) raise("undefined_variable", "variable '" + e.text + "' is not defined", e.id);
        return *v;
      }
      case ExprKind::Unary: {
        Value v = eval(e.args[0]);
        if (e.text == "!") {
          if (!v.is_bool()) type_error("'!'", v, e.id);
          return Value(!v.as_bool());
        }
        if (!v.is_int()) type_error("unary '-'", v, e.id);
        std::int64_t out;
        if (__builtin_sub_overflow(std::int64_t{0}, v.as_int(), &out)) raise("overflow", "integer overflow", e.id);
        return Value(out);
      }
      case ExprKind::Binary: return binary(e);
      case ExprKind::Call: return call(e);
      case ExprKind::Index: return index(e);
      case ExprKind::ListLit: {
        List items;
        items.reserve(e.args.size());
        for (const auto& a : e.args) items.push_back(eval(a));
        return Value(std::move(items));
      }
      case ExprKind::MapLit: {
        Map m;
        for (size_t i = 0; i < e.args.size(); ++i) m.set(e.keys[i], eval(e.args[i]));
        return Value(std::move(m));
      }
    }
    return Value();
  }

  Value binary(const Expr& e) {
    const std::string& op = e.text;
    if (op == "&&" || op == "||") {
      Value l = eval(e.args[0]);
      if (!l.is_bool()) type_error("'" + op + "'", l, e.id);
      if (op == "&&" && !l.as_bool()) return Value(false);
      if (op == "||" && l.as_bool()) return Value(true);
      Value r = eval(e.args[1]);
      if (!r.is_bool()) type_error("'" + op + "'", r, e.id);
      return r;
    }
    Value l = eval(e.args[0]);
    Value r = eval(e.args[1]);
    if (op == "==") return Value(l == r);
    if (op == "!=") return Value(!(l == r));
    if (l.is_null() || r.is_null()) raise("null_access", "'" + op + "' on null", e.id);
    if (op == "+") {
      if (l.is_text() && r.is_text()) return Value(l.as_text() + r.as_text());
      if (l.is_list() && r.is_list()) {
        List out = l.as_list();
        out.insert(out.end(), r.as_list().begin(), r.as_list().end());
        return Value(std::move(out));
      }
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      int cmp;
      if (l.is_int() && r.is_int()) {
        cmp = l.as_int() < r.as_int() ? -1 : (l.as_int() > r.as_int() ? 1 : 0);
      } else if (l.is_text() && r.is_text()) {
        int c = l.as_text().compare(r.as_text());
        cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
      } else {
        type_error("'" + op + "'", l.is_int() || l.is_text() ? r : l, e.id);
      }
      if (op == "<") return Value(cmp < 0);
      if (op == "<=") return Value(cmp <= 0);
      if (op == ">") return Value(cmp > 0);
      return Value(cmp >= 0);
    }
    if (!l.is_int()) type_error("'" + op + "'", l, e.id);
    if (!r.is_int()) type_error("'" + op + "'", r, e.id);
    std::int64_t a = l.as_int(), b = r.as_int(), out = 0;
    bool overflow = false;
    if (op == "+") {
      overflow = __builtin_add_overflow(a, b, &out);
    } else if (op == "-") {
      overflow = __builtin_sub_overflow(a, b, &out);
    } else if (op == "*") {
      overflow = __builtin_mul_overflow(a, b, &out);
    } else if (op == "/" || op == "%") {
      if (b == 0) raise("div_zero", "division by zero", e.id);
      if (a == INT64_MIN && b == -1) raise("overflow", "integer overflow", e.id);
      out = op == "/" ? a / b : a % b;
    }
    if (overflow) raise("overflow", "integer overflow", e.id);
    return Value(out);
  }

  Value index(const Expr& e) {
    Value base = eval(e.args[0]);
    Value key = eval(e.args[1]);
    if (base.is_list()) {
      if (!key.is_int()) type_error("list index", key, e.id);
      const auto& list = base.as_list();
      std::int64_t i = key.as_int();
      if (i < 0 || i >= static_cast<std::int64_t>(list.size())) {
        raise("key_out_of_bounds",
              "index " + std::to_string(i) + " out of range (len " + std::to_string(list.size()) + ")",
              e.id);
      }
      return list[static_cast<size_t>(i)];
    }
    if (base.is_map()) {
      if (!key.is_text()) type_error("map key", key, e.id);
      const Value* v = base.as_map().find(key.as_text());
      if (!v) raise("key_out_of_bounds", "key " + quote_text(key.as_text()) + " not found", e.id);
      return *v;
    }
    if (base.is_text()) {
      if (!key.is_int()) type_error("text index", key, e.id);
      const auto& t = base.as_text();
      std::int64_t i = key.as_int();
      if (i < 0 || i >= static_cast<std::int64_t>(t.size())) {
        raise("key_out_of_bounds",
              "index " + std::to_string(i) + " out of range (len " + std::to_string(t.size()) + ")",
              e.id);
      }
      return Value(std::string(1, t[static_cast<size_t>(i)]));
    }
    type_error("indexing", base, e.id);
  }

  void arity(const Expr& e, size_t n) {
    if (e.args.size() != n) {
      raise("arity_mismatch",
            e.text + " expects " + std::to_string(n) + " argument(s), got " + std::to_string(e.args.size()),
            e.id);
    }
  }

  Value call(const Expr& e) {
    const std::string& name = e.text;
    if (name == "catch_kind") {
      arity(e, 1);
      size_t saved_frames = frames_.size();
      size_t saved_names = function_names_.size();
      size_t saved_depth = call_stack_depth_;
      try {
        eval(e.args[0]);
        return Value();
      } catch (const Thrown& t) {
        frames_.resize(saved_frames);
        function_names_.resize(saved_names);
        call_stack_depth_ = saved_depth;
        TraceEvent ev;
        ev.kind = TraceEventKind::Exception;
        ev.depth = depth();
        ev.exception_kind = t.kind;
        ev.message = t.message;
        ev.node_id = t.node_id;
        ev.function = t.function;
        ev.caught = true;
        trace_.events.push_back(std::move(ev));
        return Value(t.kind);
      }
    }
    if (name == "assert_eq" || name == "assert_true") {
      arity(e, name == "assert_eq" ? 2 : 1);
      Value actual = eval(e.args[0]);
      Value expected = name == "assert_eq" ? eval(e.args[1]) : Value(true);
      if (!(actual == expected)) {
        TraceEvent ev;
        ev.kind = TraceEventKind::AssertFail;
        ev.depth = depth();
        ev.expected = std::move(expected);
        ev.actual = std::move(actual);
        ev.expression_text = print_expr(e.args[0]);
        trace_.events.push_back(std::move(ev));
        throw AssertionFailed{};
      }
      return Value();
    }
    auto fn = functions_.find(name);
    if (fn != functions_.end()) {
      ArgTuple args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(a));
      if (args.size() != fn->second->params.size()) {
        throw Thrown{"arity_mismatch",
                     name + " expects " + std::to_string(fn->second->params.size()) +
                         " argument(s), got " + std::to_string(args.size()),
                     e.id, name};
      }
      return call_user(name, args, e.id);
    }
    if (!is_intrinsic(name)) raise("undefined_function", "function '" + name + "' is not defined", e.id);
    ArgTuple args;
    for (const auto& a : e.args) args.push_back(eval(a));
    return intrinsic(e, args);
  }

  Value call_user(const std::string& name, const ArgTuple& args, NodeId site) {
    auto it = functions_.find(name);
    if (it == functions_.end()) raise("undefined_function", "function '" + name + "' is not defined", site);
    const FunctionDecl& fn = *it->second;
    if (args.size() != fn.params.size()) {
      throw Thrown{"arity_mismatch",
                   name + " expects " + std::to_string(fn.params.size()) + " argument(s), got " +
                       std::to_string(args.size()),
                   site, name};
    }
    if (call_stack_depth_ >= static_cast<size_t>(kMaxCallDepth)) {
      raise("stack_overflow", "call depth exceeds " + std::to_string(kMaxCallDepth), site);
    }
    TraceEvent call_event;
    call_event.kind = TraceEventKind::Call;
    call_event.depth = depth();
    call_event.name = name;
    call_event.args = args;
    trace_.events.push_back(std::move(call_event));
    ++call_counts_[name];

    Frame f;
    for (size_t i = 0; i < args.size(); ++i) f[fn.params[i]] = args[i];
    frames_.push_back(std::move(f));
    function_names_.push_back(name);
    ++call_stack_depth_;

    Value result;
    try {
      exec_block(fn.body);
    } catch (ReturnSignal& r) {
      result = std::move(r.value);
    }
    --call_stack_depth_;
    frames_.pop_back();
    function_names_.pop_back();

    TraceEvent ret;
    ret.kind = TraceEventKind::Return;
    ret.depth = depth();
    ret.name = name;
    ret.value = result;
    trace_.events.push_back(std::move(ret));
    return result;
  }

  const List& need_list(const Expr& e, const Value& v) {
    if (!v.is_list()) type_error(e.text, v, e.id);
    return v.as_list();
  }
  const Map& need_map(const Expr& e, const Value& v) {
    if (!v.is_map()) type_error(e.text, v, e.id);
    return v.as_map();
  }
  const std::string& need_text(const Expr& e, const Value& v) {
    if (!v.is_text()) type_error(e.text, v, e.id);
    return v.as_text();
  }
  std::int64_t need_int(const Expr& e, const Value& v) {
    if (!v.is_int()) type_error(e.text, v, e.id);
    return v.as_int();
  }

  Value intrinsic(const Expr& e, const ArgTuple& a) {
    const std::string& n = e.text;
    if (n == "len") {
      arity(e, 1);
      if (a[0].is_text()) return Value(static_cast<std::int64_t>(a[0].as_text().size()));
      if (a[0].is_list()) return Value(static_cast<std::int64_t>(a[0].as_list().size()));
      if (a[0].is_map()) return Value(static_cast<std::int64_t>(a[0].as_map().size()));
      type_error("len", a[0], e.id);
    }
    if (n == "push") {
      arity(e, 2);
      List out = need_list(e, a[0]);
      out.push_back(a[1]);
      return Value(std::move(out));
    }
    if (n == "pop" || n == "first" || n == "last") {
      arity(e, 1);
      const List& l = need_list(e, a[0]);
      if (l.empty()) raise("empty_container", n + " of empty list", e.id);
      if (n == "first") return l.front();
      if (n == "last") return l.back();
      return Value(List(l.begin(), l.end() - 1));
    }
    if (n == "keys") {
      arity(e, 1);
      List out;
      for (const auto& k : need_map(e, a[0]).keys) out.emplace_back(k);
      return Value(std::move(out));
    }
    if (n == "has") {
      arity(e, 2);
      return Value(need_map(e, a[0]).find(need_text(e, a[1])) != nullptr);
    }
    if (n == "get") {
      arity(e, 3);
      const Value* v = need_map(e, a[0]).find(need_text(e, a[1]));
      return v ? *v : a[2];
    }
    if (n == "set") {
      arity(e, 3);
      Map out = need_map(e, a[0]);
      out.set(need_text(e, a[1]), a[2]);
      return Value(std::move(out));
    }
    if (n == "remove") {
      arity(e, 2);
      Map out = need_map(e, a[0]);
      out.erase(need_text(e, a[1]));
      return Value(std::move(out));
    }
    if (n == "str") {
      arity(e, 1);
      return a[0].is_text() ? a[0] : Value(to_literal(a[0]));
    }
    if (n == "min" || n == "max") {
      arity(e, 2);
      std::int64_t x = need_int(e, a[0]), y = need_int(e, a[1]);
      return Value(n == "min" ? std::min(x, y) : std::max(x, y));
    }
    if (n == "abs") {
      arity(e, 1);
      std::int64_t x = need_int(e, a[0]);
      if (x == INT64_MIN) raise("overflow", "integer overflow", e.id);
      return Value(x < 0 ? -x : x);
    }
    if (n == "range") {
      arity(e, 1);
      std::int64_t count = need_int(e, a[0]);
      List out;
      for (std::int64_t i = 0; i < count; ++i) {
        step();
        out.emplace_back(i);
      }
      return Value(std::move(out));
    }
    if (n == "call_count") {
      arity(e, 1);
      auto it = call_counts_.find(need_text(e, a[0]));
      return Value(static_cast<std::int64_t>(it == call_counts_.end() ? 0 : it->second));
    }
    raise("undefined_function", "function '" + n + "' is not defined", e.id);
  }

  std::unordered_map<std::string, const FunctionDecl*> functions_;
  std::vector<Frame> frames_;
  std::vector<std::string> function_names_;
  std::map<std::string, std::int64_t> call_counts_;
  size_t call_stack_depth_ = 0;
  std::int64_t steps_ = 0;
  std::int64_t step_limit_;
  ExecutionTrace trace_;
};

}  // namespace

ProgramSet single_file(const Program& program, const std::string& file) {
  ProgramSet set;
  set.emplace(file, program);
  return set;
}

TestOutcome execute(const ProgramSet& programs, std::string_view test_source, std::int64_t step_limit) {
  if (step_limit <= 0) throw std::invalid_argument("step_limit must be positive");
  TestOutcome out;
  std::vector<Stmt> stmts;
  try {
    stmts = parse_statements(test_source);
  } catch (const SyntaxError& err) {
    out.status = OutcomeStatus::Error;
    out.error_kind = ErrorKind::ParseFailure;
    out.detail = err.what();
    return out;
  }
  Interpreter interp(programs, step_limit);
  try {
    interp.run_statements(stmts);
    out.status = OutcomeStatus::Pass;
  } catch (const AssertionFailed&) {
    out.status = OutcomeStatus::Fail;
  } catch (const Thrown& t) {
    interp.record_uncaught(t);
    out.status = OutcomeStatus::Error;
    out.error_kind = ErrorKind::Exception;
  } catch (const StepLimitHit&) {
    interp.record_step_limit();
    out.status = OutcomeStatus::Error;
    out.error_kind = ErrorKind::StepLimit;
  } catch (const ReturnSignal&) {
    // `return` at test level ends the test.
    out.status = OutcomeStatus::Pass;
  }
  out.steps_used = interp.steps();
  out.trace = std::move(interp.trace());
  return out;
}

TestOutcome execute(const ProgramSet& programs, const TestCase& test, std::int64_t step_limit) {
  return execute(programs, test.source, step_limit);
}

TestOutcome execute(const Program& program, const TestCase& test, std::int64_t step_limit) {
  return execute(single_file(program), test.source, step_limit);
}

std::vector<Observation> observed_outputs(const ProgramSet& programs, const std::string& entry,
                                          const std::vector<ArgTuple>& inputs, std::int64_t step_limit) {
  bool found = false;
  for (const auto& [file, program] : programs) found = found || program.find(entry) != nullptr;
  if (!found) throw std::invalid_argument("entry function '" + entry + "' is not defined");
  std::vector<Observation> out;
  out.reserve(inputs.size());
  for (const auto& args : inputs) {
    Observation obs;
    obs.args = args;
    Interpreter interp(programs, step_limit);
    try {
      obs.value = interp.call_entry(entry, args);
    } catch (const Thrown& t) {
      obs.exception = t.kind;
      obs.message = t.message;
    } catch (const StepLimitHit&) {
      obs.step_limit = true;
    } catch (const AssertionFailed&) {
      obs.exception = "assertion";
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<Observation> observed_outputs(const Program& program, const std::string& entry,
                                          const std::vector<ArgTuple>& inputs, std::int64_t step_limit) {
  return observed_outputs(single_file(program), entry, inputs, step_limit);
}

}  // namespace catchjit::minilang
