#include <doctest.h>

#include "helpers.hpp"
#include "minilang/interpreter.hpp"
#include "minilang/parser.hpp"
#include "minilang/trace.hpp"
#include "minilang/value.hpp"

using namespace catchjit::minilang;
using testutil::programs;

TEST_CASE("parse: one function with one parameter") {
  auto p = parse("fn f(x){ return x + 1; }");
  REQUIRE(p.functions.size() == 1);
  CHECK(p.functions[0].name == "f");
  CHECK(p.functions[0].params.size() == 1);
}

TEST_CASE("parse: empty input has no functions") { CHECK(parse("").functions.empty()); }

TEST_CASE("parse: malformed parameter list reports the brace") {
  try {
    parse("fn f( { }");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.location().line == 1);
    CHECK(e.location().column == 7);
    CHECK(e.found().find('{') != std::string::npos);
  }
}

TEST_CASE("parse: print round-trips") {
  const char* src = R"(fn g(xs, k) {
  let m = {"a": 1, "b": [1, 2]};
  if (len(xs) > 0 && !has(m, k)) {
    push(xs, -3);
  } else {
    throw "bad_input", "no " + k;
  }
  while (k < 3) {
    k = k + 1;
  }
  return m[k];
}
)";
  auto p = parse(src);
  auto again = parse(print(p));
  CHECK(print(again) == print(p));
}

TEST_CASE("validate: duplicate functions and shadowed intrinsics") {
  CHECK_THROWS_AS(validate(parse("fn f() { return 1; } fn f() { return 2; }")), ValidationError);
  CHECK_THROWS_AS(validate(parse("fn len(x) { return 1; }")), ValidationError);
  CHECK_THROWS_AS(validate(parse("fn f(a, a) { return 1; }")), ValidationError);
  CHECK_NOTHROW(validate(parse("fn f(a, b) { return a; }")));
}

TEST_CASE("execute: passing and failing assertions") {
  auto ps = programs("fn f(x) { return x + 1; }");
  auto pass = execute(ps, "assert_eq(f(1), 2);");
  CHECK(pass.status == OutcomeStatus::Pass);

  auto fail = execute(ps, "assert_eq(f(1), 3);");
  REQUIRE(fail.status == OutcomeStatus::Fail);
  const auto* t = fail.trace.terminal();
  REQUIRE(t);
  CHECK(t->kind == TraceEventKind::AssertFail);
  CHECK(t->expected == Value(3));
  CHECK(t->actual == Value(2));
}

TEST_CASE("execute: infinite loop hits the step limit") {
  auto ps = programs("fn spin() { while (true) { } return 0; }");
  auto out = execute(ps, "assert_eq(spin(), 0);", 10000);
  CHECK(out.status == OutcomeStatus::Error);
  CHECK(out.error_kind == ErrorKind::StepLimit);
  CHECK(out.steps_used <= 10001);
}

TEST_CASE("execute: implicit-oracle exceptions") {
  auto ps = programs(R"(fn d(x) { return 10 / x; }
fn k(m) { return m["x"]; }
fn i(xs) { return xs[5]; }
fn n(x) { return x + 1; }
fn p(xs) { return pop(xs); }
fn r(x) { return r(x); }
fn big(x) { return x * 9223372036854775807; })");
  auto kind = [&](const std::string& call) {
    auto out = execute(ps, "assert_eq(" + call + ", 0);");
    const auto* t = out.trace.terminal();
    return t && t->kind == TraceEventKind::Exception ? t->exception_kind : std::string("none");
  };
  CHECK(kind("d(0)") == "div_zero");
  CHECK(kind("k({})") == "key_out_of_bounds");
  CHECK(kind("i([1, 2])") == "key_out_of_bounds");
  CHECK(kind("n(null)") == "null_access");
  CHECK(kind("p([])") == "empty_container");
  CHECK(kind("r(1)") == "stack_overflow");
  CHECK(kind("big(2)") == "overflow");
  CHECK(kind("n(\"a\") - 1") == "type_mismatch");
  CHECK(kind("missing(1)") == "undefined_function");
  CHECK(kind("n(1, 2)") == "arity_mismatch");
}

TEST_CASE("execute: catch_kind yields the thrown kind") {
  auto ps = programs(R"(fn f(x) { throw "boom", "went off"; })");
  CHECK(execute(ps, R"(assert_eq(catch_kind(f(1)), "boom");)").status == OutcomeStatus::Pass);
  CHECK(execute(ps, R"(assert_eq(catch_kind(1 + 1), null);)").status == OutcomeStatus::Pass);
}

TEST_CASE("execute: call_count counts calls made so far") {
  auto ps = programs("fn g(x) { return x; } fn f(x) { return g(x) + g(x); }");
  CHECK(execute(ps, R"(f(1); assert_eq(call_count("g"), 2);)").status == OutcomeStatus::Pass);
}

TEST_CASE("trace: calls and returns are balanced") {
  auto ps = programs("fn g(x) { return x * 2; } fn f(x) { return g(x) + 1; }");
  auto out = execute(ps, "assert_eq(f(2), 5);");
  REQUIRE(out.passed());
  int depth = 0;
  for (const auto& e : out.trace.events) {
    if (e.kind == TraceEventKind::Call) ++depth;
    if (e.kind == TraceEventKind::Return) --depth;
    CHECK(depth >= 0);
  }
  CHECK(depth == 0);
  auto text = render_trace(out.trace);
  CHECK(text.find("call f(2)") != std::string::npos);
}

TEST_CASE("observed_outputs: values and exceptions per input") {
  auto ps = programs("fn f(x) { return x + 1; } fn b(x) { throw \"boom\"; }");
  auto obs = observed_outputs(ps, "f", {{Value(0)}, {Value(1)}});
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].value == Value(1));
  CHECK(obs[1].value == Value(2));
  auto thrown = observed_outputs(ps, "b", {{Value(0)}});
  REQUIRE(thrown.size() == 1);
  CHECK(thrown[0].exception == std::optional<std::string>("boom"));
  CHECK_THROWS_AS(observed_outputs(ps, "zzz", {{Value(0)}}), std::invalid_argument);
}

TEST_CASE("values: literals re-parse to equal values") {
  Map m;
  m.set("b", Value(List{Value(1), Value(true), Value()}));
  m.set("a", Value("q\"uote"));
  Value v(m);
  auto ps = programs("fn id(x) { return x; }");
  auto out = execute(ps, "assert_eq(id(" + to_literal(v) + "), " + to_literal(v) + ");");
  CHECK(out.passed());
}

TEST_CASE("values: maps compare in insertion order") {
  Map a, b;
  a.set("x", 1);
  a.set("y", 2);
  b.set("y", 2);
  b.set("x", 1);
  CHECK_FALSE(Value(a) == Value(b));
  CHECK(same_pairs_different_order(Value(a), Value(b)));
  CHECK_FALSE(same_pairs_different_order(Value(a), Value(a)));
}

TEST_CASE("test files: blocks with ids") {
  auto entries = parse_test_file(R"(test "t1" { assert_eq(1, 1); } test "t2" { assert_true(true); })");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].id == "t1");
  CHECK(entries[1].id == "t2");
}

TEST_CASE("determinism: same program and test give identical outcomes") {
  auto ps = programs("fn f(xs) { let m = {}; m[\"k\"] = len(xs); return m; }");
  auto a = execute(ps, "assert_eq(f([1, 2]), {\"k\": 2});");
  auto b = execute(ps, "assert_eq(f([1, 2]), {\"k\": 2});");
  CHECK(a == b);
  CHECK(a.passed());
}
