#include <doctest.h>

#include "generation/generation.hpp"
#include "helpers.hpp"
#include "minilang/interpreter.hpp"

using namespace catchjit;
using namespace catchjit::generation;
using minilang::OutcomeStatus;
using minilang::Value;
using testutil::programs;

TEST_CASE("observation test for f(x)=x+1 at 1") {
  auto ps = programs("fn f(x) { return x + 1; }");
  auto tests = generate_observation_tests(ps, {"f"}, {{"f", {{Value(1)}}}}, 5);
  REQUIRE(tests.size() == 1);
  CHECK(tests[0].source.find("assert_eq(f(1), 2);") != std::string::npos);
  CHECK(minilang::execute(ps, tests[0]).passed());
  CHECK(tests[0].entry == "f");
}

TEST_CASE("observation test for a throwing function asserts the kind") {
  auto ps = programs(R"(fn f(x) { throw "boom"; })");
  auto tests = generate_observation_tests(ps, {"f"}, {{"f", {{Value(1)}}}}, 5);
  REQUIRE(tests.size() == 1);
  CHECK(tests[0].source.find("catch_kind(f(1))") != std::string::npos);
  CHECK(tests[0].source.find("\"boom\"") != std::string::npos);
  CHECK(minilang::execute(ps, tests[0]).passed());
}

TEST_CASE("budget caps the number of tests deterministically") {
  auto ps = programs("fn f(x) { return x * 2; } fn g(x) { return x - 1; }");
  std::map<std::string, std::vector<minilang::ArgTuple>> seeds;
  for (int i = 0; i < 5; ++i) {
    seeds["f"].push_back({Value(i)});
    seeds["g"].push_back({Value(i)});
  }
  auto a = generate_observation_tests(ps, {"f", "g"}, seeds, 3);
  auto b = generate_observation_tests(ps, {"f", "g"}, seeds, 3);
  REQUIRE(a.size() == 3);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].source == b[i].source);
  CHECK(a[0].entry == "f");
  CHECK(a[1].entry == "g");
}

TEST_CASE("mutation_guided_filter keeps killing tests only") {
  auto ps = programs("fn f(x) { return x + 1; } fn g(x) { return x; }");
  auto mutants = mutation::enumerate_mutants(ps, mutation::select_operators({"aor"}));
  const mutation::Mutant* minus = nullptr;
  for (const auto& m : mutants) {
    if (minilang::print(*m.mutated.at(m.file).find("f")).find("x - 1") != std::string::npos) minus = &m;
  }
  REQUIRE(minus);
  minilang::TestCase kills{"k", "assert_eq(f(1), 2);", {}, "f"};
  minilang::TestCase misses{"m", "assert_eq(g(1), 1);", {}, "g"};
  auto kept = mutation_guided_filter({kills, misses}, ps, *minus);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].test.id == "k");
  CHECK(kept[0].on_mutant.status == OutcomeStatus::Fail);
  CHECK(kept[0].test.provenance.mutant_id == std::optional<std::string>(minus->id));
  CHECK(mutation_guided_filter({}, ps, *minus).empty());
}

TEST_CASE("scripted backend: valid and invalid proposals") {
  GenerationContext ctx;
  ctx.target_programs = programs("fn f(x) { return x + 1; }");
  ctx.entry_points = {"f"};
  ScriptedMock two({"assert_eq(f(1), 2);", "assert_eq(f(2), 3);"});
  auto r = generate_via_backend(two, ctx, 5);
  CHECK(r.tests.size() == 2);
  CHECK(r.dropped == 0);

  ScriptedMock mixed({"assert_eq(f(1), 2);", "assert_eq(f(1), ;"});
  auto m = generate_via_backend(mixed, ctx, 5);
  CHECK(m.tests.size() == 1);
  CHECK(m.dropped == 1);
}

TEST_CASE("external backend down falls back to the template generator") {
  GenerationContext ctx;
  ctx.target_programs = programs("fn f(x) { return x + 1; }");
  ctx.entry_points = {"f"};
  ExternalBackend down(testutil::fixture() + " backend dead", 2000);
  CHECK_THROWS_AS(generate_via_backend(down, ctx, 3), BackendUnavailable);

  ExternalBackend down2(testutil::fixture() + " backend dead", 2000);
  TemplateGenerator fallback;
  auto r = generate_via_backend(down2, ctx, 3, &fallback);
  CHECK(r.fallback_used);
  CHECK_FALSE(r.notice.empty());
  CHECK_FALSE(r.tests.empty());
}

TEST_CASE("external backend answers over the line protocol") {
  GenerationContext ctx;
  ctx.target_programs = programs("fn f(x) { return x + 1; }");
  ctx.entry_points = {"f"};
  ExternalBackend ok(testutil::fixture() + " backend ok", 5000);
  auto r = generate_via_backend(ok, ctx, 3);
  REQUIRE(r.tests.size() == 1);
  CHECK(r.tests[0].source.find("f(0)") != std::string::npos);

  ExternalBackend refusing(testutil::fixture() + " backend error", 5000);
  CHECK_THROWS_AS(generate_via_backend(refusing, ctx, 3), BackendUnavailable);
}

TEST_CASE("assertion_entry finds the first asserted call") {
  CHECK(assertion_entry("assert_eq(f(1), 2);") == "f");
  CHECK(assertion_entry("let x = 1; assert_true(is_ok(x));") == "is_ok");
  CHECK(assertion_entry("let x = 1;").empty());
}

TEST_CASE("seed values cover defaults and harvested constants") {
  auto ps = programs(R"(fn f(x) { if (x > 17) { return "adult"; } return "minor"; })");
  auto seeds = default_seeds(ps, "f");
  bool has17 = false;
  for (const auto& t : seeds) has17 = has17 || t[0] == Value(17);
  CHECK(has17);
  CHECK(seeds.size() <= kSeedTupleCap);
}

TEST_CASE("risk json round-trips") {
  mutation::Risk r{"r1", "desc", {{"main.ml0", "f"}}, mutation::RiskCategory::Null, mutation::NodeScope::Return};
  auto back = risk_from_json(risk_to_json(r));
  CHECK(back.id == r.id);
  CHECK(back.locations == r.locations);
  CHECK(back.category == r.category);
  CHECK(back.scope == r.scope);
}
