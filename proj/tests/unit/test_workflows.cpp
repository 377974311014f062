#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "workflows/workflows.hpp"

using namespace catchjit;
using namespace catchjit::workflows;
using minilang::ErrorKind;
using minilang::OutcomeStatus;
using testutil::programs;

namespace {

TestOutcome outcome(OutcomeStatus s, ErrorKind k = ErrorKind::None) {
  TestOutcome o;
  o.status = s;
  o.error_kind = k;
  return o;
}

corpus::DiffCase make_case(const std::string& id, const std::string& parent, const std::string& child,
                           const std::string& title = "", const std::string& summary = "") {
  corpus::DiffCase c;
  c.id = id;
  c.parent = programs(parent);
  c.child = programs(child);
  c.title = title;
  c.summary = summary;
  return c;
}

int weak(const WorkflowResult& r) {
  int n = 0;
  for (const auto& t : r.tests) n += t.verdict == CatchVerdict::WeakCatch;
  return n;
}

}  // namespace

TEST_CASE("classify: all sixteen status combinations") {
  const TestOutcome statuses[] = {
      outcome(OutcomeStatus::Pass),
      outcome(OutcomeStatus::Fail),
      outcome(OutcomeStatus::Error, ErrorKind::Exception),
      outcome(OutcomeStatus::Error, ErrorKind::StepLimit),
  };
  // Rows: parent; columns: child.
  const CatchVerdict expected[4][4] = {
      {CatchVerdict::CoincidentalHarden, CatchVerdict::WeakCatch, CatchVerdict::WeakCatch, CatchVerdict::ErrorOutcome},
      {CatchVerdict::Invalid, CatchVerdict::Invalid, CatchVerdict::Invalid, CatchVerdict::Invalid},
      {CatchVerdict::Invalid, CatchVerdict::Invalid, CatchVerdict::Invalid, CatchVerdict::Invalid},
      {CatchVerdict::Invalid, CatchVerdict::Invalid, CatchVerdict::Invalid, CatchVerdict::Invalid},
  };
  for (int p = 0; p < 4; ++p) {
    for (int c = 0; c < 4; ++c) {
      CAPTURE(p);
      CAPTURE(c);
      CHECK(classify(statuses[p], statuses[c]) == expected[p][c]);
    }
  }
  CHECK(classify(outcome(OutcomeStatus::Pass), outcome(OutcomeStatus::Error, ErrorKind::ParseFailure)) ==
        CatchVerdict::ErrorOutcome);
}

TEST_CASE("dodgy diff: x+1 to x+2 is caught by an f(1) == 2 assertion") {
  auto c = make_case("inc", "fn f(x) { return x + 1; }", "fn f(x) { return x + 2; }", "Refactor f");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  auto r = run_dodgy_diff(c, ctx);
  CHECK(r.workflow == WorkflowTag::DodgyDiff);
  bool found = false;
  for (const auto& t : r.tests) {
    if (t.verdict == CatchVerdict::WeakCatch && t.test.source.find("assert_eq(f(1), 2);") != std::string::npos) {
      found = true;
    }
  }
  CHECK(found);
  for (const auto& t : r.tests) {
    if (t.verdict != CatchVerdict::WeakCatch) continue;
    CHECK(minilang::execute(c.parent, t.test).status == OutcomeStatus::Pass);
    CHECK(minilang::execute(c.child, t.test).status != OutcomeStatus::Pass);
  }
}

TEST_CASE("dodgy diff: empty diff and unused addition give no weak catches") {
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  auto same = make_case("same", "fn f(x) { return x; }", "fn f(x) { return x; }");
  CHECK(weak(run_dodgy_diff(same, ctx)) == 0);
  auto add = make_case("add", "fn f(x) { return x * 3; }", "fn f(x) { return x * 3; }\nfn g(x) { return 0; }");
  CHECK(weak(run_dodgy_diff(add, ctx)) == 0);
}

TEST_CASE("infer_intent: template uses title and changed functions") {
  auto c = make_case("i", "fn f(x) { return x; }", "fn f(x) { return x + 1; }", "fix loop bound");
  generation::TemplateGenerator gen;
  auto intent = infer_intent(c, gen);
  CHECK(intent.text.find("fix loop bound") != std::string::npos);
  CHECK(intent.text.find("f") != std::string::npos);

  auto bare = make_case("b", "fn g(x) { return x; }", "fn g(x) { return x + 1; }");
  auto from_decls = infer_intent(bare, gen);
  CHECK(from_decls.text.find("g") != std::string::npos);

  generation::ScriptedMock mock({}, std::string("canned intent text"));
  CHECK(infer_intent(c, mock).text == "canned intent text");
}

TEST_CASE("enumerate_risks: boundary and exception categories") {
  generation::TemplateGenerator gen;
  auto loop = make_case("loop", "fn f(xs) { let i = 0; while (i <= len(xs)) { i = i + 1; } return i; }",
                        "fn f(xs) { let i = 0; while (i < len(xs)) { i = i + 1; } return i; }");
  auto d = corpus::compute_diff(loop.parent, loop.child);
  auto risks = enumerate_risks(default_intent(loop, d), loop, d, gen, 10);
  bool boundary = false;
  for (const auto& r : risks) {
    boundary = boundary || (r.category == mutation::RiskCategory::Boundary && r.locations[0].function == "f");
  }
  CHECK(boundary);

  auto thrower = make_case("thr", "fn f(x) { return x; }",
                           "fn f(x) { if (x < 0) { throw \"negative\"; } return x; }");
  auto d2 = corpus::compute_diff(thrower.parent, thrower.child);
  bool exception = false;
  for (const auto& r : enumerate_risks(default_intent(thrower, d2), thrower, d2, gen, 10)) {
    exception = exception || r.category == mutation::RiskCategory::Exception;
  }
  CHECK(exception);

  auto same = make_case("same", "fn f(x) { return x; }", "fn f(x) { return x; }");
  auto d3 = corpus::compute_diff(same.parent, same.child);
  CHECK(enumerate_risks(default_intent(same, d3), same, d3, gen, 10).empty());
}

TEST_CASE("intent aware: boundary bug yields a catch tied to a boundary risk") {
  auto c = make_case("bnd",
                     "fn count_upto(n) { let i = 0; let k = 0; while (i <= n) { k = k + 1; i = i + 1; } return k; }",
                     "fn count_upto(n) { let i = 0; let k = 0; while (i < n) { k = k + 1; i = i + 1; } return k; }",
                     "Refactor count_upto");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  auto r = run_intent_aware(c, ctx);
  REQUIRE(r.intent);
  std::set<std::string> boundary_ids;
  for (const auto& k : r.risks) {
    if (k.category == mutation::RiskCategory::Boundary) boundary_ids.insert(k.id);
  }
  bool tied = false;
  for (const auto& t : r.tests) {
    if (t.verdict == CatchVerdict::WeakCatch && t.test.provenance.risk_id &&
        boundary_ids.count(*t.test.provenance.risk_id)) {
      tied = true;
    }
  }
  CHECK(tied);
}

TEST_CASE("intent aware: rename-only change has no weak catches") {
  auto c = make_case("ren", "fn area(w, h) { let a = w * h; return a; }",
                     "fn area(w, h) { let result = w * h; return result; }", "Rename local in area");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  CHECK(weak(run_intent_aware(c, ctx)) == 0);
}

TEST_CASE("intent aware: zero risks give an empty test list") {
  auto c = make_case("none", "fn f(x) { return x; }", "fn f(x) { return x; }");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  CHECK(run_intent_aware(c, ctx).tests.empty());
}

TEST_CASE("harden baselines: empty diff gives only coincidental hardens") {
  auto c = make_case("same", "fn f(x) { if (x > 2) { return x - 2; } return x * 2; }",
                     "fn f(x) { if (x > 2) { return x - 2; } return x * 2; }");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  auto h = run_harden_baselines(c, ctx);
  REQUIRE_FALSE(h.no_coverage.tests.empty());
  REQUIRE_FALSE(h.mutation_guided.tests.empty());
  for (const auto* r : {&h.no_coverage, &h.mutation_guided}) {
    for (const auto& t : r->tests) CHECK(t.verdict == CatchVerdict::CoincidentalHarden);
  }
  auto view = coincidental_catch_view(h, c);
  CHECK(view.catches.empty());
  CHECK(view.tests_considered == static_cast<int>(h.no_coverage.tests.size() + h.mutation_guided.tests.size()));
}

TEST_CASE("harden baselines: bug outside the sampled entries is missed") {
  // The child changes only the unreachable branch taken for huge inputs.
  auto c = make_case("far", "fn f(x) { if (x > 100000) { return 1; } return 0; }",
                     "fn f(x) { if (x > 100000) { return 2; } return 0; }");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  auto h = run_harden_baselines(c, ctx);
  CHECK(weak(h.no_coverage) == 0);
}

TEST_CASE("harvest: dedup by shape and keep only hardens") {
  WorkflowResult r;
  auto mk = [](const std::string& id, const std::string& src, CatchVerdict v) {
    CandidateTest t;
    t.test = {id, src, {}, "f"};
    t.verdict = v;
    return t;
  };
  r.tests = {mk("a", "assert_eq(f(1), 2);", CatchVerdict::CoincidentalHarden),
             mk("b", "assert_eq(f(1), 2);", CatchVerdict::CoincidentalHarden),
             mk("c", "assert_eq(f(2), 3);", CatchVerdict::CoincidentalHarden),
             mk("d", "assert_eq(f(3), 4);", CatchVerdict::WeakCatch),
             mk("e", "assert_eq(f(4), 5);", CatchVerdict::Invalid)};
  auto h = harvest_hardening({r});
  REQUIRE(h.size() == 2);
  CHECK(h[0].id == "a");
  CHECK(h[1].id == "c");
  WorkflowResult none;
  none.tests = {mk("d", "assert_eq(f(3), 4);", CatchVerdict::WeakCatch)};
  CHECK(harvest_hardening({none}).empty());
}

TEST_CASE("workflows are deterministic") {
  auto c = make_case("det", "fn f(xs) { let s = 0; let i = 0; while (i < len(xs)) { s = s + xs[i]; i = i + 1; } return s; }",
                     "fn f(xs) { let s = 0; let i = 1; while (i < len(xs)) { s = s + xs[i]; i = i + 1; } return s; }",
                     "Refactor f");
  generation::TemplateGenerator gen;
  RunContext ctx{gen, nullptr, {}};
  auto a = run_intent_aware(c, ctx);
  auto b = run_intent_aware(c, ctx);
  REQUIRE(a.tests.size() == b.tests.size());
  for (size_t i = 0; i < a.tests.size(); ++i) {
    CHECK(a.tests[i].test.source == b.tests[i].test.source);
    CHECK(a.tests[i].verdict == b.tests[i].verdict);
  }
}
