#include <doctest.h>

#include <algorithm>
#include <set>

#include "../common/rule_fixtures.hpp"
#include "assessors/assessors.hpp"
#include "helpers.hpp"

using namespace catchjit;
using namespace catchjit::assessors;

namespace {

const PatternRule& rule_by_id(const std::string& id) {
  for (const auto& r : default_rules()) {
    if (r.id == id) return r;
  }
  throw std::out_of_range(id);
}

Assessment scored(double rub, std::optional<double> tp, std::optional<double> med,
                  std::optional<DismissalCost> cost = std::nullopt, const std::string& id = "t") {
  Assessment a;
  a.case_id = "c";
  a.test_id = id;
  a.rubfake.score = rub;
  a.rubfake.dismissal_cost = cost;
  a.tp_prob = tp;
  a.bucket_med = med;
  return a;
}

}  // namespace

TEST_CASE("default rules: fourteen FP and nine TP patterns") {
  int fp = 0, tp = 0;
  for (const auto& r : default_rules()) (r.polarity == Polarity::FP ? fp : tp)++;
  CHECK(fp == 14);
  CHECK(tp == 9);
  CHECK(magnitude(Likelihood::High) == 0.9);
  CHECK(magnitude(Likelihood::Medium) == 0.5);
  CHECK(magnitude(Likelihood::Low) == 0.2);
}

TEST_CASE("every rule has a firing and a silent fixture") {
  auto fixtures = rulefix::rule_fixtures(testutil::fixture());
  std::set<std::string> covered;
  for (const auto& f : fixtures) {
    CAPTURE(f.rule);
    const auto& rule = rule_by_id(f.rule);
    CHECK(f.fires.parent_outcome.passed());
    CHECK_FALSE(f.fires.child_outcome.passed());
    auto fired = evaluate_rule(f.fires, rule);
    REQUIRE(fired);
    CHECK(fired->rule_id == f.rule);
    CHECK_FALSE(fired->evidence.empty());
    auto single = rubfake_assess(f.fires, {rule});
    CHECK(evidence_sound(f.fires, single));
    CHECK_FALSE(evaluate_rule(f.silent, rule));
    covered.insert(f.rule);
  }
  CHECK(covered.size() == default_rules().size());
}

TEST_CASE("rubfake: not_implemented scores -0.9") {
  auto b = rulefix::ml_bundle("fn f(x) {\n  return x;\n}\n", "fn f(x) {\n  throw \"not_implemented\";\n}\n",
                              "assert_eq(f(1), 1);");
  auto a = rubfake_assess(b, default_rules());
  CHECK(a.score == doctest::Approx(-0.9));
  REQUIRE(a.fired.size() == 1);
  CHECK(a.fired[0].rule_id == "not_implemented_exception");
  CHECK(evidence_sound(b, a));
}

TEST_CASE("rubfake: changed_bool scores positive and nothing fired scores 0") {
  auto b = rulefix::ml_bundle(rulefix::kThreshold, rulefix::kThresholdLowered, "assert_eq(ok(5), true);");
  auto a = rubfake_assess(b, default_rules());
  CHECK(a.score > 0);
  CHECK(a.dismissal_cost == DismissalCost::Trivial);

  auto quiet = rulefix::ml_bundle("fn f(x) {\n  return x * 2;\n}\n", "fn f(x) {\n  return x * 3;\n}\n",
                                  "assert_eq(f(2), 4);");
  auto q = rubfake_assess(quiet, default_rules());
  CHECK(q.fired.empty());
  CHECK(q.score == 0.0);
  CHECK_FALSE(q.dismissal_cost);
}

TEST_CASE("rubfake: equal FP and TP magnitudes lean FP") {
  auto b = rulefix::ml_bundle("fn f(x) {\n  return x;\n}\n", "fn f(x) {\n  throw \"not_implemented\";\n}\n",
                              "assert_eq(f(1), 1);", "Refactor f");
  auto a = rubfake_assess(b, default_rules());
  CHECK(a.fired.size() == 2);
  CHECK(a.score == kTieScore);
}

TEST_CASE("rules: malformed documents are rejected") {
  CHECK_THROWS_AS(parse_rules(nlohmann::json::parse(R"({"rules": [{"id": "x"}]})")), RuleFormatError);
  CHECK_THROWS_AS(parse_rules(nlohmann::json::parse(
                      R"({"rules": [{"id": "x", "polarity": "FP", "likelihood": "high", "sources": ["execution_log"],
                          "trace": {"event": "runner", "kind": "("}}]})")),
                  RuleFormatError);
  CHECK_THROWS_AS(load_rules("/nonexistent/rules.json"), RuleFormatError);
  CHECK(parse_rules(nlohmann::json::parse(default_rules_text())).size() == 23);
}

TEST_CASE("TP Prob boundary triple") {
  CHECK(tp_prob_score({Answer::Yes, 1.0}) == 1.0);
  CHECK(tp_prob_score({Answer::No, 1.0}) == -1.0);
  CHECK(tp_prob_score({Answer::Yes, 0.5}) == 0.0);
  CHECK(tp_prob_score({Answer::No, 0.75}) == doctest::Approx(-0.5));
}

TEST_CASE("bucket mapping and lower median for sizes 1 to 7") {
  CHECK(bucket_score(Bucket::High) == 1.0);
  CHECK(bucket_score(Bucket::Medium) == 0.0);
  CHECK(bucket_score(Bucket::Low) == -1.0);
  const double levels[] = {-1.0, 0.0, 1.0};
  for (int n = 1; n <= 7; ++n) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int code = 0; code < combos; ++code) {
      std::vector<double> v;
      for (int i = 0, c = code; i < n; ++i, c /= 3) v.push_back(levels[c % 3]);
      auto sorted = v;
      std::sort(sorted.begin(), sorted.end());
      double oracle = sorted[(sorted.size() - 1) / 2];
      CAPTURE(n);
      CAPTURE(code);
      CHECK(lower_median(v) == oracle);
    }
  }
  CHECK(lower_median({-1.0, 1.0}) == -1.0);
  CHECK_THROWS_AS(lower_median({}), std::invalid_argument);
}

TEST_CASE("review filter examples") {
  CHECK(review_filter(scored(0, -1.0, 1.0)).decision == ReviewDecision::AutoDiscard);
  CHECK(review_filter(scored(0, 0.4, 0.0)).decision == ReviewDecision::AutoDiscard);
  CHECK(review_filter(scored(0, 0.4, 1.0)).decision == ReviewDecision::HumanReview);
  CHECK(review_filter(scored(0, std::nullopt, std::nullopt)).decision == ReviewDecision::HumanReview);
  CHECK_FALSE(review_filter(scored(0, -1.0, 1.0)).clause.empty());
  FilterPolicy alt;
  alt.discard_bucket_value = -1.0;
  CHECK(review_filter(scored(0, 0.4, 0.0), alt).decision == ReviewDecision::HumanReview);
  CHECK(review_filter(scored(0, 0.4, -1.0), alt).decision == ReviewDecision::AutoDiscard);
}

TEST_CASE("rank: cheap dismissal first, ties keep id order") {
  auto ranked = rank_catches({scored(0.5, 0.5, 0.0, DismissalCost::Heavy, "heavy"),
                              scored(0.5, 0.5, 0.0, DismissalCost::Trivial, "trivial")});
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].test_id == "trivial");
  CHECK(ranked[0].final_rank_key == doctest::Approx(0.4 * 0.5 + 0.3 * 0.5 + 0.1));
  CHECK(ranked[1].final_rank_key == doctest::Approx(0.4 * 0.5 + 0.3 * 0.5 - 0.1));

  auto zeros = rank_catches({scored(0, 0.0, 0.0, std::nullopt, "a"), scored(0, 0.0, 0.0, std::nullopt, "b"),
                             scored(0, 0.0, 0.0, std::nullopt, "c")});
  CHECK(zeros[0].test_id == "a");
  CHECK(zeros[1].test_id == "b");
  CHECK(zeros[2].test_id == "c");
  CHECK(rank_catches({scored(0.2, 0.1, 1.0)}).size() == 1);
  CHECK(rank_catches({}).empty());
}

TEST_CASE("judges: scripted, ground truth and external") {
  auto b = rulefix::ml_bundle(rulefix::kThreshold, rulefix::kThresholdLowered, "assert_eq(ok(5), true);");
  b.case_ref = "c1";

  auto scripted = ScriptedJudge::from_json(nlohmann::json::parse(
      R"({"id": "s", "default": {"answer": "Yes", "p": 0.8, "bucket": "High", "rationale": "r"}})"));
  CHECK(judge_tp_prob(b, *scripted) == doctest::Approx(0.6));
  ScriptedJudge empty("e", {});
  CHECK_FALSE(judge_tp_prob(b, empty));

  corpus::GroundTruth truth;
  truth.buggy = true;
  truth.culprit = "limit";
  GroundTruthJudge gt({{"c1", truth}});
  CHECK(gt.true_positive(b));
  CHECK(judge_tp_prob(b, gt) > 0);
  truth.culprit = "elsewhere";
  GroundTruthJudge miss({{"c1", truth}});
  CHECK_FALSE(miss.true_positive(b));
  CHECK(judge_tp_prob(b, miss) < 0);

  ExternalJudge yes("x", testutil::fixture() + " judge yes", 5000);
  ExternalJudge no("y", testutil::fixture() + " judge no", 5000);
  ExternalJudge dead("z", testutil::fixture() + " judge dead", 2000);
  CHECK(judge_tp_prob(b, yes) == doctest::Approx(0.8));
  auto med = judge_bucket_med(b, {&yes, &no, &dead});
  CHECK(med.bucket_scores.size() == 2);
  CHECK(med.failures.size() == 1);
  REQUIRE(med.bucket_med);
  CHECK(*med.bucket_med == -1.0);
  CHECK_FALSE(judge_bucket_med(b, {&dead}).bucket_med);
}

TEST_CASE("assess: heuristic ensemble is deterministic") {
  auto b = rulefix::ml_bundle(rulefix::kThreshold, rulefix::kThresholdLowered, "assert_eq(ok(5), true);",
                              "Refactor ok");
  HeuristicJudge j0(0), j1(1), j2(2);
  std::vector<JudgeBackend*> ensemble{&j0, &j1, &j2};
  auto a = assess(b, default_rules(), ensemble);
  auto again = assess(b, default_rules(), ensemble);
  CHECK(a.final_rank_key == again.final_rank_key);
  CHECK(a.bucket_scores == again.bucket_scores);
  CHECK(a.rubfake.score == doctest::Approx(0.9));
  REQUIRE(a.tp_prob);
  CHECK(*a.tp_prob >= -1.0);
  CHECK(*a.tp_prob <= 1.0);
}
