#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus/corpus.hpp"
#include "generation/generation.hpp"
#include "generation/line_protocol.hpp"
#include "minilang/trace.hpp"

namespace catchjit::assessors {

using generation::IntentDescription;
using minilang::TestCase;
using minilang::TestOutcome;

struct CatchBundle {
  TestCase test;
  TestOutcome parent_outcome;
  TestOutcome child_outcome;
  corpus::Diff diff;
  IntentDescription intent;
  std::string case_ref;
};

// ---- rule engine ---------------------------------------------------------

enum class Polarity { FP, TP };
enum class Likelihood { High, Medium, Low };
enum class DismissalCost { Trivial, Moderate, Heavy };
enum class Source { ExecutionLog, TestCode, Diff, Intent };

std::string_view to_string(Polarity p);
std::string_view to_string(Likelihood l);
std::string_view to_string(DismissalCost c);
std::string_view to_string(Source s);
std::optional<DismissalCost> parse_dismissal_cost(std::string_view text);

// high 0.9, medium 0.5, low 0.2.
double magnitude(Likelihood l);

// Regex fields may reference ${entry} (the asserted entry function),
// ${trace.N} (group N of the trace message match) and ${test.N} (group N of
// the test-code match). Substituted values are regex-escaped.
struct TraceMatcher {
  // runner, exception, assert_fail, null (null actual or null_access), or
  // failure (the terminal AssertFail or uncaught Exception).
  std::string event;
  std::string kind;        // regex on exception kind or runner event name
  std::string message;     // regex on message
  std::string expression;  // regex on the asserted expression text
  std::string shape;       // bool_flip, map_reordered, or empty
};

struct PatternRule {
  std::string id;
  Polarity polarity = Polarity::FP;
  Likelihood likelihood = Likelihood::High;
  std::vector<Source> sources;
  std::string description;
  TraceMatcher trace;
  std::string test_code;       // regex that must match the test source
  std::string intent;          // regex that must match the intent text
  std::string diff_absent;     // regex that must not match any changed line
  std::string decl_unchanged;  // function that must not be a changed decl
  std::optional<DismissalCost> dismissal_cost;
};

class RuleFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<PatternRule> parse_rules(const nlohmann::json& doc);
std::vector<PatternRule> load_rules(const std::string& path);
// Rules compiled in from data/rules.json.
const std::vector<PatternRule>& default_rules();
const std::string& default_rules_text();

struct Evidence {
  Source source = Source::ExecutionLog;
  std::string span;
};

struct FiredRule {
  std::string rule_id;
  Polarity polarity = Polarity::FP;
  Likelihood likelihood = Likelihood::High;
  std::vector<Evidence> evidence;
};

struct RubfakeAssessment {
  std::vector<FiredRule> fired;
  double score = 0.0;
  std::optional<DismissalCost> dismissal_cost;  // cheapest fired TP rule
};

// Score when the strongest FP and TP signals cancel: leans FP.
inline constexpr double kTieScore = -0.1;

// Text of each source as the rules see it.
std::string source_text(const CatchBundle& bundle, Source source);

std::optional<FiredRule> evaluate_rule(const CatchBundle& bundle, const PatternRule& rule);
RubfakeAssessment rubfake_assess(const CatchBundle& bundle, const std::vector<PatternRule>& rules);

// Every evidence span is a literal substring of its source.
bool evidence_sound(const CatchBundle& bundle, const RubfakeAssessment& assessment);

// ---- judges --------------------------------------------------------------

enum class Answer { Yes, No };
enum class Bucket { High, Medium, Low };

std::string_view to_string(Answer a);
std::string_view to_string(Bucket b);
std::optional<Bucket> parse_bucket(std::string_view text);

struct BinaryJudgment {
  Answer answer = Answer::No;
  double token_probability = 1.0;  // in (0, 1]
};

struct BucketJudgment {
  Bucket category = Bucket::Medium;
  std::string rationale;
};

// Judges throw generation::BackendUnavailable when they cannot answer.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::string id() const = 0;
  virtual BinaryJudgment judge_binary(const CatchBundle& bundle) = 0;
  virtual BucketJudgment judge_bucket(const CatchBundle& bundle) = 0;
};

struct ScriptedVerdict {
  Answer answer = Answer::No;
  double p = 1.0;
  Bucket bucket = Bucket::Medium;
  std::string rationale;
};

// Canned answers per test id with an optional default. Missing entries and
// responses marked unavailable throw BackendUnavailable.
class ScriptedJudge : public JudgeBackend {
 public:
  ScriptedJudge(std::string id, std::map<std::string, ScriptedVerdict> by_test,
                std::optional<ScriptedVerdict> fallback = std::nullopt);
  // {"id": "...", "default": {...}, "by_test": {"<test id>": {"answer", "p", "bucket", "rationale"}}}
  static std::unique_ptr<ScriptedJudge> from_json(const nlohmann::json& j);

  std::string id() const override { return id_; }
  BinaryJudgment judge_binary(const CatchBundle& bundle) override;
  BucketJudgment judge_bucket(const CatchBundle& bundle) override;

 private:
  const ScriptedVerdict& lookup(const CatchBundle& bundle) const;
  std::string id_;
  std::map<std::string, ScriptedVerdict> by_test_;
  std::optional<ScriptedVerdict> fallback_;
};

// Rules of thumb over the child trace and the diff. `variant` shifts the
// bucket thresholds so ensemble members differ deterministically.
class HeuristicJudge : public JudgeBackend {
 public:
  explicit HeuristicJudge(int variant = 0) : variant_(variant) {}
  std::string id() const override { return "heuristic-" + std::to_string(variant_); }
  BinaryJudgment judge_binary(const CatchBundle& bundle) override;
  BucketJudgment judge_bucket(const CatchBundle& bundle) override;

 private:
  int variant_;
};

// Answers from corpus ground truth: a catch is a true positive when its
// case is buggy and the child trace calls the culprit function.
class GroundTruthJudge : public JudgeBackend {
 public:
  GroundTruthJudge(std::map<std::string, corpus::GroundTruth> truth, int variant = 0);
  std::string id() const override { return "ground-truth-" + std::to_string(variant_); }
  BinaryJudgment judge_binary(const CatchBundle& bundle) override;
  BucketJudgment judge_bucket(const CatchBundle& bundle) override;

  bool true_positive(const CatchBundle& bundle) const;

 private:
  std::map<std::string, corpus::GroundTruth> truth_;
  int variant_;
};

bool calls_function(const minilang::ExecutionTrace& trace, const std::string& function);

// Line-protocol judge: message kinds judge_binary and judge_bucket.
class ExternalJudge : public JudgeBackend {
 public:
  ExternalJudge(std::string id, std::string command, int timeout_ms);
  std::string id() const override { return id_; }
  BinaryJudgment judge_binary(const CatchBundle& bundle) override;
  BucketJudgment judge_bucket(const CatchBundle& bundle) override;

 private:
  std::string id_;
  generation::LineProtocolClient client_;
  std::atomic<int> next_id_{1};
};

nlohmann::json bundle_to_json(const CatchBundle& bundle);

// ---- scores --------------------------------------------------------------

// +(2p-1) for Yes, -(2p-1) for No.
double tp_prob_score(const BinaryJudgment& judgment);
// nullopt when the backend is unavailable.
std::optional<double> judge_tp_prob(const CatchBundle& bundle, JudgeBackend& backend);

// High 1, Medium 0, Low -1.
double bucket_score(Bucket b);
// Lower median for even counts. Throws std::invalid_argument when empty.
double lower_median(std::vector<double> values);

struct BucketResult {
  std::optional<double> bucket_med;  // nullopt when every judge failed
  std::vector<double> bucket_scores;
  std::vector<std::string> judge_ids;
  std::vector<std::string> rationales;
  std::vector<std::string> failures;
};
BucketResult judge_bucket_med(const CatchBundle& bundle, const std::vector<JudgeBackend*>& ensemble);

enum class ReviewDecision { AutoDiscard, HumanReview };
std::string_view to_string(ReviewDecision d);

struct FilterPolicy {
  double epsilon = 1e-9;
  double discard_bucket_value = 0.0;  // -1 selects the alternative reading
};

struct RankWeights {
  double rubfake = 0.4;
  double tp_prob = 0.3;
  double bucket_med = 0.3;
  double trivial_bonus = 0.1;
  double moderate_bonus = 0.0;
  double heavy_bonus = -0.1;
};

struct Assessment {
  std::string case_id;
  std::string test_id;
  RubfakeAssessment rubfake;
  std::optional<double> tp_prob;
  std::vector<double> bucket_scores;
  std::optional<double> bucket_med;
  std::vector<std::string> judge_ids;
  std::vector<std::string> rationales;
  std::vector<std::string> judge_failures;
  double final_rank_key = 0.0;
  ReviewDecision decision = ReviewDecision::HumanReview;
  std::string filter_clause;  // why AutoDiscard fired, empty otherwise
};

struct FilterResult {
  ReviewDecision decision = ReviewDecision::HumanReview;
  std::string clause;
};
// Missing scores fail open to HumanReview.
FilterResult review_filter(const Assessment& assessment, const FilterPolicy& policy = {});

double rank_key(const Assessment& assessment, const RankWeights& weights = {});
// Fills final_rank_key; descending, ties by case id then test id.
std::vector<Assessment> rank_catches(std::vector<Assessment> assessments, const RankWeights& weights = {});

struct AssessOptions {
  FilterPolicy filter;
  RankWeights weights;
};

// Rule engine, TP Prob from the first judge, Bucket Med over all judges,
// filter decision and rank key.
Assessment assess(const CatchBundle& bundle, const std::vector<PatternRule>& rules,
                  const std::vector<JudgeBackend*>& ensemble, const AssessOptions& options = {});

}  // namespace catchjit::assessors
