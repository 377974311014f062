#include <algorithm>
#include <cmath>
#include <set>

#include "assessors/assessors.hpp"

namespace catchjit::assessors {

using generation::BackendUnavailable;
using nlohmann::json;

std::string_view to_string(Answer a) { return a == Answer::Yes ? "Yes" : "No"; }

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::High: return "High";
    case Bucket::Medium: return "Medium";
    case Bucket::Low: return "Low";
  }
  return "?";
}

std::optional<Bucket> parse_bucket(std::string_view text) {
  for (auto b : {Bucket::High, Bucket::Medium, Bucket::Low}) {
    if (to_string(b) == text) return b;
  }
  return std::nullopt;
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ScriptedVerdict verdict_from_json(const json& j) {
  ScriptedVerdict v;
  auto answer = j.value("answer", std::string("No"));
  if (answer != "Yes" && answer != "No") throw std::invalid_argument("answer must be Yes or No");
  v.answer = answer == "Yes" ? Answer::Yes : Answer::No;
  v.p = j.value("p", 1.0);
  if (!(v.p > 0.0 && v.p <= 1.0)) throw std::invalid_argument("p must be in (0, 1]");
  auto bucket = parse_bucket(j.value("bucket", std::string("Medium")));
  if (!bucket) throw std::invalid_argument("bucket must be High, Medium or Low");
  v.bucket = *bucket;
  v.rationale = j.value("rationale", std::string());
  return v;
}

const std::set<std::string> kImplicitOracleKinds = {"div_zero",        "null_access", "overflow",
                                                    "key_out_of_bounds", "empty_container", "stack_overflow"};

Bucket shift(Bucket b, int variant) {
  if (b != Bucket::Medium) return b;
  switch (variant % 3) {
    case 1: return Bucket::Low;
    case 2: return Bucket::High;
    default: return b;
  }
}

enum class Signal { Crash, ChangedPath, Other };

Signal heuristic_signal(const CatchBundle& bundle) {
  const auto* t = bundle.child_outcome.trace.terminal();
  if (t && t->kind == minilang::TraceEventKind::Exception && kImplicitOracleKinds.count(t->exception_kind)) {
    return Signal::Crash;
  }
  if (t && t->kind == minilang::TraceEventKind::AssertFail) {
    for (const auto& d : bundle.diff.changed_decls) {
      if (d.kind != corpus::ChangeKind::Added && calls_function(bundle.child_outcome.trace, d.function)) {
        return Signal::ChangedPath;
      }
    }
  }
  return Signal::Other;
}

}  // namespace

// ---- ScriptedJudge ---------------------------------------------------------

ScriptedJudge::ScriptedJudge(std::string id, std::map<std::string, ScriptedVerdict> by_test,
                             std::optional<ScriptedVerdict> fallback)
    : id_(std::move(id)), by_test_(std::move(by_test)), fallback_(std::move(fallback)) {}

std::unique_ptr<ScriptedJudge> ScriptedJudge::from_json(const json& j) {
  std::map<std::string, ScriptedVerdict> by_test;
  if (j.contains("by_test")) {
    for (const auto& [k, v] : j["by_test"].items()) by_test[k] = verdict_from_json(v);
  }
  std::optional<ScriptedVerdict> fallback;
  if (j.contains("default")) fallback = verdict_from_json(j["default"]);
  return std::make_unique<ScriptedJudge>(j.value("id", std::string("scripted")), std::move(by_test), fallback);
}

const ScriptedVerdict& ScriptedJudge::lookup(const CatchBundle& bundle) const {
  auto it = by_test_.find(bundle.test.id);
  if (it != by_test_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw BackendUnavailable("scripted judge '" + id_ + "' has no verdict for " + bundle.test.id);
}

BinaryJudgment ScriptedJudge::judge_binary(const CatchBundle& bundle) {
  const auto& v = lookup(bundle);
  return {v.answer, v.p};
}

BucketJudgment ScriptedJudge::judge_bucket(const CatchBundle& bundle) {
  const auto& v = lookup(bundle);
  return {v.bucket, v.rationale};
}

// ---- HeuristicJudge --------------------------------------------------------

BinaryJudgment HeuristicJudge::judge_binary(const CatchBundle& bundle) {
  switch (heuristic_signal(bundle)) {
    case Signal::Crash: return {Answer::Yes, 0.8};
    case Signal::ChangedPath: return {Answer::Yes, 0.6};
    case Signal::Other: return {Answer::No, 0.8};
  }
  return {Answer::No, 0.5};
}

BucketJudgment HeuristicJudge::judge_bucket(const CatchBundle& bundle) {
  switch (heuristic_signal(bundle)) {
    case Signal::Crash: {
      const auto* t = bundle.child_outcome.trace.terminal();
      return {Bucket::High, "child raises " + t->exception_kind + " on an input the parent handled"};
    }
    case Signal::ChangedPath:
      return {shift(Bucket::Medium, variant_), "assertion on a path through changed code now fails"};
    case Signal::Other:
      return {Bucket::Low, "failure does not point at changed behavior"};
  }
  return {Bucket::Medium, ""};
}

// ---- GroundTruthJudge ------------------------------------------------------

GroundTruthJudge::GroundTruthJudge(std::map<std::string, corpus::GroundTruth> truth, int variant)
    : truth_(std::move(truth)), variant_(variant) {}

bool calls_function(const minilang::ExecutionTrace& trace, const std::string& function) {
  return std::any_of(trace.events.begin(), trace.events.end(), [&](const minilang::TraceEvent& e) {
    return e.kind == minilang::TraceEventKind::Call && e.name == function;
  });
}

bool GroundTruthJudge::true_positive(const CatchBundle& bundle) const {
  auto it = truth_.find(bundle.case_ref);
  if (it == truth_.end() || !it->second.buggy) return false;
  return calls_function(bundle.child_outcome.trace, it->second.culprit);
}

// False positives split by test-id hash: two quarters are outright No, one
// quarter answers Yes weakly with a Medium median, one quarter stays
// ambiguous so it reaches human review.
BinaryJudgment GroundTruthJudge::judge_binary(const CatchBundle& bundle) {
  auto h = fnv1a(bundle.test.id);
  if (true_positive(bundle)) return {Answer::Yes, 0.85 + 0.15 * static_cast<double>(h % 101) / 100.0};
  switch (h % 4) {
    case 2: return {Answer::Yes, 0.6};
    case 3: return {Answer::No, 0.8};
    default: return {Answer::No, 1.0};
  }
}

BucketJudgment GroundTruthJudge::judge_bucket(const CatchBundle& bundle) {
  if (true_positive(bundle)) return {Bucket::High, "failure exercises the seeded defect"};
  switch (fnv1a(bundle.test.id) % 4) {
    case 2: return {variant_ % 3 == 2 ? Bucket::High : Bucket::Medium, "behavior change may be intended"};
    case 3: return {variant_ % 3 == 1 ? Bucket::Medium : Bucket::Low, "failure looks intended by the change"};
    default: return {Bucket::Low, "failure follows the intended change"};
  }
}

// ---- ExternalJudge ---------------------------------------------------------

json bundle_to_json(const CatchBundle& bundle) {
  return {{"case", bundle.case_ref},
          {"test", {{"id", bundle.test.id}, {"source", bundle.test.source}, {"entry", bundle.test.entry}}},
          {"parent_outcome", bundle.parent_outcome.label()},
          {"child_outcome", bundle.child_outcome.label()},
          {"execution_log", minilang::render_trace(bundle.child_outcome.trace)},
          {"diff", bundle.diff.render()},
          {"intent", bundle.intent.text}};
}

ExternalJudge::ExternalJudge(std::string id, std::string command, int timeout_ms)
    : id_(std::move(id)), client_(std::move(command), timeout_ms) {}

BinaryJudgment ExternalJudge::judge_binary(const CatchBundle& bundle) {
  auto reply = client_.request({{"kind", "judge_binary"}, {"id", next_id_++}, {"judge", id_},
                                {"bundle", bundle_to_json(bundle)}});
  auto answer = reply.value("answer", std::string());
  if (answer != "Yes" && answer != "No") throw BackendUnavailable("judge_binary reply lacks answer Yes/No");
  double p;
  if (reply.contains("logprob") && reply["logprob"].is_number()) {
    p = std::exp(reply["logprob"].get<double>());
  } else if (reply.contains("p") && reply["p"].is_number()) {
    p = reply["p"].get<double>();
  } else {
    throw BackendUnavailable("judge_binary reply lacks p or logprob");
  }
  if (!(p > 0.0 && p <= 1.0 + 1e-12)) throw BackendUnavailable("judge_binary probability outside (0, 1]");
  return {answer == "Yes" ? Answer::Yes : Answer::No, std::min(p, 1.0)};
}

BucketJudgment ExternalJudge::judge_bucket(const CatchBundle& bundle) {
  auto reply = client_.request({{"kind", "judge_bucket"}, {"id", next_id_++}, {"judge", id_},
                                {"bundle", bundle_to_json(bundle)}});
  auto category = parse_bucket(reply.value("category", std::string()));
  if (!category) throw BackendUnavailable("judge_bucket reply lacks category High/Medium/Low");
  return {*category, reply.value("rationale", std::string())};
}

// ---- scores ----------------------------------------------------------------

double tp_prob_score(const BinaryJudgment& judgment) {
  double s = 2.0 * judgment.token_probability - 1.0;
  return judgment.answer == Answer::Yes ? s : -s;
}

std::optional<double> judge_tp_prob(const CatchBundle& bundle, JudgeBackend& backend) {
  try {
    return tp_prob_score(backend.judge_binary(bundle));
  } catch (const BackendUnavailable&) {
    return std::nullopt;
  }
}

double bucket_score(Bucket b) {
  switch (b) {
    case Bucket::High: return 1.0;
    case Bucket::Medium: return 0.0;
    case Bucket::Low: return -1.0;
  }
  return 0.0;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

BucketResult judge_bucket_med(const CatchBundle& bundle, const std::vector<JudgeBackend*>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("judge ensemble is empty");
  BucketResult out;
  for (auto* judge : ensemble) {
    try {
      auto j = judge->judge_bucket(bundle);
      out.bucket_scores.push_back(bucket_score(j.category));
      out.judge_ids.push_back(judge->id());
      out.rationales.push_back(j.rationale);
    } catch (const BackendUnavailable& e) {
      out.failures.push_back(judge->id() + ": " + e.what());
    }
  }
  if (!out.bucket_scores.empty()) out.bucket_med = lower_median(out.bucket_scores);
  return out;
}

std::string_view to_string(ReviewDecision d) {
  return d == ReviewDecision::AutoDiscard ? "AutoDiscard" : "HumanReview";
}

FilterResult review_filter(const Assessment& a, const FilterPolicy& policy) {
  if (!a.tp_prob || !a.bucket_med) return {ReviewDecision::HumanReview, ""};
  if (*a.tp_prob <= -1.0 + policy.epsilon) return {ReviewDecision::AutoDiscard, "tp_prob = -1"};
  if (*a.bucket_med == policy.discard_bucket_value) {
    return {ReviewDecision::AutoDiscard,
            policy.discard_bucket_value == 0.0 ? "bucket_med = 0" : "bucket_med = -1"};
  }
  return {ReviewDecision::HumanReview, ""};
}

double rank_key(const Assessment& a, const RankWeights& w) {
  double bonus = w.moderate_bonus;
  if (a.rubfake.dismissal_cost == DismissalCost::Trivial) bonus = w.trivial_bonus;
  if (a.rubfake.dismissal_cost == DismissalCost::Heavy) bonus = w.heavy_bonus;
  double key = w.rubfake * a.rubfake.score + w.tp_prob * a.tp_prob.value_or(0.0) +
               w.bucket_med * a.bucket_med.value_or(0.0) + bonus;
  return std::clamp(key, -1.0, 1.0);
}

std::vector<Assessment> rank_catches(std::vector<Assessment> assessments, const RankWeights& weights) {
  for (auto& a : assessments) a.final_rank_key = rank_key(a, weights);
  std::stable_sort(assessments.begin(), assessments.end(), [](const Assessment& x, const Assessment& y) {
    if (x.final_rank_key != y.final_rank_key) return x.final_rank_key > y.final_rank_key;
    if (x.case_id != y.case_id) return x.case_id < y.case_id;
    return x.test_id < y.test_id;
  });
  return assessments;
}

Assessment assess(const CatchBundle& bundle, const std::vector<PatternRule>& rules,
                  const std::vector<JudgeBackend*>& ensemble, const AssessOptions& options) {
  Assessment a;
  a.case_id = bundle.case_ref;
  a.test_id = bundle.test.id;
  a.rubfake = rubfake_assess(bundle, rules);
  if (!ensemble.empty()) {
    a.tp_prob = judge_tp_prob(bundle, *ensemble.front());
    if (!a.tp_prob) a.judge_failures.push_back(ensemble.front()->id() + ": judge_binary unavailable");
    auto b = judge_bucket_med(bundle, ensemble);
    a.bucket_scores = std::move(b.bucket_scores);
    a.bucket_med = b.bucket_med;
    a.judge_ids = std::move(b.judge_ids);
    a.rationales = std::move(b.rationales);
    a.judge_failures.insert(a.judge_failures.end(), b.failures.begin(), b.failures.end());
  }
  auto f = review_filter(a, options.filter);
  a.decision = f.decision;
  a.filter_clause = f.clause;
  a.final_rank_key = rank_key(a, options.weights);
  return a;
}

}  // namespace catchjit::assessors
