// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "../common/rule_fixtures.hpp"
#include "../common/stats_oracles.hpp"
#include "assessors/assessors.hpp"
#include "corpus/corpus.hpp"
#include "minilang/interpreter.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"
#include "stats/stats.hpp"
#include "workflows/workflows.hpp"

using namespace catchjit;
using nlohmann::json;

namespace {

// Tolerances pinned from the acceptance criteria.
constexpr double kMinAwareRatio = 2.0;
constexpr double kRuntimeRunSeconds = 60.0;
constexpr double kMinDiscardFraction = 0.5;
constexpr double kFisherTolerance = 1e-9;
constexpr double kCohenHTolerance = 1e-12;
constexpr double kAlphaTolerance = 1e-9;
constexpr int kPermutationIterations = 10000;
constexpr double kSignificantTarget = 0.05;
constexpr double kSignificantBand = 0.01;
constexpr double kLargeGroupProbGeM = 0.001;
constexpr double kSmallSampleFactor = 10.0;
constexpr double kPermutationSeconds = 120.0;
constexpr double kGoodBadAlpha = 0.05;
constexpr double kGoodBadMinH = 0.5;

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string seed_corpus() { return std::string(CATCHJIT_SOURCE_DIR) + "/corpus/seed"; }

pipeline::RunConfig seed_config(const std::string& judges) {
  auto c = pipeline::parse_config(json{{"judges", judges}});
  c.corpus = seed_corpus();
  c.parallelism = 1;
  return c;
}

const json& workflow_row(const json& report, const std::string& workflow) {
  for (const auto& row : report["summary"]["per_workflow"]) {
    if (row["workflow"] == workflow) return row;
  }
  throw std::runtime_error("no summary row for " + workflow);
}

void criterion1(const json& report, double seconds) {
  auto rate = [&](const char* w) { return workflow_row(report, w)["weak_catch_rate"].get<double>(); };
  auto per_diff = [&](const char* w) { return workflow_row(report, w)["per_diff_catch_rate"].get<double>(); };
  double cc = rate("CoincidentalCatch"), hnc = rate("HardenNoCoverage"), dd = rate("DodgyDiff"),
         ia = rate("IntentAware");
  double aware = report["summary"]["diff_aware_rate"], unaware = report["summary"]["diff_unaware_rate"];
  bool order = ia >= dd && dd >= hnc && hnc >= cc;
  bool ratio = aware >= kMinAwareRatio * unaware;
  bool coverage = per_diff("IntentAware") > per_diff("DodgyDiff");
  bool fast = seconds < kRuntimeRunSeconds;
  size_t cases = report["summary"]["cases_in_corpus"];
  verdict(1, "directional workflow rates", order && ratio && coverage && fast && cases >= 20,
          "cases=" + std::to_string(cases) + " IA=" + fmt(ia) + " DD=" + fmt(dd) + " HNC=" + fmt(hnc) + " CC=" + fmt(cc) +
             " aware/unaware=" + fmt(aware) + "/" + fmt(unaware) + "=" + fmt(aware / unaware) + "x (>= 2x)" +
             " per-diff IA=" + fmt(per_diff("IntentAware")) + " DD=" + fmt(per_diff("DodgyDiff")) +
             " runtime=" + fmt(seconds, 3) + "s (< 60s)");
}

void criterion2() {
  using minilang::ErrorKind;
  using minilang::OutcomeStatus;
  using workflows::CatchVerdict;
  struct S {
    const char* name;
    OutcomeStatus status;
    ErrorKind kind;
  };
  const S statuses[] = {{"Pass", OutcomeStatus::Pass, ErrorKind::None},
                        {"Fail", OutcomeStatus::Fail, ErrorKind::None},
                        {"Error(Exception)", OutcomeStatus::Error, ErrorKind::Exception},
                        {"Error(StepLimit)", OutcomeStatus::Error, ErrorKind::StepLimit}};
  auto expected = [](const S& p, const S& c) {
    if (p.status != OutcomeStatus::Pass) return CatchVerdict::Invalid;
    if (c.status == OutcomeStatus::Pass) return CatchVerdict::CoincidentalHarden;
    if (c.status == OutcomeStatus::Fail || c.kind == ErrorKind::Exception) return CatchVerdict::WeakCatch;
    return CatchVerdict::ErrorOutcome;
  };
  int ok = 0;
  std::string bad;
  for (const auto& p : statuses) {
    for (const auto& c : statuses) {
      minilang::TestOutcome po, co;
      po.status = p.status;
      po.error_kind = p.kind;
      co.status = c.status;
      co.error_kind = c.kind;
      if (workflows::classify(po, co) == expected(p, c)) {
        ++ok;
      } else {
        bad += std::string(" ") + p.name + "/" + c.name;
      }
    }
  }
  verdict(2, "classifier truth table", ok == 16, std::to_string(ok) + "/16 combinations" + bad);
}

void criterion3(const json& report) {
  auto cases = corpus::load_corpus(seed_corpus());
  std::map<std::string, const corpus::DiffCase*> by_id;
  for (const auto& c : cases) by_id[c.id] = &c;
  auto step_limit = pipeline::parse_config(report["config"]).budgets.step_limit;
  int total = 0, verified = 0, dodgy = 0;
  for (const auto& a : report["assessments"]) {
    auto it = by_id.find(a["case_id"].get<std::string>());
    if (it == by_id.end()) continue;
    minilang::TestCase t{a["id"], a["test_source"], {}, ""};
    auto p = minilang::execute(it->second->parent, t, step_limit);
    auto c = minilang::execute(it->second->child, t, step_limit);
    ++total;
    bool weak = workflows::classify(p, c) == workflows::CatchVerdict::WeakCatch;
    verified += p.passed() && !c.passed() && weak;
    for (const auto& w : a["workflows"]) dodgy += w == "DodgyDiff";
  }
  verdict(3, "weak catches re-verify", total > 0 && verified == total,
          std::to_string(verified) + "/" + std::to_string(total) + " re-executed catches pass on parent and fail on child (" +
             std::to_string(dodgy) + " from DodgyDiff)");
}

void criterion4() {
  using assessors::Bucket;
  bool mapping = assessors::bucket_score(Bucket::High) == 1.0 && assessors::bucket_score(Bucket::Medium) == 0.0 &&
                 assessors::bucket_score(Bucket::Low) == -1.0;
  const Bucket levels[] = {Bucket::Low, Bucket::Medium, Bucket::High};
  const double values[] = {-1.0, 0.0, 1.0};
  assessors::CatchBundle bundle;
  bundle.test = {"t", "assert_true(true);", {}, ""};
  int combos = 0, agree = 0;
  for (int n = 1; n <= 7; ++n) {
    int count = 1;
    for (int i = 0; i < n; ++i) count *= 3;
    for (int code = 0; code < count; ++code) {
      std::vector<std::unique_ptr<assessors::ScriptedJudge>> judges;
      std::vector<assessors::JudgeBackend*> ensemble;
      std::vector<double> oracle;
      for (int i = 0, c = code; i < n; ++i, c /= 3) {
        assessors::ScriptedVerdict v;
        v.bucket = levels[c % 3];
        judges.push_back(std::make_unique<assessors::ScriptedJudge>("j" + std::to_string(i),
                                                                    std::map<std::string, assessors::ScriptedVerdict>{}, v));
        ensemble.push_back(judges.back().get());
        oracle.push_back(values[c % 3]);
      }
      std::sort(oracle.begin(), oracle.end());
      auto med = assessors::judge_bucket_med(bundle, ensemble);
      ++combos;
      agree += med.bucket_med && *med.bucket_med == oracle[(oracle.size() - 1) / 2];
    }
  }
  bool triple = assessors::tp_prob_score({assessors::Answer::Yes, 1.0}) == 1.0 &&
                assessors::tp_prob_score({assessors::Answer::No, 1.0}) == -1.0 &&
                assessors::tp_prob_score({assessors::Answer::Yes, 0.5}) == 0.0;
  verdict(4, "assessor mappings", mapping && triple && agree == combos,
          std::string("bucket map ") + (mapping ? "ok" : "wrong") + ", median " + std::to_string(agree) + "/" +
             std::to_string(combos) + " ensembles (sizes 1-7) match the sort oracle, TP Prob triple " +
             (triple ? "ok" : "wrong"));
}

void criterion5(const json& report) {
  std::map<std::string, bool> buggy;
  for (const auto& c : report["cases"]) {
    buggy[c["id"]] = c.contains("ground_truth") && c["ground_truth"].is_object() && c["ground_truth"].value("buggy", false);
  }
  int weak = 0, weak_discarded = 0, real = 0, real_discarded = 0;
  for (const auto& a : report["assessments"]) {
    bool discarded = a["decision"] == "AutoDiscard";
    if (buggy[a["case_id"]] && a["culprit_reached"].get<bool>()) {
      ++real;
      real_discarded += discarded;
    } else {
      ++weak;
      weak_discarded += discarded;
    }
  }
  double fraction = weak ? static_cast<double>(weak_discarded) / weak : 0.0;
  verdict(5, "review filter safety", weak > 0 && fraction >= kMinDiscardFraction && real_discarded == 0,
          "discarded " + std::to_string(weak_discarded) + "/" + std::to_string(weak) + " strictly-weak (" +
             fmt(100 * fraction, 3) + "% >= 50%), " + std::to_string(real_discarded) + "/" + std::to_string(real) +
             " true-bug catches discarded (must be 0)");
}

void criterion6() {
  auto fixtures = rulefix::rule_fixtures(CATCHJIT_FIXTURE);
  std::set<std::string> fires, silent;
  std::string bad;
  for (const auto& f : fixtures) {
    const assessors::PatternRule* rule = nullptr;
    for (const auto& r : assessors::default_rules()) {
      if (r.id == f.rule) rule = &r;
    }
    if (!rule) {
      bad += " unknown:" + f.rule;
      continue;
    }
    auto fired = assessors::evaluate_rule(f.fires, *rule);
    auto single = assessors::rubfake_assess(f.fires, {*rule});
    if (fired && !fired->evidence.empty() && assessors::evidence_sound(f.fires, single) && !single.fired.empty()) {
      fires.insert(f.rule);
    } else {
      bad += " nofire:" + f.rule;
    }
    if (!assessors::evaluate_rule(f.silent, *rule)) {
      silent.insert(f.rule);
    } else {
      bad += " silent-fired:" + f.rule;
    }
  }
  int fp = 0, tp = 0, fp_ok = 0, tp_ok = 0;
  for (const auto& r : assessors::default_rules()) {
    bool ok = fires.count(r.id) && silent.count(r.id);
    (r.polarity == assessors::Polarity::FP ? fp : tp)++;
    (r.polarity == assessors::Polarity::FP ? fp_ok : tp_ok) += ok;
  }
  verdict(6, "rule engine completeness", fp == 14 && tp == 9 && fp_ok == 14 && tp_ok == 9,
          "FP " + std::to_string(fp_ok) + "/14, TP " + std::to_string(tp_ok) + "/9 with firing evidence and a silent fixture" +
             bad);
}

void criterion7() {
  using namespace stats;
  double worst_fisher = 0;
  int tables = 0;
  for (int n = 0; n <= 40; ++n) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; a + b <= n; ++b) {
        for (int c = 0; a + b + c <= n; ++c) {
          ContingencyTable2x2 t{a, b, c, n - a - b - c};
          worst_fisher = std::max(worst_fisher, std::abs(fisher_exact_two_sided(t).p - oracles::fisher_oracle(t)));
          ++tables;
        }
      }
    }
  }
  std::mt19937_64 rng(7);
  int pair_checks = 0, pair_ok = 0;
  for (size_t n = 2; n <= 50; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      std::uniform_int_distribution<int> level(0, 2 + rep);
      std::vector<double> xs(n), ys(n), zs(n + rep);
      for (auto& x : xs) x = level(rng);
      for (auto& y : ys) y = level(rng);
      for (auto& z : zs) z = level(rng);
      auto cp = oracles::cross_pairs(xs, zs);
      double delta_oracle = static_cast<double>(cp.gt - cp.lt) / static_cast<double>(xs.size() * zs.size());
      ++pair_checks;
      pair_ok += cliffs_delta(xs, zs) == delta_oracle;
      auto tau = kendall_tau_b(xs, ys);
      if (tau.coefficient) {
        ++pair_checks;
        pair_ok += *tau.coefficient == oracles::tau_b_oracle(xs, ys);
      }
    }
  }
  double h_err = std::max(std::abs(cohens_h(0.75, 0.25) - std::numbers::pi / 3),
                          std::abs(cohens_h(1.0, 0.0) - std::numbers::pi));
  for (double p1 = 0.0; p1 <= 1.0; p1 += 0.125) {
    for (double p2 = 0.0; p2 <= 1.0; p2 += 0.125) {
      h_err = std::max(h_err, std::abs(cohens_h(p1, p2) - (2 * std::asin(std::sqrt(p1)) - 2 * std::asin(std::sqrt(p2)))));
    }
  }
  using Row = std::vector<std::optional<std::string>>;
  // Coincidence-matrix hand calculation gives alpha = 2/7.
  RatingMatrix hand{Row{"TP", "TP", "TP"}, Row{"TP", "FP", "FP"}, Row{"FP", "FP", std::nullopt},
                    Row{"TP", "None", "FP"}};
  auto alpha = krippendorff_alpha(hand);
  double alpha_err = alpha.value ? std::abs(*alpha.value - 2.0 / 7.0) : 1.0;
  bool ok = worst_fisher <= kFisherTolerance && pair_ok == pair_checks && h_err <= kCohenHTolerance &&
            alpha_err <= kAlphaTolerance;
  verdict(7, "statistics oracle suite", ok,
          "Fisher max err " + fmt(worst_fisher, 3) + " over " + std::to_string(tables) + " tables (<= 1e-9), Cliff/tau-b " +
             std::to_string(pair_ok) + "/" + std::to_string(pair_checks) + " exact, Cohen h err " + fmt(h_err, 3) +
             " (<= 1e-12), Krippendorff err " + fmt(alpha_err, 3) + " (<= 1e-9)");
}

void criterion8() {
  using namespace stats;
  std::mt19937_64 rng(20240401);
  std::uniform_real_distribution<double> score(-1.0, 1.0);
  std::vector<double> pool(5000);
  for (auto& x : pool) x = score(rng);
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (auto polarity : {Polarity::TP, Polarity::FP}) {
    PermutationConfig large;
    large.iterations = kPermutationIterations;
    large.min_group = 205;
    large.max_group = 232;
    large.seed = 1;
    large.polarity = polarity;
    auto big = permutation_sense_check(pool, large);
    PermutationConfig small = large;
    small.min_group = 6;
    small.max_group = 48;
    auto tiny = permutation_sense_check(pool, small);
    double floor = std::max(big.prob_ge_m(), 1.0 / kPermutationIterations);
    bool band = std::abs(big.prob_ge_n() - kSignificantTarget) <= kSignificantBand;
    bool quiet = big.prob_ge_m() < kLargeGroupProbGeM;
    bool small_higher = tiny.prob_ge_m() >= kSmallSampleFactor * floor;
    ok = ok && band && quiet && small_higher;
    detail += std::string(to_string(polarity)) + ": significant " + fmt(big.prob_ge_n()) + " (0.05+-0.01), Prob>=M " +
              fmt(big.prob_ge_m()) + " (< 0.001), small-sample Prob>=M " + fmt(tiny.prob_ge_m()) + " (>= " +
              fmt(kSmallSampleFactor * floor) + "); ";
  }
  double seconds = seconds_since(t0);
  ok = ok && seconds < kPermutationSeconds;
  verdict(8, "permutation sense check", ok, detail + "runtime " + fmt(seconds, 3) + "s (< 120s)");
}

void criterion9(const json& report) {
  const json* cell = nullptr;
  for (const auto& c : report["stats"]["good_bad"]["tp"]) {
    if (c["workflow"] == "DodgyDiff" && c["assessor"] == "TP Prob") cell = &c;
  }
  if (!cell || !(*cell)["available"].get<bool>()) {
    verdict(9, "good/bad discrimination", false, "DodgyDiff TP Prob cell unavailable");
    return;
  }
  double p = (*cell)["p"], h = (*cell)["effect"];
  std::string dir = (*cell)["direction"];
  verdict(9, "good/bad discrimination", p < kGoodBadAlpha && std::abs(h) >= kGoodBadMinH && dir == "B",
          "DodgyDiff TP Prob rate G=" + fmt((*cell)["rate1"].get<double>()) + " (n=" + std::to_string((*cell)["n1"].get<int>()) +
             ") B=" + fmt((*cell)["rate2"].get<double>()) + " (n=" + std::to_string((*cell)["n2"].get<int>()) +
             "), Fisher p=" + fmt(p, 3) + " (< 0.05), |h|=" + fmt(std::abs(h)) + " (>= 0.5), higher=" + dir);
}

void criterion10(const json& first) {
  auto second = pipeline::run_pipeline(seed_config("heuristic"));
  auto a = pipeline::canonical_report_text(first), b = pipeline::canonical_report_text(second);
  auto stripped_a = first, stripped_b = second;
  stripped_a.erase("generated_at");
  stripped_b.erase("generated_at");
  bool ok = a == b && stripped_a.dump() == stripped_b.dump();
  verdict(10, "reproducibility", ok,
          std::string(ok ? "identical" : "different") + " reports modulo timestamp (" + std::to_string(a.size()) + " bytes)");
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  json heuristic, ground_truth;
  double seconds = 0;
  guarded(1, "directional workflow rates", [&] {
    auto t0 = std::chrono::steady_clock::now();
    heuristic = pipeline::run_pipeline(seed_config("heuristic"));
    seconds = seconds_since(t0);
    criterion1(heuristic, seconds);
  });
  guarded(2, "classifier truth table", criterion2);
  guarded(3, "weak catches re-verify", [&] { criterion3(heuristic); });
  guarded(4, "assessor mappings", criterion4);
  guarded(5, "review filter safety", [&] {
    ground_truth = pipeline::run_pipeline(seed_config("ground_truth"));
    criterion5(ground_truth);
  });
  guarded(6, "rule engine completeness", criterion6);
  guarded(7, "statistics oracle suite", criterion7);
  guarded(8, "permutation sense check", criterion8);
  guarded(9, "good/bad discrimination", [&] { criterion9(ground_truth); });
  guarded(10, "reproducibility", [&] { criterion10(heuristic); });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
