#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"
#include "generation/generation.hpp"
#include "minilang/trace.hpp"
#include "mutation/mutation.hpp"

namespace catchjit::workflows {

using generation::IntentDescription;
using minilang::TestCase;
using minilang::TestOutcome;
using mutation::Risk;

enum class CatchVerdict { WeakCatch, CoincidentalHarden, Invalid, ErrorOutcome };

std::string_view to_string(CatchVerdict verdict);
std::optional<CatchVerdict> parse_verdict(std::string_view text);

// Parent not Pass -> Invalid. Otherwise by child: Pass -> CoincidentalHarden,
// Fail or Error(Exception) -> WeakCatch, other errors -> ErrorOutcome.
CatchVerdict classify(const TestOutcome& parent_outcome, const TestOutcome& child_outcome);

struct Budgets {
  int tests_per_case = 20;
  int mutants_per_case = mutation::kDefaultMutantBudget;
  int mutants_per_risk = mutation::kDefaultMutantsPerRisk;
  int risks_per_case = 10;
  int tests_per_mutant = 6;
  int harden_mutation_cap = 20;
  int harden_tests_per_mutant = 1;
  std::int64_t step_limit = minilang::kDefaultStepLimit;
};

struct CandidateTest {
  TestCase test;
  TestOutcome parent_outcome;
  TestOutcome child_outcome;
  CatchVerdict verdict = CatchVerdict::Invalid;
};

struct MutantRecord {
  std::string id;
  std::string operator_id;
  std::string file;
  std::string function;
  int node_id = 0;
  std::string description;
  std::optional<std::string> risk_id;
  int killing_tests = 0;
};

struct WorkflowResult {
  WorkflowTag workflow = WorkflowTag::DodgyDiff;
  std::string case_id;
  std::vector<CandidateTest> tests;
  std::vector<MutantRecord> mutants;
  std::vector<Risk> risks;
  std::optional<IntentDescription> intent;
  std::vector<std::string> notices;  // backend fallbacks, unmaterializable risks
  int dropped_proposals = 0;
  bool backend_fallback = false;

  int weak_catches() const;
};

struct RunContext {
  generation::GeneratorBackend& backend;
  generation::GeneratorBackend* fallback = nullptr;  // nullptr: backend failures propagate
  Budgets budgets;
};

// Functions the child-as-mutant view targets: Modified and Removed decls
// plus their direct callers; every parent function when none apply.
std::vector<std::string> dodgy_diff_entries(const corpus::DiffCase& diff_case, const corpus::Diff& diff);

WorkflowResult run_dodgy_diff(const corpus::DiffCase& diff_case, RunContext& ctx);

// Backend intent if it offers one, else the canonical template built from
// title, summary and changed declarations.
IntentDescription infer_intent(const corpus::DiffCase& diff_case, generation::GeneratorBackend& backend);
IntentDescription default_intent(const corpus::DiffCase& diff_case, const corpus::Diff& diff);

// Heuristic over tree differences of Modified functions, unless the backend
// supplies risks. Sorted by (category, location), at most `cap`.
std::vector<Risk> enumerate_risks(const IntentDescription& intent, const corpus::DiffCase& diff_case,
                                  const corpus::Diff& diff, generation::GeneratorBackend& backend, int cap);
std::vector<Risk> heuristic_risks(const corpus::DiffCase& diff_case, const corpus::Diff& diff, int cap);

WorkflowResult run_intent_aware(const corpus::DiffCase& diff_case, RunContext& ctx);

struct HardenResults {
  WorkflowResult no_coverage;       // variant A
  WorkflowResult mutation_guided;   // variant B
};

// Diff-unaware: generation reads only the parent.
HardenResults run_harden_baselines(const corpus::DiffCase& diff_case, RunContext& ctx);

// Variant A tests that fail on the child and re-verify as passing on the
// parent, over all variant A and B tests.
struct CoincidentalCatchView {
  std::vector<CandidateTest> catches;
  int tests_considered = 0;
};
CoincidentalCatchView coincidental_catch_view(const HardenResults& harden, const corpus::DiffCase& diff_case,
                                              std::int64_t step_limit = minilang::kDefaultStepLimit);

// Shape used to deduplicate hardening tests: entry plus canonical assertion text.
std::string test_shape(const TestCase& test);
std::vector<TestCase> harvest_hardening(const std::vector<WorkflowResult>& results);

}  // namespace catchjit::workflows
