#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"
#include "generation/line_protocol.hpp"
#include "minilang/interpreter.hpp"
#include "minilang/trace.hpp"
#include "mutation/mutation.hpp"

namespace catchjit::generation {

using minilang::ArgTuple;
using minilang::ProgramSet;
using minilang::TestCase;
using minilang::TestOutcome;
using minilang::Value;

struct IntentDescription {
  std::string text;
  std::string title;
  std::string summary;
  std::vector<corpus::ChangedDecl> changed_decls;
};

struct GenerationContext {
  ProgramSet target_programs;
  std::vector<std::string> entry_points;
  // Argument tuples per entry point. Entries without seeds get derived ones.
  std::map<std::string, std::vector<ArgTuple>> input_seeds;
  std::optional<mutation::Mutant> mutant;
  std::optional<IntentDescription> intent;
  std::vector<mutation::Risk> risks;
  WorkflowTag workflow = WorkflowTag::HardenNoCoverage;
  std::string id_prefix = "t";
  std::int64_t step_limit = minilang::kDefaultStepLimit;
};

// ---- input seeds -------------------------------------------------------

enum class ParamType { Int, Bool, Text, List, Map };
std::string_view to_string(ParamType type);

// Usage-based guess per parameter of `function`; Int when nothing is known.
std::vector<ParamType> infer_param_types(const ProgramSet& programs, const std::string& function);

struct Harvest {
  std::vector<std::int64_t> ints;
  std::vector<std::string> texts;
  std::vector<std::string> keys;
};

// Literals appearing in the programs (all functions, or one function).
Harvest harvest_constants(const ProgramSet& programs, const std::string& only_function = "");

// Value grid per type: ints {-1,0,1,2} plus harvested, booleans, "" and "x"
// plus harvested text, [] and [1], {} and a map over harvested keys.
std::vector<Value> seed_values(ParamType type, const Harvest& harvest);

// Tuples from a truncated mixed-radix product, ordered by increasing
// maximum digit so every value appears early.
std::vector<ArgTuple> seed_tuples(const std::vector<std::vector<Value>>& per_param, size_t cap);

inline constexpr size_t kSeedTupleCap = 24;

std::vector<ArgTuple> default_seeds(const ProgramSet& programs, const std::string& entry,
                                    size_t cap = kSeedTupleCap);

// Seeds aimed at a mutant: defaults plus c-1, c, c+1 for the constants of
// the mutated function and longer containers.
std::vector<ArgTuple> mutant_seeds(const ProgramSet& programs, const std::string& entry,
                                   const mutation::Mutant& mutant, size_t cap = kSeedTupleCap);

// ---- tests ---------------------------------------------------------------

// Source asserting `observation` for `entry`: assert_eq on the value or on
// catch_kind for an exception. Empty when the call hit the step limit.
std::string observation_test_source(const std::string& entry, const minilang::Observation& observation);

// Functions calling `function` directly.
std::vector<std::string> callers_of(const ProgramSet& programs, const std::string& function);

// Entry function targeted by a test's first assertion, or empty.
std::string assertion_entry(const std::string& source);

// (entry, input) pairs round-robin across entries; each test asserts the
// parent-observed output and is re-executed on the parent before emission.
std::vector<TestCase> generate_observation_tests(const ProgramSet& parent, const std::vector<std::string>& entry_points,
                                                 const std::map<std::string, std::vector<ArgTuple>>& input_seeds,
                                                 int budget, std::int64_t step_limit = minilang::kDefaultStepLimit);

struct KilledTest {
  TestCase test;
  TestOutcome on_mutant;  // kill evidence
};

// Tests that Fail or Error on the mutant. Provenance gets the mutant id.
std::vector<KilledTest> mutation_guided_filter(const std::vector<TestCase>& tests, const ProgramSet& parent,
                                               const mutation::Mutant& mutant,
                                               std::int64_t step_limit = minilang::kDefaultStepLimit);

// ---- backends ------------------------------------------------------------

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> propose_tests(const GenerationContext& context, int budget) = 0;
  // Intent and risk inference seams. nullopt means "use the default".
  virtual std::optional<std::string> infer_intent(const corpus::DiffCase&, const corpus::Diff&) { return std::nullopt; }
  virtual std::optional<std::vector<mutation::Risk>> enumerate_risks(const IntentDescription&, const corpus::Diff&,
                                                                     int /*cap*/) {
    return std::nullopt;
  }
};

// Deterministic observation-based generator. Stateless.
class TemplateGenerator : public GeneratorBackend {
 public:
  std::string name() const override { return "template"; }
  std::vector<std::string> propose_tests(const GenerationContext& context, int budget) override;
};

// Replays canned outputs. Stateless: every call returns the same lists.
class ScriptedMock : public GeneratorBackend {
 public:
  ScriptedMock(std::vector<std::string> tests, std::optional<std::string> intent = std::nullopt,
               std::optional<std::vector<mutation::Risk>> risks = std::nullopt);
  // Fixture file: {"tests": [...], "intent": "...", "risks": [...]}.
  static std::unique_ptr<ScriptedMock> from_file(const std::string& path);

  std::string name() const override { return "scripted"; }
  std::vector<std::string> propose_tests(const GenerationContext& context, int budget) override;
  std::optional<std::string> infer_intent(const corpus::DiffCase&, const corpus::Diff&) override { return intent_; }
  std::optional<std::vector<mutation::Risk>> enumerate_risks(const IntentDescription&, const corpus::Diff&,
                                                             int cap) override;

 private:
  std::vector<std::string> tests_;
  std::optional<std::string> intent_;
  std::optional<std::vector<mutation::Risk>> risks_;
};

// Line-protocol client (see docs/protocol.md). Throws BackendUnavailable.
class ExternalBackend : public GeneratorBackend {
 public:
  ExternalBackend(std::string command, int timeout_ms);
  std::string name() const override { return "external"; }
  std::vector<std::string> propose_tests(const GenerationContext& context, int budget) override;
  std::optional<std::string> infer_intent(const corpus::DiffCase& diff_case, const corpus::Diff& diff) override;
  std::optional<std::vector<mutation::Risk>> enumerate_risks(const IntentDescription& intent, const corpus::Diff& diff,
                                                             int cap) override;

 private:
  LineProtocolClient client_;
  std::atomic<int> next_id_{1};
};

nlohmann::json to_json(const GenerationContext& context);
nlohmann::json risk_to_json(const mutation::Risk& risk);
mutation::Risk risk_from_json(const nlohmann::json& j);

struct GenerationResult {
  std::vector<TestCase> tests;
  int dropped = 0;  // unparseable or assertion-free proposals
  bool fallback_used = false;
  std::string notice;
};

// Parses proposals, drops and counts the invalid ones, keeps at most
// `budget`. With a fallback, BackendUnavailable switches to `fallback` and
// is recorded; without one it propagates.
GenerationResult generate_via_backend(GeneratorBackend& backend, const GenerationContext& context, int budget,
                                      GeneratorBackend* fallback = nullptr);

}  // namespace catchjit::generation
