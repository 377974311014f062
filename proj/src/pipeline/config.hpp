#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "assessors/assessors.hpp"
#include "minilang/trace.hpp"
#include "workflows/workflows.hpp"

namespace catchjit::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendSpec {
  std::string kind = "template";  // template | scripted | external | heuristic | ground_truth
  std::string argument;           // fixture path or command

  std::string text() const { return argument.empty() ? kind : kind + ":" + argument; }
};

struct ExternalCase {
  std::string id;
  std::string title;
  std::string summary;
  corpus::DiffStatus status = corpus::DiffStatus::UNLABELLED;
  std::string test_id;
  std::string test_source;
  std::string parent_cmd;
  std::string child_cmd;
  std::string diff;  // unified text, optional
};

struct PermutationSettings {
  std::int64_t iterations = 1000;
  int min_group = 6;
  int max_group = 48;
};

struct RunConfig {
  std::string corpus;
  std::vector<WorkflowTag> workflows;
  workflows::Budgets budgets;
  BackendSpec backend;
  bool backend_fallback = true;
  BackendSpec judges{"heuristic", ""};
  int ensemble_size = 3;
  assessors::RankWeights rank_weights;
  assessors::FilterPolicy filter_policy;
  double risk_threshold = 0.0;
  std::uint64_t seed = 1;
  int parallelism = 1;
  std::string rules;  // empty: built-in rules
  int timeout_ms = 10000;
  PermutationSettings permutation;
  std::vector<ExternalCase> external_cases;
};

inline constexpr WorkflowTag kAllWorkflows[] = {
    WorkflowTag::CoincidentalCatch, WorkflowTag::HardenNoCoverage, WorkflowTag::HardenMutationGuided,
    WorkflowTag::DodgyDiff,         WorkflowTag::IntentAware,
};

// Unknown keys and out-of-range values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& config);
// CATCHJIT_SEED, when set, replaces the seed. Throws ConfigError when malformed.
void apply_environment(RunConfig& config);
BackendSpec parse_backend(const std::string& text, bool judge);

}  // namespace catchjit::pipeline
