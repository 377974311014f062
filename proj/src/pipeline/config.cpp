#include "pipeline/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>

namespace catchjit::pipeline {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

int positive(const json& j, const char* key, int fallback, const std::string& where) {
  int v = get<int>(j, key, fallback, where);
  if (v <= 0) throw ConfigError("'" + std::string(key) + "' in " + where + " must be positive");
  return v;
}

}  // namespace

BackendSpec parse_backend(const std::string& text, bool judge) {
  auto colon = text.find(':');
  BackendSpec spec{text.substr(0, colon), colon == std::string::npos ? "" : text.substr(colon + 1)};
  std::set<std::string> simple = judge ? std::set<std::string>{"heuristic", "ground_truth"}
                                       : std::set<std::string>{"template"};
  if (simple.count(spec.kind)) {
    if (!spec.argument.empty()) throw ConfigError("backend '" + spec.kind + "' takes no argument");
    return spec;
  }
  if (spec.kind == "scripted" || spec.kind == "external") {
    if (spec.argument.empty()) throw ConfigError("backend '" + spec.kind + "' needs a path or command");
    return spec;
  }
  throw ConfigError("unknown backend '" + text + "'");
}

RunConfig parse_config(const json& j) {
  const std::string top = "config";
  check_keys(j, {"corpus", "workflows", "budgets", "backend", "backend_fallback", "judges", "ensemble_size",
                 "rank_weights", "filter_policy", "risk_threshold", "seed", "parallelism", "rules", "timeout_ms",
                 "permutation", "external_cases"},
             top);
  RunConfig c;
  c.corpus = get<std::string>(j, "corpus", "", top);
  if (j.contains("workflows")) {
    if (!j["workflows"].is_array() || j["workflows"].empty()) throw ConfigError("'workflows' must be a non-empty array");
    for (const auto& w : j["workflows"]) {
      auto tag = w.is_string() ? parse_workflow_tag(w.get<std::string>()) : std::nullopt;
      if (!tag) throw ConfigError("unknown workflow " + w.dump());
      if (std::find(c.workflows.begin(), c.workflows.end(), *tag) == c.workflows.end()) c.workflows.push_back(*tag);
    }
    std::sort(c.workflows.begin(), c.workflows.end());
  } else {
    c.workflows.assign(std::begin(kAllWorkflows), std::end(kAllWorkflows));
  }
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    const std::string where = "budgets";
    check_keys(b, {"tests_per_case", "mutants_per_case", "mutants_per_risk", "risks_per_case", "tests_per_mutant",
                   "harden_mutation_cap", "harden_tests_per_mutant", "step_limit"},
               where);
    c.budgets.tests_per_case = positive(b, "tests_per_case", c.budgets.tests_per_case, where);
    c.budgets.mutants_per_case = positive(b, "mutants_per_case", c.budgets.mutants_per_case, where);
    c.budgets.mutants_per_risk = positive(b, "mutants_per_risk", c.budgets.mutants_per_risk, where);
    c.budgets.risks_per_case = positive(b, "risks_per_case", c.budgets.risks_per_case, where);
    c.budgets.tests_per_mutant = positive(b, "tests_per_mutant", c.budgets.tests_per_mutant, where);
    c.budgets.harden_mutation_cap = positive(b, "harden_mutation_cap", c.budgets.harden_mutation_cap, where);
    c.budgets.harden_tests_per_mutant = positive(b, "harden_tests_per_mutant", c.budgets.harden_tests_per_mutant, where);
    c.budgets.step_limit = get<std::int64_t>(b, "step_limit", c.budgets.step_limit, where);
    if (c.budgets.step_limit <= 0) throw ConfigError("'step_limit' must be positive");
  }
  c.backend = parse_backend(get<std::string>(j, "backend", "template", top), false);
  c.backend_fallback = get<bool>(j, "backend_fallback", true, top);
  c.judges = parse_backend(get<std::string>(j, "judges", "heuristic", top), true);
  c.ensemble_size = get<int>(j, "ensemble_size", 3, top);
  if (c.ensemble_size < 1 || c.ensemble_size > 15) throw ConfigError("'ensemble_size' must be in 1..15");
  if (j.contains("rank_weights")) {
    const auto& w = j["rank_weights"];
    const std::string where = "rank_weights";
    check_keys(w, {"rubfake", "tp_prob", "bucket_med", "trivial_bonus", "moderate_bonus", "heavy_bonus"}, where);
    auto& r = c.rank_weights;
    r.rubfake = get<double>(w, "rubfake", r.rubfake, where);
    r.tp_prob = get<double>(w, "tp_prob", r.tp_prob, where);
    r.bucket_med = get<double>(w, "bucket_med", r.bucket_med, where);
    r.trivial_bonus = get<double>(w, "trivial_bonus", r.trivial_bonus, where);
    r.moderate_bonus = get<double>(w, "moderate_bonus", r.moderate_bonus, where);
    r.heavy_bonus = get<double>(w, "heavy_bonus", r.heavy_bonus, where);
  }
  if (j.contains("filter_policy")) {
    const auto& f = j["filter_policy"];
    check_keys(f, {"discard_bucket_value", "epsilon"}, "filter_policy");
    c.filter_policy.discard_bucket_value = get<double>(f, "discard_bucket_value", 0.0, "filter_policy");
    c.filter_policy.epsilon = get<double>(f, "epsilon", c.filter_policy.epsilon, "filter_policy");
    if (c.filter_policy.discard_bucket_value != 0.0 && c.filter_policy.discard_bucket_value != -1.0) {
      throw ConfigError("'discard_bucket_value' must be 0 or -1");
    }
    if (c.filter_policy.epsilon < 0.0) throw ConfigError("'epsilon' must be non-negative");
  }
  c.risk_threshold = get<double>(j, "risk_threshold", 0.0, top);
  if (c.risk_threshold < 0.0) throw ConfigError("'risk_threshold' must be non-negative");
  c.seed = get<std::uint64_t>(j, "seed", 1, top);
  c.parallelism = positive(j, "parallelism", 1, top);
  c.rules = get<std::string>(j, "rules", "", top);
  c.timeout_ms = positive(j, "timeout_ms", 10000, top);
  if (j.contains("permutation")) {
    const auto& p = j["permutation"];
    check_keys(p, {"iterations", "min_group", "max_group"}, "permutation");
    c.permutation.iterations = get<std::int64_t>(p, "iterations", c.permutation.iterations, "permutation");
    c.permutation.min_group = positive(p, "min_group", c.permutation.min_group, "permutation");
    c.permutation.max_group = positive(p, "max_group", c.permutation.max_group, "permutation");
    if (c.permutation.iterations < 0 || c.permutation.max_group < c.permutation.min_group) {
      throw ConfigError("bad permutation settings");
    }
  }
  if (j.contains("external_cases")) {
    if (!j["external_cases"].is_array()) throw ConfigError("'external_cases' must be an array");
    for (const auto& e : j["external_cases"]) {
      const std::string where = "external case";
      check_keys(e, {"id", "title", "summary", "status", "test_id", "test_source", "parent_cmd", "child_cmd", "diff"},
                 where);
      ExternalCase x;
      x.id = get<std::string>(e, "id", "", where);
      x.title = get<std::string>(e, "title", "", where);
      x.summary = get<std::string>(e, "summary", "", where);
      auto status = corpus::parse_status(get<std::string>(e, "status", "UNLABELLED", where));
      if (!status) throw ConfigError("bad status in external case '" + x.id + "'");
      x.status = *status;
      x.test_id = get<std::string>(e, "test_id", x.id + "/external/1", where);
      x.test_source = get<std::string>(e, "test_source", "", where);
      x.parent_cmd = get<std::string>(e, "parent_cmd", "", where);
      x.child_cmd = get<std::string>(e, "child_cmd", "", where);
      x.diff = get<std::string>(e, "diff", "", where);
      if (x.id.empty() || x.parent_cmd.empty() || x.child_cmd.empty()) {
        throw ConfigError("external cases need id, parent_cmd and child_cmd");
      }
      c.external_cases.push_back(std::move(x));
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

json config_to_json(const RunConfig& c) {
  json workflows = json::array();
  for (auto w : c.workflows) workflows.push_back(std::string(to_string(w)));
  const auto& b = c.budgets;
  const auto& r = c.rank_weights;
  json external = json::array();
  for (const auto& e : c.external_cases) {
    external.push_back({{"id", e.id}, {"title", e.title}, {"summary", e.summary},
                        {"status", std::string(corpus::to_string(e.status))}, {"test_id", e.test_id},
                        {"test_source", e.test_source}, {"parent_cmd", e.parent_cmd}, {"child_cmd", e.child_cmd},
                        {"diff", e.diff}});
  }
  return {{"corpus", c.corpus},
          {"workflows", workflows},
          {"budgets",
           {{"tests_per_case", b.tests_per_case},
            {"mutants_per_case", b.mutants_per_case},
            {"mutants_per_risk", b.mutants_per_risk},
            {"risks_per_case", b.risks_per_case},
            {"tests_per_mutant", b.tests_per_mutant},
            {"harden_mutation_cap", b.harden_mutation_cap},
            {"harden_tests_per_mutant", b.harden_tests_per_mutant},
            {"step_limit", b.step_limit}}},
          {"backend", c.backend.text()},
          {"backend_fallback", c.backend_fallback},
          {"judges", c.judges.text()},
          {"ensemble_size", c.ensemble_size},
          {"rank_weights",
           {{"rubfake", r.rubfake},
            {"tp_prob", r.tp_prob},
            {"bucket_med", r.bucket_med},
            {"trivial_bonus", r.trivial_bonus},
            {"moderate_bonus", r.moderate_bonus},
            {"heavy_bonus", r.heavy_bonus}}},
          {"filter_policy",
           {{"discard_bucket_value", c.filter_policy.discard_bucket_value}, {"epsilon", c.filter_policy.epsilon}}},
          {"risk_threshold", c.risk_threshold},
          {"seed", c.seed},
          {"parallelism", c.parallelism},
          {"rules", c.rules},
          {"timeout_ms", c.timeout_ms},
          {"permutation",
           {{"iterations", c.permutation.iterations},
            {"min_group", c.permutation.min_group},
            {"max_group", c.permutation.max_group}}},
          {"external_cases", external}};
}

void apply_environment(RunConfig& config) {
  const char* s = std::getenv("CATCHJIT_SEED");
  if (!s || !*s) return;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (errno != 0 || *end != '\0' || *s == '-') throw ConfigError("CATCHJIT_SEED must be a non-negative integer");
  config.seed = v;
}

}  // namespace catchjit::pipeline
