#include "generation/generation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "minilang/parser.hpp"

namespace catchjit::generation {

using minilang::Expr;
using minilang::ExprKind;
using minilang::Stmt;
using minilang::StmtKind;

namespace {

void callees(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == ExprKind::Call && !minilang::is_intrinsic(e.text)) out.push_back(e.text);
  for (const auto& a : e.args) callees(a, out);
}

void callees(const std::vector<Stmt>& stmts, std::vector<std::string>& out) {
  for (const auto& s : stmts) {
    for (const auto& e : s.exprs) callees(e, out);
    callees(s.body, out);
    callees(s.else_body, out);
  }
}

bool is_assertion(const Expr& e) {
  return e.kind == ExprKind::Call && (e.text == "assert_eq" || e.text == "assert_true");
}

bool contains_assertion(const Expr& e) {
  if (is_assertion(e)) return true;
  for (const auto& a : e.args) {
    if (contains_assertion(a)) return true;
  }
  return false;
}

bool contains_assertion(const std::vector<Stmt>& stmts) {
  for (const auto& s : stmts) {
    for (const auto& e : s.exprs) {
      if (contains_assertion(e)) return true;
    }
    if (contains_assertion(s.body) || contains_assertion(s.else_body)) return true;
  }
  return false;
}

const Expr* first_assertion(const Expr& e) {
  if (is_assertion(e)) return &e;
  for (const auto& a : e.args) {
    if (const Expr* f = first_assertion(a)) return f;
  }
  return nullptr;
}

const Expr* first_assertion(const std::vector<Stmt>& stmts) {
  for (const auto& s : stmts) {
    for (const auto& e : s.exprs) {
      if (const Expr* f = first_assertion(e)) return f;
    }
    if (const Expr* f = first_assertion(s.body)) return f;
    if (const Expr* f = first_assertion(s.else_body)) return f;
  }
  return nullptr;
}

std::string call_text(const std::string& entry, const ArgTuple& args) {
  std::string out = entry + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += minilang::to_literal(args[i]);
  }
  return out + ")";
}

}  // namespace

std::string observation_test_source(const std::string& entry, const minilang::Observation& observation) {
  const std::string call = call_text(entry, observation.args);
  if (observation.value) return "assert_eq(" + call + ", " + minilang::to_literal(*observation.value) + ");";
  if (observation.exception) {
    return "assert_eq(catch_kind(" + call + "), " + minilang::quote_text(*observation.exception) + ");";
  }
  return "";
}

std::vector<std::string> callers_of(const ProgramSet& programs, const std::string& function) {
  std::vector<std::string> out;
  for (const auto& [file, program] : programs) {
    for (const auto& fn : program.functions) {
      if (fn.name == function) continue;
      std::vector<std::string> called;
      callees(fn.body, called);
      if (std::find(called.begin(), called.end(), function) != called.end()) out.push_back(fn.name);
    }
  }
  return out;
}

std::string assertion_entry(const std::string& source) {
  std::vector<Stmt> stmts;
  try {
    stmts = minilang::parse_statements(source);
  } catch (const minilang::SyntaxError&) {
    return "";
  }
  const Expr* a = first_assertion(stmts);
  if (!a || a->args.empty()) return "";
  std::vector<std::string> called;
  callees(a->args[0], called);
  return called.empty() ? "" : called.front();
}

std::vector<TestCase> generate_observation_tests(const ProgramSet& parent, const std::vector<std::string>& entry_points,
                                                 const std::map<std::string, std::vector<ArgTuple>>& input_seeds,
                                                 int budget, std::int64_t step_limit) {
  if (budget <= 0) throw std::invalid_argument("budget must be positive");
  std::vector<std::vector<ArgTuple>> seeds;
  std::vector<std::string> entries;
  for (const auto& entry : entry_points) {
    bool exists = false;
    for (const auto& [file, program] : parent) exists = exists || program.find(entry) != nullptr;
    if (!exists) continue;
    entries.push_back(entry);
    auto it = input_seeds.find(entry);
    seeds.push_back(it != input_seeds.end() ? it->second : default_seeds(parent, entry));
  }
  std::vector<TestCase> out;
  std::set<std::string> seen;
  size_t longest = 0;
  for (const auto& s : seeds) longest = std::max(longest, s.size());
  for (size_t i = 0; i < longest && static_cast<int>(out.size()) < budget; ++i) {
    for (size_t e = 0; e < entries.size() && static_cast<int>(out.size()) < budget; ++e) {
      if (i >= seeds[e].size()) continue;
      auto obs = minilang::observed_outputs(parent, entries[e], {seeds[e][i]}, step_limit);
      std::string source = observation_test_source(entries[e], obs[0]);
      if (source.empty() || !seen.insert(source).second) continue;
      if (!minilang::execute(parent, source, step_limit).passed()) continue;
      TestCase t;
      t.id = "obs-" + std::to_string(out.size() + 1);
      t.source = std::move(source);
      t.entry = entries[e];
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<KilledTest> mutation_guided_filter(const std::vector<TestCase>& tests, const ProgramSet& parent,
                                               const mutation::Mutant& mutant, std::int64_t step_limit) {
  std::vector<KilledTest> out;
  for (const auto& t : tests) {
    if (!minilang::execute(parent, t, step_limit).passed()) continue;
    auto on_mutant = minilang::execute(mutant.mutated, t, step_limit);
    if (on_mutant.passed()) continue;
    KilledTest k{t, std::move(on_mutant)};
    k.test.provenance.mutant_id = mutant.id;
    if (mutant.risk_id) k.test.provenance.risk_id = mutant.risk_id;
    out.push_back(std::move(k));
  }
  return out;
}

std::vector<std::string> TemplateGenerator::propose_tests(const GenerationContext& context, int budget) {
  std::map<std::string, std::vector<ArgTuple>> seeds = context.input_seeds;
  for (const auto& entry : context.entry_points) {
    if (seeds.count(entry)) continue;
    seeds[entry] = context.mutant ? mutant_seeds(context.target_programs, entry, *context.mutant)
                                  : default_seeds(context.target_programs, entry);
  }
  std::vector<std::string> out;
  for (auto& t : generate_observation_tests(context.target_programs, context.entry_points, seeds, budget,
                                            context.step_limit)) {
    out.push_back(std::move(t.source));
  }
  return out;
}

ScriptedMock::ScriptedMock(std::vector<std::string> tests, std::optional<std::string> intent,
                           std::optional<std::vector<mutation::Risk>> risks)
    : tests_(std::move(tests)), intent_(std::move(intent)), risks_(std::move(risks)) {}

std::unique_ptr<ScriptedMock> ScriptedMock::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scripted fixture '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<std::string> tests = j.value("tests", std::vector<std::string>{});
  std::optional<std::string> intent;
  if (j.contains("intent") && j["intent"].is_string()) intent = j["intent"].get<std::string>();
  std::optional<std::vector<mutation::Risk>> risks;
  if (j.contains("risks") && j["risks"].is_array()) {
    risks.emplace();
    for (const auto& r : j["risks"]) risks->push_back(risk_from_json(r));
  }
  return std::make_unique<ScriptedMock>(std::move(tests), std::move(intent), std::move(risks));
}

std::vector<std::string> ScriptedMock::propose_tests(const GenerationContext&, int) { return tests_; }

std::optional<std::vector<mutation::Risk>> ScriptedMock::enumerate_risks(const IntentDescription&, const corpus::Diff&,
                                                                         int cap) {
  if (!risks_) return std::nullopt;
  auto out = *risks_;
  if (static_cast<int>(out.size()) > cap) out.resize(static_cast<size_t>(cap));
  return out;
}

nlohmann::json risk_to_json(const mutation::Risk& risk) {
  nlohmann::json locs = nlohmann::json::array();
  for (const auto& l : risk.locations) locs.push_back({{"file", l.file}, {"function", l.function}});
  return {{"id", risk.id},
          {"description", risk.description},
          {"category", std::string(mutation::to_string(risk.category))},
          {"scope", std::string(mutation::to_string(risk.scope))},
          {"locations", locs}};
}

mutation::Risk risk_from_json(const nlohmann::json& j) {
  mutation::Risk r;
  r.id = j.at("id").get<std::string>();
  r.description = j.value("description", "");
  auto cat = mutation::parse_risk_category(j.value("category", "other"));
  if (!cat) throw std::runtime_error("unknown risk category in '" + r.id + "'");
  r.category = *cat;
  auto scope = mutation::parse_node_scope(j.value("scope", "any"));
  r.scope = scope.value_or(mutation::NodeScope::Any);
  for (const auto& l : j.value("locations", nlohmann::json::array())) {
    r.locations.push_back({l.value("file", ""), l.at("function").get<std::string>()});
  }
  return r;
}

namespace {

nlohmann::json sources_json(const ProgramSet& programs) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [file, program] : programs) {
    out[file] = program.source_text.empty() ? minilang::print(program) : program.source_text;
  }
  return out;
}

nlohmann::json decls_json(const std::vector<corpus::ChangedDecl>& decls) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : decls) {
    out.push_back({{"file", d.file}, {"function", d.function}, {"kind", std::string(corpus::to_string(d.kind))}});
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const GenerationContext& context) {
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& [entry, tuples] : context.input_seeds) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : tuples) {
      nlohmann::json args = nlohmann::json::array();
      for (const auto& v : t) args.push_back(minilang::to_literal(v));
      list.push_back(args);
    }
    seeds[entry] = list;
  }
  nlohmann::json j = {{"programs", sources_json(context.target_programs)},
                      {"entry_points", context.entry_points},
                      {"input_seeds", seeds},
                      {"workflow", std::string(catchjit::to_string(context.workflow))}};
  if (context.mutant) {
    const auto& m = *context.mutant;
    j["mutant"] = {{"id", m.id},
                   {"operator", m.operator_id},
                   {"file", m.file},
                   {"function", m.function},
                   {"node_id", m.node_id},
                   {"description", m.description},
                   {"mutated", sources_json(m.mutated)}};
  }
  if (context.intent) j["intent"] = context.intent->text;
  nlohmann::json risks = nlohmann::json::array();
  for (const auto& r : context.risks) risks.push_back(risk_to_json(r));
  j["risks"] = risks;
  return j;
}

ExternalBackend::ExternalBackend(std::string command, int timeout_ms) : client_(std::move(command), timeout_ms) {}

std::vector<std::string> ExternalBackend::propose_tests(const GenerationContext& context, int budget) {
  auto reply = client_.request(
      {{"kind", "generate"}, {"id", next_id_++}, {"budget", budget}, {"context", to_json(context)}});
  if (!reply.contains("tests") || !reply["tests"].is_array()) {
    throw BackendUnavailable("generate response lacks a 'tests' array");
  }
  std::vector<std::string> out;
  for (const auto& t : reply["tests"]) {
    if (t.is_string()) out.push_back(t.get<std::string>());
  }
  return out;
}

std::optional<std::string> ExternalBackend::infer_intent(const corpus::DiffCase& diff_case, const corpus::Diff& diff) {
  auto reply = client_.request({{"kind", "infer_intent"},
                                {"id", next_id_++},
                                {"case",
                                 {{"id", diff_case.id},
                                  {"title", diff_case.title},
                                  {"summary", diff_case.summary},
                                  {"diff", diff.render()},
                                  {"changed_decls", decls_json(diff.changed_decls)}}}});
  if (reply.contains("intent") && reply["intent"].is_string()) return reply["intent"].get<std::string>();
  return std::nullopt;
}

std::optional<std::vector<mutation::Risk>> ExternalBackend::enumerate_risks(const IntentDescription& intent,
                                                                            const corpus::Diff& diff, int cap) {
  auto reply = client_.request({{"kind", "enumerate_risks"},
                                {"id", next_id_++},
                                {"intent", intent.text},
                                {"diff", diff.render()},
                                {"changed_decls", decls_json(diff.changed_decls)},
                                {"cap", cap}});
  if (!reply.contains("risks") || !reply["risks"].is_array()) return std::nullopt;
  std::vector<mutation::Risk> out;
  try {
    for (const auto& r : reply["risks"]) out.push_back(risk_from_json(r));
  } catch (const std::exception& e) {
    throw BackendUnavailable(std::string("malformed risk: ") + e.what());
  }
  if (static_cast<int>(out.size()) > cap) out.resize(static_cast<size_t>(cap));
  return out;
}

GenerationResult generate_via_backend(GeneratorBackend& backend, const GenerationContext& context, int budget,
                                      GeneratorBackend* fallback) {
  if (budget <= 0) throw std::invalid_argument("budget must be positive");
  GenerationResult result;
  std::vector<std::string> proposals;
  try {
    proposals = backend.propose_tests(context, budget);
  } catch (const BackendUnavailable& e) {
    if (!fallback) throw;
    result.fallback_used = true;
    result.notice = std::string(e.what()) + "; fell back to " + fallback->name();
    proposals = fallback->propose_tests(context, budget);
  }
  std::set<std::string> seen;
  for (const auto& p : proposals) {
    std::vector<Stmt> stmts;
    try {
      stmts = minilang::parse_statements(p);
    } catch (const minilang::SyntaxError&) {
      ++result.dropped;
      continue;
    }
    if (!contains_assertion(stmts)) {
      ++result.dropped;
      continue;
    }
    if (static_cast<int>(result.tests.size()) >= budget) continue;
    std::string canonical = minilang::print_statements(stmts);
    if (!seen.insert(canonical).second) continue;
    TestCase t;
    t.id = context.id_prefix + "/" + std::to_string(result.tests.size() + 1);
    t.source = std::move(canonical);
    t.provenance.workflow = context.workflow;
    if (context.mutant) {
      t.provenance.mutant_id = context.mutant->id;
      t.provenance.risk_id = context.mutant->risk_id;
    }
    t.entry = assertion_entry(t.source);
    result.tests.push_back(std::move(t));
  }
  return result;
}

}  // namespace catchjit::generation
