#include "pipeline/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "pipeline/runner.hpp"

namespace catchjit::pipeline {

namespace fs = std::filesystem;
using assessors::Assessment;
using assessors::CatchBundle;
using generation::BackendUnavailable;
using nlohmann::json;
using workflows::CandidateTest;
using workflows::CatchVerdict;
using workflows::WorkflowResult;

namespace {

json failure_json(const minilang::TestOutcome& o) {
  const auto* t = o.trace.terminal();
  if (!t) return nullptr;
  switch (t->kind) {
    case minilang::TraceEventKind::AssertFail:
      return {{"kind", "assert_fail"},
              {"expression", t->expression_text},
              {"expected", minilang::to_literal(t->expected)},
              {"actual", minilang::to_literal(t->actual)}};
    case minilang::TraceEventKind::Exception:
      return {{"kind", "exception"},
              {"exception_kind", t->exception_kind},
              {"message", t->message},
              {"function", t->function}};
    case minilang::TraceEventKind::Runner:
      return {{"kind", "runner"}, {"event", t->name}, {"message", t->message}};
    default:
      return {{"kind", "step_limit"}};
  }
}

json provenance_json(const minilang::Provenance& p) {
  json j = {{"workflow", std::string(to_string(p.workflow))}};
  j["mutant_id"] = p.mutant_id ? json(*p.mutant_id) : json(nullptr);
  j["risk_id"] = p.risk_id ? json(*p.risk_id) : json(nullptr);
  return j;
}

json test_json(const CandidateTest& t) {
  json j = {{"id", t.test.id},
            {"source", t.test.source},
            {"entry", t.test.entry},
            {"provenance", provenance_json(t.test.provenance)},
            {"parent_outcome", t.parent_outcome.label()},
            {"child_outcome", t.child_outcome.label()},
            {"verdict", std::string(workflows::to_string(t.verdict))}};
  if (t.verdict == CatchVerdict::WeakCatch) {
    j["child_trace"] = minilang::render_trace(t.child_outcome.trace);
    j["failure"] = failure_json(t.child_outcome);
  }
  return j;
}

json decls_json(const std::vector<corpus::ChangedDecl>& decls) {
  json out = json::array();
  for (const auto& d : decls) {
    out.push_back({{"file", d.file}, {"function", d.function}, {"kind", std::string(corpus::to_string(d.kind))}});
  }
  return out;
}

json result_json(const WorkflowResult& r) {
  json tests = json::array();
  for (const auto& t : r.tests) tests.push_back(test_json(t));
  json mutants = json::array();
  for (const auto& m : r.mutants) {
    mutants.push_back({{"id", m.id},
                       {"operator", m.operator_id},
                       {"file", m.file},
                       {"function", m.function},
                       {"node_id", m.node_id},
                       {"description", m.description},
                       {"risk_id", m.risk_id ? json(*m.risk_id) : json(nullptr)},
                       {"killing_tests", m.killing_tests}});
  }
  json risks = json::array();
  for (const auto& k : r.risks) risks.push_back(generation::risk_to_json(k));
  return {{"workflow", std::string(to_string(r.workflow))},
          {"tests", tests},
          {"mutants", mutants},
          {"risks", risks},
          {"intent", r.intent ? json(r.intent->text) : json(nullptr)},
          {"notices", r.notices},
          {"dropped_proposals", r.dropped_proposals},
          {"backend_fallback", r.backend_fallback},
          {"weak_catches", r.weak_catches()}};
}

json rubfake_json(const assessors::RubfakeAssessment& r) {
  json fired = json::array();
  for (const auto& f : r.fired) {
    json ev = json::array();
    for (const auto& e : f.evidence) ev.push_back({{"source", std::string(to_string(e.source))}, {"span", e.span}});
    fired.push_back({{"rule", f.rule_id},
                     {"polarity", std::string(to_string(f.polarity))},
                     {"likelihood", std::string(to_string(f.likelihood))},
                     {"evidence", ev}});
  }
  return {{"score", r.score},
          {"dismissal_cost", r.dismissal_cost ? json(std::string(to_string(*r.dismissal_cost))) : json(nullptr)},
          {"fired", fired}};
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct AssessedCatch {
  Assessment assessment;
  CatchBundle bundle;
  std::vector<std::string> workflows;
  bool culprit_reached = false;
};

json assessment_json(const AssessedCatch& a) {
  const auto& s = a.assessment;
  return {{"id", s.test_id},
          {"case_id", s.case_id},
          {"workflows", a.workflows},
          {"test_source", a.bundle.test.source},
          {"parent_outcome", a.bundle.parent_outcome.label()},
          {"child_outcome", a.bundle.child_outcome.label()},
          {"failure", failure_json(a.bundle.child_outcome)},
          {"rubfake", rubfake_json(s.rubfake)},
          {"tp_prob", opt(s.tp_prob)},
          {"bucket_scores", s.bucket_scores},
          {"bucket_med", opt(s.bucket_med)},
          {"judges", s.judge_ids},
          {"rationales", s.rationales},
          {"judge_failures", s.judge_failures},
          {"final_rank_key", s.final_rank_key},
          {"decision", std::string(to_string(s.decision))},
          {"filter_clause", s.filter_clause},
          {"reach_out", reach_out_sentence(a.bundle)},
          {"culprit_reached", a.culprit_reached}};
}

struct CaseRun {
  const corpus::DiffCase* diff_case = nullptr;
  corpus::Diff diff;
  generation::IntentDescription intent;
  std::vector<WorkflowResult> results;
  std::optional<workflows::CoincidentalCatchView> cc;
  std::vector<AssessedCatch> catches;
};

bool selected(const RunConfig& c, WorkflowTag tag) {
  return std::find(c.workflows.begin(), c.workflows.end(), tag) != c.workflows.end();
}

struct Assessors {
  std::vector<assessors::PatternRule> rules;
  std::vector<std::unique_ptr<assessors::JudgeBackend>> owned;
  std::vector<assessors::JudgeBackend*> ensemble;
  assessors::AssessOptions options;
  std::map<std::string, corpus::GroundTruth> truth;
};

void run_case(CaseRun& run, const RunConfig& config, generation::GeneratorBackend& backend,
              generation::GeneratorBackend* fallback, const Assessors& as) {
  const auto& c = *run.diff_case;
  workflows::RunContext ctx{backend, fallback, config.budgets};
  run.diff = corpus::compute_diff(c.parent, c.child);
  run.intent = workflows::default_intent(c, run.diff);
  if (selected(config, WorkflowTag::DodgyDiff)) run.results.push_back(workflows::run_dodgy_diff(c, ctx));
  if (selected(config, WorkflowTag::IntentAware)) {
    run.results.push_back(workflows::run_intent_aware(c, ctx));
    if (run.results.back().intent) run.intent = *run.results.back().intent;
  }
  bool hnc = selected(config, WorkflowTag::HardenNoCoverage), hmg = selected(config, WorkflowTag::HardenMutationGuided);
  bool cc = selected(config, WorkflowTag::CoincidentalCatch);
  if (hnc || hmg || cc) {
    auto h = workflows::run_harden_baselines(c, ctx);
    if (cc) run.cc = workflows::coincidental_catch_view(h, c, config.budgets.step_limit);
    if (hnc) run.results.push_back(std::move(h.no_coverage));
    if (hmg) run.results.push_back(std::move(h.mutation_guided));
  }
  std::map<std::string, size_t> by_id;
  auto add = [&](const CandidateTest& t, WorkflowTag tag) {
    auto it = by_id.find(t.test.id);
    if (it != by_id.end()) {
      run.catches[it->second].workflows.emplace_back(to_string(tag));
      return;
    }
    AssessedCatch a;
    a.bundle = CatchBundle{t.test, t.parent_outcome, t.child_outcome, run.diff, run.intent, c.id};
    a.workflows.emplace_back(to_string(tag));
    if (c.ground_truth && c.ground_truth->buggy) {
      a.culprit_reached = assessors::calls_function(t.child_outcome.trace, c.ground_truth->culprit);
    }
    by_id[t.test.id] = run.catches.size();
    run.catches.push_back(std::move(a));
  };
  for (const auto& r : run.results) {
    for (const auto& t : r.tests) {
      if (t.verdict == CatchVerdict::WeakCatch) add(t, r.workflow);
    }
  }
  if (run.cc) {
    for (const auto& t : run.cc->catches) add(t, WorkflowTag::CoincidentalCatch);
  }
  for (auto& a : run.catches) a.assessment = assessors::assess(a.bundle, as.rules, as.ensemble, as.options);
}

Assessors build_assessors(const RunConfig& config, const std::vector<corpus::DiffCase>& cases) {
  Assessors as;
  try {
    as.rules = config.rules.empty() ? assessors::default_rules() : assessors::load_rules(config.rules);
  } catch (const assessors::RuleFormatError& e) {
    throw ConfigError(e.what());
  }
  as.options.filter = config.filter_policy;
  as.options.weights = config.rank_weights;
  for (const auto& c : cases) {
    if (c.ground_truth) as.truth[c.id] = *c.ground_truth;
  }
  const auto& spec = config.judges;
  if (spec.kind == "heuristic") {
    for (int i = 0; i < config.ensemble_size; ++i) as.owned.push_back(std::make_unique<assessors::HeuristicJudge>(i));
  } else if (spec.kind == "ground_truth") {
    for (int i = 0; i < config.ensemble_size; ++i) {
      as.owned.push_back(std::make_unique<assessors::GroundTruthJudge>(as.truth, i));
    }
  } else if (spec.kind == "scripted") {
    std::ifstream in(spec.argument);
    if (!in) throw ConfigError("cannot open judge fixture " + spec.argument);
    try {
      auto doc = json::parse(in);
      if (doc.contains("judges")) {
        for (const auto& j : doc["judges"]) as.owned.push_back(assessors::ScriptedJudge::from_json(j));
      } else {
        as.owned.push_back(assessors::ScriptedJudge::from_json(doc));
      }
    } catch (const std::exception& e) {
      throw ConfigError("judge fixture " + spec.argument + ": " + e.what());
    }
    if (as.owned.empty()) throw ConfigError("judge fixture defines no judges");
  } else if (spec.kind == "external") {
    for (int i = 0; i < config.ensemble_size; ++i) {
      as.owned.push_back(std::make_unique<assessors::ExternalJudge>("external-" + std::to_string(i), spec.argument,
                                                                    config.timeout_ms));
    }
  }
  for (auto& j : as.owned) as.ensemble.push_back(j.get());
  return as;
}

std::string timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json summarize(const json& cases) {
  struct Counts {
    std::int64_t tests = 0, weak = 0, diffs = 0, diffs_caught = 0;
  };
  std::map<std::string, Counts> per;
  for (const auto& c : cases) {
    for (const auto& r : c["workflows"]) {
      auto& k = per[r["workflow"].get<std::string>()];
      std::int64_t weak = 0, tests = 0;
      if (r.contains("catches")) {
        tests = r["tests_considered"].get<std::int64_t>();
        weak = static_cast<std::int64_t>(r["catches"].size());
      } else {
        tests = static_cast<std::int64_t>(r["tests"].size());
        for (const auto& t : r["tests"]) weak += t["verdict"] == "WeakCatch";
      }
      k.tests += tests;
      k.weak += weak;
      k.diffs += 1;
      k.diffs_caught += weak > 0;
    }
  }
  json rows = json::array();
  auto rate = [](std::int64_t a, std::int64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  std::int64_t total_tests = 0, total_weak = 0;
  for (auto tag : kAllWorkflows) {
    std::string name(to_string(tag));
    auto it = per.find(name);
    if (it == per.end()) continue;
    const auto& k = it->second;
    total_tests += k.tests;
    total_weak += k.weak;
    rows.push_back({{"workflow", name},
                    {"total_tests_generated", k.tests},
                    {"total_weak_catches", k.weak},
                    {"weak_catch_rate", rate(k.weak, k.tests)},
                    {"diffs", k.diffs},
                    {"diffs_with_weak_catch", k.diffs_caught},
                    {"per_diff_catch_rate", rate(k.diffs_caught, k.diffs)}});
  }
  auto pooled = [&](std::initializer_list<const char*> names) {
    std::int64_t w = 0, t = 0;
    for (const auto* n : names) {
      auto it = per.find(n);
      if (it != per.end()) {
        w += it->second.weak;
        t += it->second.tests;
      }
    }
    return rate(w, t);
  };
  double aware = pooled({"DodgyDiff", "IntentAware"});
  double unaware = pooled({"HardenNoCoverage", "HardenMutationGuided"});
  return {{"per_workflow", rows},
          {"total_tests_generated", total_tests},
          {"total_weak_catches", total_weak},
          {"weak_catch_rate", rate(total_weak, total_tests)},
          {"diff_aware_rate", aware},
          {"diff_unaware_rate", unaware},
          {"diff_aware_ratio", unaware > 0 ? json(aware / unaware) : json(nullptr)}};
}

CaseRun run_external_case(const ExternalCase& x, const RunConfig& config, const Assessors& as, json& record) {
  auto [parent, child] = external_runner_adapter(x.parent_cmd, x.child_cmd, config.timeout_ms);
  minilang::TestCase test;
  test.id = x.test_id;
  test.source = x.test_source;
  test.entry = generation::assertion_entry(x.test_source);
  CandidateTest ct{test, parent, child, workflows::classify(parent, child)};
  corpus::DiffCase dc;
  dc.id = x.id;
  dc.title = x.title;
  dc.summary = x.summary;
  dc.status = x.status;
  CaseRun run;
  run.diff = parse_unified_diff(x.diff);
  run.intent = workflows::default_intent(dc, run.diff);
  record = {{"id", x.id}, {"status", std::string(corpus::to_string(x.status))}, {"test", test_json(ct)}};
  record["test"]["parent_trace"] = minilang::render_trace(parent.trace);
  record["test"]["child_trace"] = minilang::render_trace(child.trace);
  if (ct.verdict == CatchVerdict::WeakCatch) {
    AssessedCatch a;
    a.bundle = CatchBundle{test, parent, child, run.diff, run.intent, x.id};
    a.workflows = {"External"};
    a.assessment = assessors::assess(a.bundle, as.rules, as.ensemble, as.options);
    run.catches.push_back(std::move(a));
  }
  return run;
}

}  // namespace

json run_pipeline(const RunConfig& config) {
  std::vector<corpus::DiffCase> cases;
  if (config.corpus.empty() && config.external_cases.empty()) throw CorpusError("no corpus path given");
  if (!config.corpus.empty()) {
    try {
      cases = corpus::load_corpus(config.corpus);
    } catch (const corpus::CorpusFormatError& e) {
      throw CorpusError(e.what());
    }
  }
  auto as = build_assessors(config, cases);

  generation::TemplateGenerator template_backend;
  std::unique_ptr<generation::GeneratorBackend> owned_backend;
  generation::GeneratorBackend* backend = &template_backend;
  if (config.backend.kind == "scripted") {
    try {
      owned_backend = generation::ScriptedMock::from_file(config.backend.argument);
    } catch (const std::exception& e) {
      throw ConfigError("backend fixture " + config.backend.argument + ": " + e.what());
    }
    backend = owned_backend.get();
  } else if (config.backend.kind == "external") {
    owned_backend = std::make_unique<generation::ExternalBackend>(config.backend.argument, config.timeout_ms);
    backend = owned_backend.get();
  }
  generation::GeneratorBackend* fallback = config.backend_fallback ? &template_backend : nullptr;

  std::vector<CaseRun> runs;
  for (const auto& c : cases) {
    if (c.risk_score >= config.risk_threshold) {
      runs.emplace_back();
      runs.back().diff_case = &c;
    }
  }
  std::vector<std::exception_ptr> errors(runs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < runs.size(); i = next++) {
      try {
        run_case(runs[i], config, *backend, fallback, as);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  size_t threads = std::min<size_t>(static_cast<size_t>(config.parallelism), std::max<size_t>(runs.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const BackendUnavailable& b) {
      throw BackendFailure(b.what());
    } catch (const corpus::CorpusFormatError& c) {
      throw CorpusError(c.what());
    }
  }

  json report;
  report["schema"] = kReportSchema;
  report["generated_at"] = timestamp();
  report["config"] = config_to_json(config);
  json case_records = json::array();
  std::vector<const AssessedCatch*> all;
  std::vector<WorkflowResult> every_result;
  for (const auto& run : runs) {
    const auto& c = *run.diff_case;
    json rec = {{"id", c.id},
                {"title", c.title},
                {"summary", c.summary},
                {"status", std::string(corpus::to_string(c.status))},
                {"risk_score", c.risk_score},
                {"changed_decls", decls_json(run.diff.changed_decls)},
                {"changed_lines", run.diff.changed_line_count()},
                {"intent", run.intent.text}};
    if (c.ground_truth) {
      rec["ground_truth"] = {{"buggy", c.ground_truth->buggy},
                             {"description", c.ground_truth->description},
                             {"culprit", c.ground_truth->culprit}};
    } else {
      rec["ground_truth"] = nullptr;
    }
    json wfs = json::array();
    std::vector<json> ordered;
    for (auto tag : kAllWorkflows) {
      if (tag == WorkflowTag::CoincidentalCatch && run.cc) {
        json catches = json::array();
        for (const auto& t : run.cc->catches) catches.push_back(test_json(t));
        wfs.push_back({{"workflow", "CoincidentalCatch"},
                       {"tests_considered", run.cc->tests_considered},
                       {"catches", catches}});
      }
      for (const auto& r : run.results) {
        if (r.workflow == tag) wfs.push_back(result_json(r));
      }
    }
    rec["workflows"] = wfs;
    case_records.push_back(rec);
    for (const auto& a : run.catches) all.push_back(&a);
    every_result.insert(every_result.end(), run.results.begin(), run.results.end());
  }

  std::vector<CaseRun> external_runs;
  json external_records = json::array();
  for (const auto& x : config.external_cases) {
    json rec;
    try {
      external_runs.push_back(run_external_case(x, config, as, rec));
    } catch (const std::runtime_error& e) {
      throw BackendFailure("external runner for '" + x.id + "': " + e.what());
    }
    external_records.push_back(rec);
  }
  for (const auto& run : external_runs) {
    for (const auto& a : run.catches) all.push_back(&a);
  }

  report["cases"] = case_records;
  report["external_cases"] = external_records;
  json assessments = json::array();
  std::vector<Assessment> plain;
  for (const auto* a : all) {
    assessments.push_back(assessment_json(*a));
    plain.push_back(a->assessment);
  }
  report["assessments"] = assessments;
  auto ranked = assessors::rank_catches(plain, config.rank_weights);
  json human = json::array(), discard = json::array();
  for (const auto& a : ranked) {
    (a.decision == assessors::ReviewDecision::AutoDiscard ? discard : human).push_back(a.test_id);
  }
  report["review_queue"] = {{"human_review", human}, {"auto_discard", discard}};
  json hardening = json::array();
  for (const auto& t : workflows::harvest_hardening(every_result)) {
    hardening.push_back({{"id", t.id}, {"source", t.source}, {"entry", t.entry}});
  }
  report["hardening"] = hardening;
  report["summary"] = summarize(case_records);
  report["summary"]["cases_in_corpus"] = cases.size();
  report["summary"]["cases_processed"] = runs.size();
  report["summary"]["assessed_weak_catches"] = all.size();
  report["summary"]["human_review"] = human.size();
  report["summary"]["auto_discard"] = discard.size();
  report["stats"] = compute_stats(report);
  return report;
}

json read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open report " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ReportError("report " + path + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema", std::string()) != kReportSchema) {
    throw ReportError("report " + path + " is not a " + std::string(kReportSchema) + " document");
  }
  return j;
}

void write_report(const json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path);
  out << report.dump(2) << "\n";
}

std::string canonical_report_text(const json& report) {
  json copy = report;
  copy.erase("generated_at");
  return copy.dump(2);
}

std::vector<std::string> check_report(const json& report) {
  std::vector<std::string> problems;
  auto expected = summarize(report.at("cases"));
  const auto& actual = report.at("summary");
  for (const char* key : {"total_tests_generated", "total_weak_catches"}) {
    if (actual.at(key) != expected.at(key)) problems.push_back(std::string("summary.") + key + " mismatch");
  }
  if (actual.at("per_workflow") != expected.at("per_workflow")) problems.push_back("summary.per_workflow mismatch");
  std::set<std::string> ids;
  for (const auto& a : report.at("assessments")) ids.insert(a.at("id").get<std::string>());
  if (actual.at("assessed_weak_catches").get<size_t>() != report.at("assessments").size()) {
    problems.push_back("summary.assessed_weak_catches mismatch");
  }
  size_t queued = report.at("review_queue").at("human_review").size() + report.at("review_queue").at("auto_discard").size();
  if (queued != ids.size()) problems.push_back("review queue does not partition the assessments");
  return problems;
}

std::string reach_out_sentence(const CatchBundle& bundle) {
  const auto* t = bundle.child_outcome.trace.terminal();
  std::string entry = bundle.test.entry.empty() ? generation::assertion_entry(bundle.test.source) : bundle.test.entry;
  if (!t) return "This test used to pass, but now fails; is that expected?";
  switch (t->kind) {
    case minilang::TraceEventKind::AssertFail:
      return "The expression " + t->expression_text + " used to evaluate to " + minilang::to_literal(t->expected) +
             ", but now evaluates to " + minilang::to_literal(t->actual) + "; is that expected?";
    case minilang::TraceEventKind::Exception:
      return "Calling " + (entry.empty() ? std::string("the code under test") : entry) +
             " used to succeed, but now raises " + t->exception_kind + " (" + t->message + "); is that expected?";
    case minilang::TraceEventKind::Runner:
      return "This test used to pass, but the runner now reports " + t->name + " (" + t->message +
             "); is that expected?";
    default:
      return "This test used to pass, but now fails; is that expected?";
  }
}

corpus::Diff parse_unified_diff(const std::string& text) {
  corpus::Diff d;
  std::string file;
  std::set<std::string> seen;
  for (const auto& line : corpus::split_lines(text)) {
    if (line.rfind("+++ ", 0) == 0) {
      file = line.substr(4);
      if (file.rfind("b/", 0) == 0) file = file.substr(2);
      continue;
    }
    if (line.rfind("--- ", 0) == 0) continue;
    if (line.rfind("@@", 0) == 0) {
      corpus::Hunk h;
      h.file = file;
      int ps = 0, pc = 1, cs = 0, cc = 1;
      if (std::sscanf(line.c_str(), "@@ -%d,%d +%d,%d", &ps, &pc, &cs, &cc) < 4) {
        std::sscanf(line.c_str(), "@@ -%d +%d", &ps, &cs);
      }
      h.parent_start = ps;
      h.parent_count = pc;
      h.child_start = cs;
      h.child_count = cc;
      d.hunks.push_back(h);
      continue;
    }
    if (d.hunks.empty()) continue;
    if (!line.empty() && line[0] == '-') d.hunks.back().removed.push_back(line.substr(1));
    if (!line.empty() && line[0] == '+') d.hunks.back().added.push_back(line.substr(1));
  }
  return d;
}

CorpusValidation validate_corpus(const std::string& path) {
  CorpusValidation v;
  if (!fs::is_directory(path)) {
    v.problems.push_back(path + ": corpus directory not found");
    return v;
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    try {
      auto c = corpus::load_case(dir.string());
      ++v.cases;
      auto diff = corpus::compute_diff(c.parent, c.child);
      if (diff.empty()) v.problems.push_back(c.id + ": parent and child are identical");
      if (c.ground_truth && c.ground_truth->buggy) {
        const auto& culprit = c.ground_truth->culprit;
        bool found = false;
        for (const auto& [f, p] : c.child) {
          for (const auto& fn : p.functions) found = found || fn.name == culprit;
        }
        if (culprit.empty() || !found) v.problems.push_back(c.id + ": culprit '" + culprit + "' not in child");
      }
    } catch (const corpus::CorpusFormatError& e) {
      v.problems.push_back(e.what());
    }
  }
  return v;
}

}  // namespace catchjit::pipeline
