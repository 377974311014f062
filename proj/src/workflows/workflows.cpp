#include "workflows/workflows.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "minilang/parser.hpp"

namespace catchjit::workflows {

using corpus::ChangeKind;
using corpus::DiffCase;
using minilang::ErrorKind;
using minilang::Expr;
using minilang::ExprKind;
using minilang::FunctionDecl;
using minilang::OutcomeStatus;
using minilang::ProgramSet;
using minilang::Stmt;
using minilang::StmtKind;
using mutation::NodeScope;
using mutation::RiskCategory;

std::string_view to_string(CatchVerdict verdict) {
  switch (verdict) {
    case CatchVerdict::WeakCatch: return "WeakCatch";
    case CatchVerdict::CoincidentalHarden: return "CoincidentalHarden";
    case CatchVerdict::Invalid: return "Invalid";
    case CatchVerdict::ErrorOutcome: return "ErrorOutcome";
  }
  return "Invalid";
}

std::optional<CatchVerdict> parse_verdict(std::string_view text) {
  for (auto v : {CatchVerdict::WeakCatch, CatchVerdict::CoincidentalHarden, CatchVerdict::Invalid,
                 CatchVerdict::ErrorOutcome}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

CatchVerdict classify(const TestOutcome& parent_outcome, const TestOutcome& child_outcome) {
  if (parent_outcome.status != OutcomeStatus::Pass) return CatchVerdict::Invalid;
  switch (child_outcome.status) {
    case OutcomeStatus::Pass: return CatchVerdict::CoincidentalHarden;
    case OutcomeStatus::Fail: return CatchVerdict::WeakCatch;
    case OutcomeStatus::Error:
      return child_outcome.error_kind == ErrorKind::Exception ? CatchVerdict::WeakCatch : CatchVerdict::ErrorOutcome;
  }
  return CatchVerdict::ErrorOutcome;
}

int WorkflowResult::weak_catches() const {
  return static_cast<int>(std::count_if(tests.begin(), tests.end(),
                                        [](const CandidateTest& t) { return t.verdict == CatchVerdict::WeakCatch; }));
}

namespace {

std::vector<std::string> all_functions(const ProgramSet& programs) {
  std::vector<std::string> out;
  for (const auto& [file, program] : programs) {
    for (const auto& fn : program.functions) out.push_back(fn.name);
  }
  return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

CandidateTest run_both(const DiffCase& c, TestCase test, std::int64_t step_limit) {
  CandidateTest ct;
  ct.parent_outcome = minilang::execute(c.parent, test, step_limit);
  ct.child_outcome = minilang::execute(c.child, test, step_limit);
  ct.verdict = classify(ct.parent_outcome, ct.child_outcome);
  ct.test = std::move(test);
  return ct;
}

generation::GenerationResult generate(RunContext& ctx, const generation::GenerationContext& gctx, int budget,
                                      WorkflowResult& result) {
  auto g = generation::generate_via_backend(ctx.backend, gctx, budget, ctx.fallback);
  result.dropped_proposals += g.dropped;
  if (g.fallback_used) {
    result.backend_fallback = true;
    result.notices.push_back(g.notice);
  }
  return g;
}

std::string workflow_slug(WorkflowTag tag) {
  switch (tag) {
    case WorkflowTag::CoincidentalCatch: return "cc";
    case WorkflowTag::HardenNoCoverage: return "hnc";
    case WorkflowTag::HardenMutationGuided: return "hmg";
    case WorkflowTag::DodgyDiff: return "dd";
    case WorkflowTag::IntentAware: return "ia";
  }
  return "t";
}

MutantRecord record_of(const mutation::Mutant& m) {
  return {m.id, m.operator_id, m.file, m.function, m.node_id, m.description, m.risk_id, 0};
}

// Mutants -> kill-filtered tests, deduplicated by source, numbered in order.
void mutation_guided_tests(const DiffCase& c, const std::vector<mutation::Mutant>& mutants, WorkflowTag tag,
                           int per_mutant, int total_cap, RunContext& ctx, WorkflowResult& result) {
  std::set<std::string> seen;
  int n = 0;
  for (const auto& m : mutants) {
    MutantRecord rec = record_of(m);
    if (total_cap > 0 && n >= total_cap) {
      result.mutants.push_back(rec);
      continue;
    }
    generation::GenerationContext g;
    g.target_programs = c.parent;
    g.entry_points = {m.function};
    for (const auto& caller : generation::callers_of(c.parent, m.function)) push_unique(g.entry_points, caller);
    g.mutant = m;
    g.workflow = tag;
    g.id_prefix = c.id + "/" + workflow_slug(tag) + "/m";
    g.step_limit = ctx.budgets.step_limit;
    auto gen = generate(ctx, g, ctx.budgets.tests_per_case, result);
    auto killed = generation::mutation_guided_filter(gen.tests, c.parent, m, ctx.budgets.step_limit);
    int kept = 0;
    for (auto& k : killed) {
      if (kept >= per_mutant || (total_cap > 0 && n >= total_cap)) break;
      if (!seen.insert(k.test.source).second) continue;
      ++kept;
      ++n;
      k.test.id = c.id + "/" + workflow_slug(tag) + "/" + std::to_string(n);
      result.tests.push_back(run_both(c, std::move(k.test), ctx.budgets.step_limit));
    }
    rec.killing_tests = static_cast<int>(killed.size());
    result.mutants.push_back(rec);
  }
}

// ---- risk heuristic ----------------------------------------------------

struct Position {
  const Expr* parent_expr = nullptr;
  const Expr* child_expr = nullptr;
  const std::vector<Stmt>* parent_block = nullptr;
  const std::vector<Stmt>* child_block = nullptr;
  const Stmt* parent_stmt = nullptr;
  const Stmt* child_stmt = nullptr;
  NodeScope scope = NodeScope::Any;
};

bool same_label(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.int_value == b.int_value && a.bool_value == b.bool_value && a.text == b.text &&
         a.keys == b.keys && a.args.size() == b.args.size();
}

void diff_expr(const Expr& a, const Expr& b, NodeScope scope, std::vector<Position>& out) {
  if (!same_label(a, b)) {
    Position p;
    p.parent_expr = &a;
    p.child_expr = &b;
    p.scope = scope;
    out.push_back(p);
    return;
  }
  for (size_t i = 0; i < a.args.size(); ++i) diff_expr(a.args[i], b.args[i], scope, out);
}

void diff_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b, std::vector<Position>& out);

void diff_stmt(const Stmt& a, const Stmt& b, std::vector<Position>& out) {
  bool same = a.kind == b.kind && a.name == b.name && a.has_else == b.has_else && a.exprs.size() == b.exprs.size();
  if (!same) {
    Position p;
    p.parent_stmt = &a;
    p.child_stmt = &b;
    out.push_back(p);
    return;
  }
  NodeScope scope = a.kind == StmtKind::While ? NodeScope::LoopCondition
                    : a.kind == StmtKind::If  ? NodeScope::IfCondition
                    : a.kind == StmtKind::Return ? NodeScope::Return
                                                 : NodeScope::Any;
  for (size_t i = 0; i < a.exprs.size(); ++i) diff_expr(a.exprs[i], b.exprs[i], scope, out);
  diff_block(a.body, b.body, out);
  diff_block(a.else_body, b.else_body, out);
}

void diff_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b, std::vector<Position>& out) {
  if (a.size() != b.size()) {
    Position p;
    p.parent_block = &a;
    p.child_block = &b;
    out.push_back(p);
    return;
  }
  for (size_t i = 0; i < a.size(); ++i) diff_stmt(a[i], b[i], out);
}

bool is_relational(const std::string& op) {
  return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
}

bool has_kind(const std::vector<Stmt>& stmts, StmtKind kind) {
  for (const auto& s : stmts) {
    if (s.kind == kind || has_kind(s.body, kind) || has_kind(s.else_body, kind)) return true;
  }
  return false;
}

int count_kind(const std::vector<Stmt>& stmts, StmtKind kind) {
  int n = 0;
  for (const auto& s : stmts) n += (s.kind == kind) + count_kind(s.body, kind) + count_kind(s.else_body, kind);
  return n;
}

bool container_expr(const Expr& e) {
  if (e.kind == ExprKind::MapLit || e.kind == ExprKind::ListLit || e.kind == ExprKind::Index) return true;
  if (e.kind == ExprKind::Call) {
    static const std::set<std::string> c = {"keys", "has", "get", "set", "remove", "push", "pop", "first", "last"};
    return c.count(e.text) > 0;
  }
  return false;
}

bool boolean_expr(const Expr& e) {
  return e.kind == ExprKind::BoolLit || (e.kind == ExprKind::Unary && e.text == "!") ||
         (e.kind == ExprKind::Binary && (e.text == "&&" || e.text == "||"));
}

struct RiskSeed {
  RiskCategory category;
  NodeScope scope;
  std::string detail;
};

std::vector<RiskSeed> categorize(const Position& p) {
  std::vector<RiskSeed> out;
  if (p.parent_expr) {
    const Expr& a = *p.parent_expr;
    const Expr& b = *p.child_expr;
    bool ordering = a.kind == ExprKind::MapLit && b.kind == ExprKind::MapLit && a.keys.size() == b.keys.size() &&
                    std::is_permutation(a.keys.begin(), a.keys.end(), b.keys.begin());
    if (p.scope == NodeScope::LoopCondition) {
      out.push_back({RiskCategory::Boundary, NodeScope::LoopCondition, "loop bound"});
    } else if ((a.kind == ExprKind::Binary && is_relational(a.text)) || (b.kind == ExprKind::Binary && is_relational(b.text))) {
      out.push_back({RiskCategory::Boundary, p.scope, "comparison boundary"});
    } else if (a.kind == ExprKind::IntLit || b.kind == ExprKind::IntLit) {
      out.push_back({RiskCategory::Boundary, p.scope, "constant boundary"});
    } else if (boolean_expr(a) || boolean_expr(b)) {
      out.push_back({RiskCategory::Boolean, p.scope, "boolean logic"});
    } else if (ordering) {
      out.push_back({RiskCategory::Ordering, NodeScope::Any, "key order"});
    } else if (container_expr(a) || container_expr(b)) {
      out.push_back({RiskCategory::Container, NodeScope::Any, "container keys"});
    } else {
      out.push_back({RiskCategory::Other, NodeScope::Any, "computation"});
    }
    return out;
  }
  const std::vector<Stmt> one_parent = p.parent_stmt ? std::vector<Stmt>{*p.parent_stmt} : std::vector<Stmt>{};
  const std::vector<Stmt> one_child = p.child_stmt ? std::vector<Stmt>{*p.child_stmt} : std::vector<Stmt>{};
  const auto& pa = p.parent_block ? *p.parent_block : one_parent;
  const auto& ch = p.child_block ? *p.child_block : one_child;
  if (count_kind(ch, StmtKind::Throw) > count_kind(pa, StmtKind::Throw)) {
    out.push_back({RiskCategory::Exception, NodeScope::Any, "new failure path"});
  }
  int removed_inits = count_kind(pa, StmtKind::Let) + count_kind(pa, StmtKind::Assign) -
                      count_kind(ch, StmtKind::Let) - count_kind(ch, StmtKind::Assign);
  if (removed_inits > 0) out.push_back({RiskCategory::Null, NodeScope::Any, "missing initialization"});
  if (out.empty()) {
    bool loop = has_kind(pa, StmtKind::While) || has_kind(ch, StmtKind::While);
    out.push_back({loop ? RiskCategory::Boundary : RiskCategory::Other, NodeScope::Any,
                   loop ? "loop structure" : "control flow"});
  }
  return out;
}

std::string category_sentence(RiskCategory c, const std::string& fn, const std::string& detail) {
  switch (c) {
    case RiskCategory::Boundary: return "off-by-one in " + detail + " of " + fn;
    case RiskCategory::Boolean: return "boolean inversion in " + fn;
    case RiskCategory::Container: return "container contents or keys of " + fn + " may break (" + detail + ")";
    case RiskCategory::Null: return "value may become null in " + fn + " (" + detail + ")";
    case RiskCategory::Exception: return "unexpected exception from " + fn + " (" + detail + ")";
    case RiskCategory::Ordering: return "entry order produced by " + fn + " may change";
    case RiskCategory::Other: return "behavior change in " + fn + " (" + detail + ")";
  }
  return fn;
}

const FunctionDecl* find_fn(const ProgramSet& set, const std::string& file, const std::string& name) {
  auto it = set.find(file);
  return it == set.end() ? nullptr : it->second.find(name);
}

}  // namespace

std::vector<std::string> dodgy_diff_entries(const DiffCase& c, const corpus::Diff& diff) {
  std::vector<std::string> out;
  for (const auto& d : diff.changed_decls) {
    if (d.kind == ChangeKind::Added) continue;
    push_unique(out, d.function);
    for (const auto& caller : generation::callers_of(c.parent, d.function)) push_unique(out, caller);
  }
  if (out.empty()) out = all_functions(c.parent);
  return out;
}

WorkflowResult run_dodgy_diff(const DiffCase& c, RunContext& ctx) {
  WorkflowResult result;
  result.workflow = WorkflowTag::DodgyDiff;
  result.case_id = c.id;
  auto diff = corpus::compute_diff(c.parent, c.child);
  generation::GenerationContext g;
  g.target_programs = c.parent;
  g.entry_points = dodgy_diff_entries(c, diff);
  g.workflow = WorkflowTag::DodgyDiff;
  g.id_prefix = c.id + "/dd";
  g.step_limit = ctx.budgets.step_limit;
  auto gen = generate(ctx, g, ctx.budgets.tests_per_case, result);
  for (auto& t : gen.tests) {
    // Child as the mutant: emitted tests must pass on the parent.
    auto ct = run_both(c, std::move(t), ctx.budgets.step_limit);
    if (ct.verdict == CatchVerdict::Invalid) {
      ++result.dropped_proposals;
      continue;
    }
    result.tests.push_back(std::move(ct));
  }
  return result;
}

IntentDescription default_intent(const DiffCase& c, const corpus::Diff& diff) {
  IntentDescription intent;
  intent.title = c.title;
  intent.summary = c.summary;
  intent.changed_decls = diff.changed_decls;
  std::vector<std::string> parts;
  if (!c.title.empty()) parts.push_back("Diff titled \"" + c.title + "\".");
  if (!c.summary.empty()) parts.push_back("Summary: " + c.summary + (c.summary.back() == '.' ? "" : "."));
  if (!diff.changed_decls.empty()) {
    std::string changes = "Changes:";
    for (size_t i = 0; i < diff.changed_decls.size(); ++i) {
      const auto& d = diff.changed_decls[i];
      std::string kind(corpus::to_string(d.kind));
      kind[0] = static_cast<char>(std::tolower(kind[0]));
      changes += (i ? ", " : " ") + kind + " " + d.function + " (" + d.file + ")";
    }
    parts.push_back(changes + ".");
  }
  for (size_t i = 0; i < parts.size(); ++i) intent.text += (i ? " " : "") + parts[i];
  return intent;
}

IntentDescription infer_intent(const DiffCase& c, generation::GeneratorBackend& backend) {
  auto diff = corpus::compute_diff(c.parent, c.child);
  IntentDescription intent = default_intent(c, diff);
  if (auto text = backend.infer_intent(c, diff)) intent.text = *text;
  return intent;
}

std::vector<Risk> heuristic_risks(const DiffCase& c, const corpus::Diff& diff, int cap) {
  struct Key {
    RiskCategory category;
    std::string file, function;
    NodeScope scope;
    bool operator<(const Key& o) const {
      return std::tie(category, file, function, scope) < std::tie(o.category, o.file, o.function, o.scope);
    }
  };
  std::map<Key, std::string> found;
  for (const auto& d : diff.changed_decls) {
    if (d.kind == ChangeKind::Modified) {
      const FunctionDecl* a = find_fn(c.parent, d.file, d.function);
      const FunctionDecl* b = find_fn(c.child, d.file, d.function);
      if (!a || !b) continue;
      std::vector<Position> positions;
      if (a->params != b->params) {
        found.emplace(Key{RiskCategory::Other, d.file, d.function, NodeScope::Any}, "signature");
      }
      diff_block(a->body, b->body, positions);
      for (const auto& p : positions) {
        for (const auto& s : categorize(p)) found.emplace(Key{s.category, d.file, d.function, s.scope}, s.detail);
      }
    } else if (d.kind == ChangeKind::Added) {
      found.emplace(Key{RiskCategory::Other, d.file, d.function, NodeScope::Any}, "new function");
    } else {
      found.emplace(Key{RiskCategory::Null, d.file, d.function, NodeScope::Any}, "removed function");
    }
  }
  std::vector<Risk> out;
  for (const auto& [key, detail] : found) {
    if (static_cast<int>(out.size()) >= cap) break;
    Risk r;
    r.id = "R" + std::to_string(out.size() + 1);
    r.category = key.category;
    r.scope = key.scope;
    r.locations.push_back({key.file, key.function});
    r.description = category_sentence(key.category, key.function, detail);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Risk> enumerate_risks(const IntentDescription& intent, const DiffCase& c, const corpus::Diff& diff,
                                  generation::GeneratorBackend& backend, int cap) {
  if (cap <= 0) throw std::invalid_argument("risk cap must be positive");
  if (auto risks = backend.enumerate_risks(intent, diff, cap)) {
    if (static_cast<int>(risks->size()) > cap) risks->resize(static_cast<size_t>(cap));
    return *risks;
  }
  return heuristic_risks(c, diff, cap);
}

WorkflowResult run_intent_aware(const DiffCase& c, RunContext& ctx) {
  WorkflowResult result;
  result.workflow = WorkflowTag::IntentAware;
  result.case_id = c.id;
  auto diff = corpus::compute_diff(c.parent, c.child);
  IntentDescription intent = default_intent(c, diff);
  try {
    if (auto text = ctx.backend.infer_intent(c, diff)) intent.text = *text;
  } catch (const generation::BackendUnavailable& e) {
    if (!ctx.fallback) throw;
    result.backend_fallback = true;
    result.notices.push_back(std::string(e.what()) + "; intent from template");
  }
  result.intent = intent;
  std::vector<Risk> risks;
  try {
    risks = enumerate_risks(intent, c, diff, ctx.backend, ctx.budgets.risks_per_case);
  } catch (const generation::BackendUnavailable& e) {
    if (!ctx.fallback) throw;
    result.backend_fallback = true;
    result.notices.push_back(std::string(e.what()) + "; risks from heuristic");
    risks = heuristic_risks(c, diff, ctx.budgets.risks_per_case);
  }
  result.risks = risks;
  std::vector<mutation::Mutant> mutants;
  for (const auto& r : risks) {
    if (static_cast<int>(mutants.size()) >= ctx.budgets.mutants_per_case) break;
    try {
      auto ms = mutation::materialize_risk(r, c.parent, mutation::default_operators(), ctx.budgets.mutants_per_risk);
      for (auto& m : ms) {
        if (static_cast<int>(mutants.size()) >= ctx.budgets.mutants_per_case) break;
        mutants.push_back(std::move(m));
      }
    } catch (const mutation::RiskUnmaterializable& e) {
      result.notices.push_back(std::string("RiskUnmaterializable: ") + e.what());
    }
  }
  mutation_guided_tests(c, mutants, WorkflowTag::IntentAware, ctx.budgets.tests_per_mutant, 0, ctx, result);
  return result;
}

HardenResults run_harden_baselines(const DiffCase& c, RunContext& ctx) {
  HardenResults out;
  auto& a = out.no_coverage;
  a.workflow = WorkflowTag::HardenNoCoverage;
  a.case_id = c.id;
  generation::GenerationContext g;
  g.target_programs = c.parent;
  g.entry_points = all_functions(c.parent);
  g.workflow = WorkflowTag::HardenNoCoverage;
  g.id_prefix = c.id + "/hnc";
  g.step_limit = ctx.budgets.step_limit;
  auto gen = generate(ctx, g, ctx.budgets.tests_per_case, a);
  for (auto& t : gen.tests) {
    auto ct = run_both(c, std::move(t), ctx.budgets.step_limit);
    if (ct.verdict == CatchVerdict::Invalid) {
      ++a.dropped_proposals;
      continue;
    }
    a.tests.push_back(std::move(ct));
  }

  auto& b = out.mutation_guided;
  b.workflow = WorkflowTag::HardenMutationGuided;
  b.case_id = c.id;
  auto mutants = mutation::enumerate_mutants(c.parent, mutation::default_operators(), ctx.budgets.mutants_per_case);
  // Spread the capped test budget over the parent: one function at a time.
  std::map<std::pair<std::string, std::string>, std::vector<mutation::Mutant>> by_function;
  std::vector<std::pair<std::string, std::string>> order;
  for (auto& m : mutants) {
    auto key = std::make_pair(m.file, m.function);
    if (!by_function.count(key)) order.push_back(key);
    by_function[key].push_back(std::move(m));
  }
  std::vector<mutation::Mutant> interleaved;
  for (size_t round = 0; interleaved.size() < mutants.size(); ++round) {
    for (const auto& key : order) {
      auto& list = by_function[key];
      if (round < list.size()) interleaved.push_back(std::move(list[round]));
    }
  }
  mutation_guided_tests(c, interleaved, WorkflowTag::HardenMutationGuided, ctx.budgets.harden_tests_per_mutant,
                        ctx.budgets.harden_mutation_cap, ctx, b);
  return out;
}

CoincidentalCatchView coincidental_catch_view(const HardenResults& harden, const DiffCase& c, std::int64_t step_limit) {
  CoincidentalCatchView view;
  view.tests_considered = static_cast<int>(harden.no_coverage.tests.size() + harden.mutation_guided.tests.size());
  for (const auto& t : harden.no_coverage.tests) {
    if (t.child_outcome.passed()) continue;
    // Rescue: re-check pass on parent.
    auto parent = minilang::execute(c.parent, t.test, step_limit);
    if (!parent.passed() || classify(parent, t.child_outcome) != CatchVerdict::WeakCatch) continue;
    CandidateTest ct = t;
    ct.test.provenance.workflow = WorkflowTag::CoincidentalCatch;
    view.catches.push_back(std::move(ct));
  }
  return view;
}

std::string test_shape(const TestCase& test) {
  std::string canonical = test.source;
  try {
    canonical = minilang::print_statements(minilang::parse_statements(test.source));
  } catch (const minilang::SyntaxError&) {
  }
  std::string entry = test.entry.empty() ? generation::assertion_entry(test.source) : test.entry;
  return entry + "\n" + canonical;
}

std::vector<TestCase> harvest_hardening(const std::vector<WorkflowResult>& results) {
  std::vector<TestCase> out;
  std::set<std::string> seen;
  for (const auto& r : results) {
    for (const auto& t : r.tests) {
      if (t.verdict != CatchVerdict::CoincidentalHarden) continue;
      if (seen.insert(test_shape(t.test)).second) out.push_back(t.test);
    }
  }
  return out;
}

}  // namespace catchjit::workflows
