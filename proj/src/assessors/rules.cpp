#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "assessors/assessors.hpp"

namespace catchjit::assessors {

namespace detail {
extern const char* const kDefaultRulesJson;
}

using nlohmann::json;

std::string_view to_string(Polarity p) { return p == Polarity::FP ? "FP" : "TP"; }

std::string_view to_string(Likelihood l) {
  switch (l) {
    case Likelihood::High: return "high";
    case Likelihood::Medium: return "medium";
    case Likelihood::Low: return "low";
  }
  return "?";
}

std::string_view to_string(DismissalCost c) {
  switch (c) {
    case DismissalCost::Trivial: return "trivial";
    case DismissalCost::Moderate: return "moderate";
    case DismissalCost::Heavy: return "heavy";
  }
  return "?";
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::ExecutionLog: return "execution_log";
    case Source::TestCode: return "test_code";
    case Source::Diff: return "diff";
    case Source::Intent: return "intent";
  }
  return "?";
}

std::optional<DismissalCost> parse_dismissal_cost(std::string_view text) {
  for (auto c : {DismissalCost::Trivial, DismissalCost::Moderate, DismissalCost::Heavy}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

double magnitude(Likelihood l) {
  switch (l) {
    case Likelihood::High: return 0.9;
    case Likelihood::Medium: return 0.5;
    case Likelihood::Low: return 0.2;
  }
  return 0.0;
}

namespace {

const std::set<std::string> kTraceEvents = {"runner", "exception", "assert_fail", "null", "failure"};
const std::set<std::string> kShapes = {"", "bool_flip", "map_reordered"};

std::string regex_escape(const std::string& text) {
  static const std::string special = R"(\^$.|?*+()[]{}/-)";
  std::string out;
  for (char c : text) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

struct Bindings {
  std::string entry;
  std::vector<std::string> trace;
  std::vector<std::string> test;
};

// nullopt when a referenced binding is missing or empty.
std::optional<std::string> substitute(const std::string& pattern, const Bindings& b) {
  static const std::regex var(R"(\$\{(entry|trace\.(\d+)|test\.(\d+))\})");
  std::string out;
  auto begin = std::sregex_iterator(pattern.begin(), pattern.end(), var);
  size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(pattern, last, static_cast<size_t>(m.position(0)) - last);
    std::string value;
    if (m[1] == "entry") {
      value = b.entry;
    } else {
      const auto& list = m[2].matched ? b.trace : b.test;
      size_t n = std::stoul(m[2].matched ? m[2].str() : m[3].str());
      if (n < list.size()) value = list[n];
    }
    if (value.empty()) return std::nullopt;
    out += regex_escape(value);
    last = static_cast<size_t>(m.position(0) + m.length(0));
  }
  out.append(pattern, last);
  return out;
}

std::vector<std::string> groups(const std::smatch& m) {
  std::vector<std::string> out;
  for (size_t i = 0; i < m.size(); ++i) out.push_back(m[i].matched ? m[i].str() : "");
  return out;
}

bool search(const std::string& text, const std::string& pattern, std::smatch* m = nullptr) {
  std::regex re(pattern);
  if (m) return std::regex_search(text, *m, re);
  return std::regex_search(text, re);
}

std::string req_string(const json& j, const char* key, const std::string& rule) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw RuleFormatError("rule '" + rule + "': missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

std::string opt_string(const json& j, const char* key, const std::string& rule) {
  if (!j.contains(key)) return "";
  if (!j[key].is_string()) throw RuleFormatError("rule '" + rule + "': field '" + key + "' must be a string");
  return j[key].get<std::string>();
}

void check_regex(const std::string& pattern, const std::string& rule) {
  if (pattern.empty()) return;
  static const std::regex var(R"(\$\{[^}]*\})");
  std::string probe = std::regex_replace(pattern, var, "x");
  try {
    std::regex re(probe);
  } catch (const std::regex_error& e) {
    throw RuleFormatError("rule '" + rule + "': bad pattern '" + pattern + "': " + e.what());
  }
}

const minilang::TraceEvent* match_trace(const TraceMatcher& m, const minilang::ExecutionTrace& trace,
                                        std::vector<std::string>& captures) {
  using minilang::TraceEventKind;
  auto accept = [&](const minilang::TraceEvent& e) -> bool {
    std::string kind_text;
    if (m.event == "runner") {
      if (e.kind != TraceEventKind::Runner) return false;
      kind_text = e.name;
    } else if (m.event == "exception") {
      if (e.kind != TraceEventKind::Exception || e.caught) return false;
      kind_text = e.exception_kind;
    } else if (m.event == "assert_fail") {
      if (e.kind != TraceEventKind::AssertFail) return false;
    } else if (m.event == "null") {
      bool null_actual = e.kind == TraceEventKind::AssertFail && e.actual.is_null();
      bool null_access = e.kind == TraceEventKind::Exception && !e.caught && e.exception_kind == "null_access";
      if (!null_actual && !null_access) return false;
    } else if (m.event == "failure") {
      if (&e != trace.terminal()) return false;
      if (e.kind != TraceEventKind::AssertFail && e.kind != TraceEventKind::Exception) return false;
    } else {
      return false;
    }
    if (!m.kind.empty() && !search(kind_text, m.kind)) return false;
    if (m.shape == "bool_flip" &&
        !(e.expected.is_bool() && e.actual.is_bool() && e.expected.as_bool() != e.actual.as_bool())) {
      return false;
    }
    if (m.shape == "map_reordered" && !minilang::same_pairs_different_order(e.expected, e.actual)) return false;
    if (!m.expression.empty() && !search(e.expression_text, m.expression)) return false;
    if (!m.message.empty()) {
      std::smatch sm;
      if (!search(e.message, m.message, &sm)) return false;
      captures = groups(sm);
    } else {
      captures.clear();
    }
    return true;
  };
  for (const auto& e : trace.events) {
    if (accept(e)) return &e;
  }
  return nullptr;
}

std::vector<std::string> changed_lines(const corpus::Diff& diff) {
  std::vector<std::string> out;
  for (const auto& h : diff.hunks) {
    out.insert(out.end(), h.removed.begin(), h.removed.end());
    out.insert(out.end(), h.added.begin(), h.added.end());
  }
  return out;
}

}  // namespace

std::vector<PatternRule> parse_rules(const json& doc) {
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw RuleFormatError("rules document must be an object with a 'rules' array");
  }
  std::vector<PatternRule> out;
  std::set<std::string> seen;
  for (const auto& j : doc["rules"]) {
    if (!j.is_object()) throw RuleFormatError("rule entries must be objects");
    PatternRule r;
    r.id = req_string(j, "id", "?");
    if (r.id.empty() || !seen.insert(r.id).second) throw RuleFormatError("rule id empty or duplicated: '" + r.id + "'");
    auto pol = req_string(j, "polarity", r.id);
    if (pol == "FP") r.polarity = Polarity::FP;
    else if (pol == "TP") r.polarity = Polarity::TP;
    else throw RuleFormatError("rule '" + r.id + "': polarity must be FP or TP");
    auto lik = req_string(j, "likelihood", r.id);
    bool lik_ok = false;
    for (auto l : {Likelihood::High, Likelihood::Medium, Likelihood::Low}) {
      if (to_string(l) == lik) {
        r.likelihood = l;
        lik_ok = true;
      }
    }
    if (!lik_ok) throw RuleFormatError("rule '" + r.id + "': likelihood must be high, medium or low");
    if (!j.contains("sources") || !j["sources"].is_array() || j["sources"].empty()) {
      throw RuleFormatError("rule '" + r.id + "': 'sources' must be a non-empty array");
    }
    for (const auto& s : j["sources"]) {
      bool ok = false;
      for (auto src : {Source::ExecutionLog, Source::TestCode, Source::Diff, Source::Intent}) {
        if (s.is_string() && to_string(src) == s.get<std::string>()) {
          r.sources.push_back(src);
          ok = true;
        }
      }
      if (!ok) throw RuleFormatError("rule '" + r.id + "': unknown source " + s.dump());
    }
    r.description = opt_string(j, "description", r.id);
    if (j.contains("trace")) {
      const auto& t = j["trace"];
      if (!t.is_object()) throw RuleFormatError("rule '" + r.id + "': 'trace' must be an object");
      r.trace.event = req_string(t, "event", r.id);
      if (!kTraceEvents.count(r.trace.event)) {
        throw RuleFormatError("rule '" + r.id + "': unknown trace event '" + r.trace.event + "'");
      }
      r.trace.kind = opt_string(t, "kind", r.id);
      r.trace.message = opt_string(t, "message", r.id);
      r.trace.expression = opt_string(t, "expression", r.id);
      r.trace.shape = opt_string(t, "shape", r.id);
      if (!kShapes.count(r.trace.shape)) throw RuleFormatError("rule '" + r.id + "': unknown shape");
    }
    r.test_code = opt_string(j, "test_code", r.id);
    r.intent = opt_string(j, "intent", r.id);
    r.diff_absent = opt_string(j, "diff_absent", r.id);
    r.decl_unchanged = opt_string(j, "decl_unchanged", r.id);
    for (const auto* p : {&r.trace.kind, &r.trace.message, &r.trace.expression, &r.test_code, &r.intent,
                          &r.diff_absent}) {
      check_regex(*p, r.id);
    }
    if (j.contains("dismissal_cost")) {
      r.dismissal_cost = parse_dismissal_cost(req_string(j, "dismissal_cost", r.id));
      if (!r.dismissal_cost) throw RuleFormatError("rule '" + r.id + "': bad dismissal_cost");
    }
    auto declares = [&](Source s) { return std::find(r.sources.begin(), r.sources.end(), s) != r.sources.end(); };
    if (!r.trace.event.empty() && !declares(Source::ExecutionLog)) {
      throw RuleFormatError("rule '" + r.id + "': trace matcher without execution_log source");
    }
    if (!r.test_code.empty() && !declares(Source::TestCode)) {
      throw RuleFormatError("rule '" + r.id + "': test_code matcher without test_code source");
    }
    if (!r.intent.empty() && !declares(Source::Intent)) {
      throw RuleFormatError("rule '" + r.id + "': intent matcher without intent source");
    }
    if ((!r.diff_absent.empty() || !r.decl_unchanged.empty()) && !declares(Source::Diff)) {
      throw RuleFormatError("rule '" + r.id + "': diff matcher without diff source");
    }
    if (r.polarity == Polarity::TP) {
      if (!r.dismissal_cost) throw RuleFormatError("rule '" + r.id + "': TP rules need a dismissal_cost");
      if (r.test_code.empty() && r.intent.empty() && r.diff_absent.empty() && r.decl_unchanged.empty()) {
        throw RuleFormatError("rule '" + r.id + "': TP rules need a corroboration matcher");
      }
    } else if (r.dismissal_cost) {
      throw RuleFormatError("rule '" + r.id + "': dismissal_cost applies to TP rules only");
    }
    if (r.trace.event.empty() && r.test_code.empty() && r.intent.empty()) {
      throw RuleFormatError("rule '" + r.id + "': no positive matcher");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PatternRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuleFormatError("cannot open rules file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw RuleFormatError("rules file " + path + ": " + e.what());
  }
  return parse_rules(doc);
}

const std::string& default_rules_text() {
  static const std::string text = detail::kDefaultRulesJson;
  return text;
}

const std::vector<PatternRule>& default_rules() {
  static const std::vector<PatternRule> rules = parse_rules(json::parse(default_rules_text()));
  return rules;
}

std::string source_text(const CatchBundle& bundle, Source source) {
  switch (source) {
    case Source::ExecutionLog: return minilang::render_trace(bundle.child_outcome.trace);
    case Source::TestCode: return bundle.test.source;
    case Source::Diff: return bundle.diff.render();
    case Source::Intent: return bundle.intent.text;
  }
  return "";
}

std::optional<FiredRule> evaluate_rule(const CatchBundle& bundle, const PatternRule& rule) {
  FiredRule fired{rule.id, rule.polarity, rule.likelihood, {}};
  Bindings b;
  b.entry = bundle.test.entry.empty() ? generation::assertion_entry(bundle.test.source) : bundle.test.entry;

  if (!rule.trace.event.empty()) {
    const auto* e = match_trace(rule.trace, bundle.child_outcome.trace, b.trace);
    if (!e) return std::nullopt;
    fired.evidence.push_back({Source::ExecutionLog, minilang::render_event(*e)});
  }
  if (!rule.test_code.empty()) {
    auto pattern = substitute(rule.test_code, b);
    std::smatch m;
    if (!pattern || !search(bundle.test.source, *pattern, &m)) return std::nullopt;
    b.test = groups(m);
    fired.evidence.push_back({Source::TestCode, m[0].str()});
  }
  if (!rule.intent.empty()) {
    auto pattern = substitute(rule.intent, b);
    std::smatch m;
    if (!pattern || !search(bundle.intent.text, *pattern, &m)) return std::nullopt;
    fired.evidence.push_back({Source::Intent, m[0].str()});
  }
  if (!rule.diff_absent.empty()) {
    auto pattern = substitute(rule.diff_absent, b);
    if (!pattern) return std::nullopt;
    std::regex re(*pattern);
    for (const auto& line : changed_lines(bundle.diff)) {
      if (std::regex_search(line, re)) return std::nullopt;
    }
  }
  if (!rule.decl_unchanged.empty()) {
    auto name = substitute(rule.decl_unchanged, b);
    if (!name) return std::nullopt;
    // Substitution escapes; identifiers contain no special characters.
    if (bundle.diff.find_decl(*name)) return std::nullopt;
  }
  return fired;
}

RubfakeAssessment rubfake_assess(const CatchBundle& bundle, const std::vector<PatternRule>& rules) {
  RubfakeAssessment out;
  double max_tp = 0.0, max_fp = 0.0;
  bool any_tp = false, any_fp = false;
  for (const auto& rule : rules) {
    auto fired = evaluate_rule(bundle, rule);
    if (!fired) continue;
    double mag = magnitude(rule.likelihood);
    if (rule.polarity == Polarity::TP) {
      any_tp = true;
      max_tp = std::max(max_tp, mag);
      if (rule.dismissal_cost && (!out.dismissal_cost || *rule.dismissal_cost < *out.dismissal_cost)) {
        out.dismissal_cost = rule.dismissal_cost;
      }
    } else {
      any_fp = true;
      max_fp = std::max(max_fp, mag);
    }
    out.fired.push_back(std::move(*fired));
  }
  if (any_tp || any_fp) {
    out.score = std::clamp(max_tp - max_fp, -1.0, 1.0);
    if (any_tp && any_fp && max_tp == max_fp) out.score = kTieScore;
  }
  return out;
}

bool evidence_sound(const CatchBundle& bundle, const RubfakeAssessment& assessment) {
  for (const auto& f : assessment.fired) {
    for (const auto& e : f.evidence) {
      if (e.span.empty() || source_text(bundle, e.source).find(e.span) == std::string::npos) return false;
    }
  }
  return true;
}

}  // namespace catchjit::assessors
