#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "pipeline/pipeline.hpp"

namespace catchjit::pipeline {

using nlohmann::json;
using stats::GoodBadCell;
using stats::MatrixKind;
using stats::PermutationColumn;
using stats::Polarity;
using stats::ScoredItem;
using stats::StatResult;
using stats::StatusMatrix;

namespace {

std::optional<double> score_of(const json& a, const std::string& assessor) {
  const json* v = nullptr;
  if (assessor == "RubFake") v = &a.at("rubfake").at("score");
  if (assessor == "TP Prob") v = &a.at("tp_prob");
  if (assessor == "Bucket Med") v = &a.at("bucket_med");
  if (!v || v->is_null()) return std::nullopt;
  return v->get<double>();
}

std::map<std::string, corpus::DiffStatus> case_statuses(const json& report) {
  std::map<std::string, corpus::DiffStatus> out;
  for (const char* key : {"cases", "external_cases"}) {
    if (!report.contains(key)) continue;
    for (const auto& c : report[key]) {
      out[c["id"].get<std::string>()] =
          corpus::parse_status(c["status"].get<std::string>()).value_or(corpus::DiffStatus::UNLABELLED);
    }
  }
  return out;
}

std::vector<std::string> workflow_order(const json& report) {
  std::vector<std::string> order;
  for (auto tag : kAllWorkflows) order.emplace_back(to_string(tag));
  order.emplace_back("External");
  std::set<std::string> present;
  for (const auto& a : report.at("assessments")) {
    for (const auto& w : a["workflows"]) present.insert(w.get<std::string>());
  }
  std::vector<std::string> out;
  for (const auto& w : order) {
    if (present.count(w)) out.push_back(w);
  }
  return out;
}

std::string label_of(const std::optional<double>& s) {
  if (!s) return "None";
  if (*s > 0) return "TP";
  if (*s < 0) return "FP";
  return "None";
}

template <typename F>
stats::Agreement safe_agreement(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    return {std::nullopt, e.what()};
  }
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json stat_json(const StatResult& r) {
  return {{"statistic", r.statistic},
          {"available", r.available},
          {"value", r.value},
          {"p", opt_json(r.p_value)},
          {"effect", opt_json(r.effect)},
          {"bucket", r.bucket ? json(std::string(stats::abbrev(*r.bucket))) : json(nullptr)},
          {"direction", r.direction},
          {"n1", r.n1},
          {"n2", r.n2},
          {"rate1", r.rate1},
          {"rate2", r.rate2},
          {"note", r.note}};
}

json matrix_json(const StatusMatrix& m) {
  json cells = json::array();
  constexpr size_t k = std::size(stats::kMatrixStatuses);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      json c = stat_json(m.cells[i][j]);
      c["row"] = std::string(stats::status_abbrev(stats::kMatrixStatuses[i]));
      c["col"] = std::string(stats::status_abbrev(stats::kMatrixStatuses[j]));
      cells.push_back(c);
    }
  }
  return {{"title", m.title},
          {"kind", m.kind == MatrixKind::Rate ? "rate" : "score"},
          {"n", m.n},
          {"rate", m.rate},
          {"cells", cells},
          {"good_vs_bad", stat_json(m.good_vs_bad)}};
}

json permutation_json(const stats::PermutationResult& r) {
  return {{"iterations", r.iterations},
          {"significant", r.significant},
          {"negligible", r.negligible},
          {"small", r.small},
          {"medium", r.medium},
          {"large", r.large},
          {"prob_ge_l", r.prob_ge_l()},
          {"prob_ge_m", r.prob_ge_m()},
          {"prob_ge_s", r.prob_ge_s()},
          {"prob_ge_n", r.prob_ge_n()}};
}

struct PairStat {
  std::string a, b;
  stats::Agreement kappa;
  stats::Correlation spearman, kendall;
  size_t n = 0;
};

struct Computed {
  std::vector<GoodBadCell> tp, fp;
  std::vector<StatusMatrix> matrices;
  std::vector<PairStat> pairs;
  stats::Agreement fleiss, krippendorff;
  size_t rated_items = 0;
  std::vector<PermutationColumn> permutation;
  std::string permutation_note;
  std::int64_t iterations = 0;
  int min_group = 0, max_group = 0;
  bool labelled = false;
};

Computed compute(const json& report) {
  Computed out;
  auto items = scored_items(report);
  for (const auto& i : items) out.labelled = out.labelled || i.status != corpus::DiffStatus::UNLABELLED;
  out.tp = stats::compare_good_bad(items, Polarity::TP);
  out.fp = stats::compare_good_bad(items, Polarity::FP);

  for (const auto& wf : workflow_order(report)) {
    for (const auto* as : kAssessorNames) {
      std::vector<ScoredItem> subset;
      for (const auto& i : items) {
        if (i.workflow == wf && i.assessor == as) subset.push_back(i);
      }
      out.matrices.push_back(
          stats::status_matrix(subset, MatrixKind::Rate, Polarity::TP, wf + " / " + as + ": TP rate by diff status"));
    }
  }
  const auto& assessments = report.at("assessments");
  std::map<std::string, corpus::DiffStatus> status = case_statuses(report);
  for (const auto* as : kAssessorNames) {
    std::vector<ScoredItem> pooled;
    for (const auto& a : assessments) {
      auto st = status.find(a["case_id"].get<std::string>());
      pooled.push_back({a["case_id"].get<std::string>(),
                        st == status.end() ? corpus::DiffStatus::UNLABELLED : st->second, "All", as, score_of(a, as)});
    }
    out.matrices.push_back(
        stats::status_matrix(pooled, MatrixKind::Score, Polarity::TP, std::string("All / ") + as + ": scores by diff status"));
  }

  constexpr size_t k = std::size(kAssessorNames);
  stats::RatingMatrix ratings;
  std::vector<std::vector<std::optional<double>>> scores(k);
  for (const auto& a : assessments) {
    std::vector<std::optional<std::string>> row;
    for (size_t j = 0; j < k; ++j) {
      auto s = score_of(a, kAssessorNames[j]);
      scores[j].push_back(s);
      row.push_back(s ? std::optional<std::string>(label_of(s)) : std::nullopt);
    }
    ratings.push_back(row);
  }
  stats::RatingMatrix complete;
  for (const auto& row : ratings) {
    if (std::all_of(row.begin(), row.end(), [](const auto& c) { return c.has_value(); })) complete.push_back(row);
  }
  out.rated_items = complete.size();
  out.fleiss = safe_agreement([&] { return stats::fleiss_kappa(complete); });
  out.krippendorff = safe_agreement([&] { return stats::krippendorff_alpha(ratings); });
  for (size_t x = 0; x < k; ++x) {
    for (size_t y = x + 1; y < k; ++y) {
      PairStat p;
      p.a = kAssessorNames[x];
      p.b = kAssessorNames[y];
      std::vector<std::string> l1, l2;
      std::vector<double> s1, s2;
      for (size_t i = 0; i < scores[x].size(); ++i) {
        if (!scores[x][i] || !scores[y][i]) continue;
        l1.push_back(label_of(scores[x][i]));
        l2.push_back(label_of(scores[y][i]));
        s1.push_back(*scores[x][i]);
        s2.push_back(*scores[y][i]);
      }
      p.n = s1.size();
      p.kappa = safe_agreement([&] { return stats::cohens_kappa(l1, l2); });
      p.spearman = stats::spearman_rho(s1, s2);
      p.kendall = stats::kendall_tau_b(s1, s2);
      out.pairs.push_back(p);
    }
  }

  const auto& cfg = report.at("config");
  stats::PermutationConfig pc;
  pc.iterations = cfg.at("permutation").at("iterations").get<std::int64_t>();
  pc.min_group = cfg.at("permutation").at("min_group").get<int>();
  pc.max_group = cfg.at("permutation").at("max_group").get<int>();
  pc.seed = cfg.at("seed").get<std::uint64_t>();
  out.iterations = pc.iterations;
  out.min_group = pc.min_group;
  out.max_group = pc.max_group;
  for (size_t j = 0; j < k; ++j) {
    std::vector<double> pool;
    for (const auto& s : scores[j]) {
      if (s) pool.push_back(*s);
    }
    if (pool.size() < 2 * static_cast<size_t>(pc.max_group)) {
      out.permutation_note = "pool of " + std::to_string(pool.size()) + " scores is smaller than twice the largest group (" +
                             std::to_string(pc.max_group) + ")";
      out.permutation.clear();
      break;
    }
    PermutationColumn col;
    col.assessor = kAssessorNames[j];
    pc.polarity = Polarity::TP;
    col.tp = stats::permutation_sense_check(pool, pc);
    pc.polarity = Polarity::FP;
    col.fp = stats::permutation_sense_check(pool, pc);
    out.permutation.push_back(col);
  }
  return out;
}

json agreement_json(const stats::Agreement& a) {
  json j = {{"value", opt_json(a.value)}, {"flag", a.flag}};
  j["label"] = a.value ? json(std::string(stats::landis_koch(*a.value))) : json(nullptr);
  return j;
}

json correlation_json(const stats::Correlation& c) {
  return {{"coefficient", opt_json(c.coefficient)}, {"p", opt_json(c.p)}, {"flag", c.flag}};
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

std::string agreement_text(const stats::Agreement& a) {
  if (!a.value) return "N/A" + (a.flag.empty() ? std::string() : " (" + a.flag + ")");
  return fixed(*a.value) + " (" + std::string(stats::landis_koch(*a.value)) + ")";
}

std::string correlation_text(const stats::Correlation& c) {
  if (!c.coefficient) return "N/A" + (c.flag.empty() ? std::string() : " (" + c.flag + ")");
  return fixed(*c.coefficient) + " p=" + (c.p ? stats::format_p(*c.p) : std::string("N/A"));
}

}  // namespace

std::vector<ScoredItem> scored_items(const json& report) {
  auto status = case_statuses(report);
  std::vector<ScoredItem> items;
  for (const auto& wf : workflow_order(report)) {
    for (const auto& a : report.at("assessments")) {
      const auto& memberships = a.at("workflows");
      if (std::find(memberships.begin(), memberships.end(), wf) == memberships.end()) continue;
      auto case_id = a.at("case_id").get<std::string>();
      auto st = status.find(case_id);
      for (const auto* as : kAssessorNames) {
        items.push_back({case_id, st == status.end() ? corpus::DiffStatus::UNLABELLED : st->second, wf, as,
                         score_of(a, as)});
      }
    }
  }
  return items;
}

json compute_stats(const json& report) {
  auto c = compute(report);
  json good_bad = {{"tp", json::array()}, {"fp", json::array()}};
  for (const auto* cells : {&c.tp, &c.fp}) {
    auto& dst = good_bad[cells == &c.tp ? "tp" : "fp"];
    for (const auto& cell : *cells) {
      json j = stat_json(cell.result);
      j["workflow"] = cell.workflow;
      j["assessor"] = cell.assessor;
      dst.push_back(j);
    }
  }
  json matrices = json::array();
  for (const auto& m : c.matrices) matrices.push_back(matrix_json(m));
  json pairs = json::array();
  for (const auto& p : c.pairs) {
    pairs.push_back({{"a", p.a},
                     {"b", p.b},
                     {"n", p.n},
                     {"cohens_kappa", agreement_json(p.kappa)},
                     {"spearman", correlation_json(p.spearman)},
                     {"kendall_tau_b", correlation_json(p.kendall)}});
  }
  json perm = json::array();
  for (const auto& col : c.permutation) {
    perm.push_back({{"assessor", col.assessor}, {"tp", permutation_json(col.tp)}, {"fp", permutation_json(col.fp)}});
  }
  return {{"labelled", c.labelled},
          {"good_bad", good_bad},
          {"status_matrices", matrices},
          {"agreement",
           {{"items_fully_rated", c.rated_items},
            {"fleiss_kappa", agreement_json(c.fleiss)},
            {"krippendorff_alpha", agreement_json(c.krippendorff)}}},
          {"pairs", pairs},
          {"permutation",
           {{"iterations", c.iterations},
            {"min_group", c.min_group},
            {"max_group", c.max_group},
            {"columns", perm},
            {"note", c.permutation_note}}}};
}

std::string render_stats(const json& report) {
  if (!report.contains("assessments") || report["assessments"].empty()) {
    throw ReportError("report has no assessments");
  }
  auto c = compute(report);
  std::ostringstream os;
  if (!c.labelled) os << "No labelled diffs: comparison tables are N/A.\n\n";
  os << "Good (G) vs Bad (B) diffs, TP and FP assessment rates\n";
  os << stats::render_good_bad_table(c.tp, c.fp) << "\n";
  for (const auto& m : c.matrices) os << stats::render_status_matrix(m) << "\n";
  os << "Agreement on TP/FP/None labels (" << c.rated_items << " fully rated catches)\n";
  os << pad("", 32) << pad("Cohen's kappa", 22) << pad("Spearman rho", 22) << "Kendall tau-b\n";
  for (const auto& p : c.pairs) {
    os << pad(p.a + " vs " + p.b + " n=" + std::to_string(p.n), 32) << pad(agreement_text(p.kappa), 22)
       << pad(correlation_text(p.spearman), 22) << correlation_text(p.kendall) << "\n";
  }
  os << "Fleiss' kappa: " << agreement_text(c.fleiss) << "\n";
  os << "Krippendorff's alpha: " << agreement_text(c.krippendorff) << "\n";
  os << "Labels: Pr poor, Sl slight, Fr fair, Mod moderate, Sub substantial, AP almost perfect\n\n";
  if (c.permutation.empty()) {
    os << "Permutation sense check skipped: " << c.permutation_note << "\n";
  } else {
    os << stats::render_permutation_table(
        c.permutation, "Randomly shuffled data, " + std::to_string(c.iterations) + " iterations, group sizes " +
                           std::to_string(c.min_group) + "-" + std::to_string(c.max_group));
  }
  return os.str();
}

std::string render_assessment(const json& report, const std::string& id) {
  const json* found = nullptr;
  for (const auto& a : report.at("assessments")) {
    if (a.at("id") == id) found = &a;
  }
  if (!found) throw ReportError("no weak catch with id '" + id + "' in report");
  const auto& a = *found;
  std::ostringstream os;
  if (a.at("decision") == "AutoDiscard") {
    os << "*** AUTO-DISCARDED: " << a.at("filter_clause").get<std::string>() << " ***\n\n";
  }
  os << "Weak catch " << id << " (case " << a.at("case_id").get<std::string>() << ")\n";
  os << "Workflows: ";
  for (size_t i = 0; i < a.at("workflows").size(); ++i) {
    os << (i ? ", " : "") << a["workflows"][i].get<std::string>();
  }
  os << "\nParent: " << a.at("parent_outcome").get<std::string>() << "  Child: "
     << a.at("child_outcome").get<std::string>() << "\n";
  const auto& f = a.at("failure");
  if (f.is_object()) {
    auto kind = f.at("kind").get<std::string>();
    if (kind == "assert_fail") {
      os << "Assertion: " << f.at("expression").get<std::string>() << "\n  expected "
         << f.at("expected").get<std::string>() << "\n  actual   " << f.at("actual").get<std::string>() << "\n";
    } else if (kind == "exception") {
      os << "Exception: " << f.at("exception_kind").get<std::string>() << " in "
         << f.at("function").get<std::string>() << ": " << f.at("message").get<std::string>() << "\n";
    } else if (kind == "runner") {
      os << "Runner event: " << f.at("event").get<std::string>() << ": " << f.at("message").get<std::string>() << "\n";
    }
  }
  os << "\nTest:\n" << a.at("test_source").get<std::string>();
  if (os.str().back() != '\n') os << "\n";
  os << "\nScores\n";
  os << "  RubFake     " << fixed(a.at("rubfake").at("score").get<double>()) << "\n";
  auto opt_field = [&](const char* key) {
    return a.at(key).is_null() ? std::string("N/A") : fixed(a.at(key).get<double>());
  };
  os << "  TP Prob     " << opt_field("tp_prob") << "\n";
  os << "  Bucket Med  " << opt_field("bucket_med") << "\n";
  os << "  Rank key    " << fixed(a.at("final_rank_key").get<double>()) << "\n";
  const auto& cost = a.at("rubfake").at("dismissal_cost");
  if (!cost.is_null()) os << "  Dismissal   " << cost.get<std::string>() << "\n";
  os << "  Decision    " << a.at("decision").get<std::string>() << "\n";
  os << "\nFired patterns\n";
  if (a.at("rubfake").at("fired").empty()) os << "  (none)\n";
  for (const auto& r : a.at("rubfake").at("fired")) {
    os << "  " << r.at("rule").get<std::string>() << " [" << r.at("polarity").get<std::string>() << ", "
       << r.at("likelihood").get<std::string>() << "]\n";
    for (const auto& e : r.at("evidence")) {
      os << "    " << e.at("source").get<std::string>() << ": " << e.at("span").get<std::string>() << "\n";
    }
  }
  os << "\nJudges\n";
  const auto& judges = a.at("judges");
  const auto& rationales = a.at("rationales");
  const auto& buckets = a.at("bucket_scores");
  for (size_t i = 0; i < judges.size(); ++i) {
    os << "  " << judges[i].get<std::string>();
    if (i < buckets.size()) os << " bucket " << fixed(buckets[i].get<double>(), 0);
    if (i < rationales.size()) os << ": " << rationales[i].get<std::string>();
    os << "\n";
  }
  for (const auto& e : a.at("judge_failures")) os << "  failed: " << e.get<std::string>() << "\n";
  os << "\n" << a.at("reach_out").get<std::string>() << "\n";
  return os.str();
}

}  // namespace catchjit::pipeline
