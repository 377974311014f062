#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "assessors/assessors.hpp"
#include "pipeline/config.hpp"
#include "stats/stats.hpp"

namespace catchjit::pipeline {

inline constexpr const char* kReportSchema = "catchjit-report/1";

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs the configured workflows, assessment, ranking and statistics.
// Throws ConfigError, CorpusError or BackendFailure.
nlohmann::json run_pipeline(const RunConfig& config);

nlohmann::json read_report(const std::string& path);
void write_report(const nlohmann::json& report, const std::string& path);
// The report with the timestamp removed, serialized.
std::string canonical_report_text(const nlohmann::json& report);

// Mismatches between the summary counters and the per-case records.
std::vector<std::string> check_report(const nlohmann::json& report);

// "... used to evaluate to true, but now evaluates to false; is that expected?"
std::string reach_out_sentence(const assessors::CatchBundle& bundle);

// Human-readable detail for one weak catch. Throws ReportError for an
// unknown id.
std::string render_assessment(const nlohmann::json& report, const std::string& id);

// One score per (assessment, workflow membership, assessor).
std::vector<stats::ScoredItem> scored_items(const nlohmann::json& report);

inline constexpr const char* kAssessorNames[] = {"RubFake", "TP Prob", "Bucket Med"};

// Statistics over a report's assessments. Permutation settings and seed
// come from the report's config echo.
nlohmann::json compute_stats(const nlohmann::json& report);
// Tables 5-10 shapes. Throws ReportError when the report has no assessments.
std::string render_stats(const nlohmann::json& report);

// Parses unified diff text: file headers, @@ ranges, -/+ lines.
corpus::Diff parse_unified_diff(const std::string& text);

struct CorpusValidation {
  int cases = 0;
  std::vector<std::string> problems;
};
CorpusValidation validate_corpus(const std::string& path);

}  // namespace catchjit::pipeline
