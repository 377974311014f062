#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minilang/ast.hpp"

namespace catchjit::corpus {

using minilang::ProgramSet;

enum class DiffStatus { CLOSED, ACCEPTED, ABANDONED, CHANGES_PLANNED, NEEDS_REVISION, REVERTED, UNLABELLED };

inline constexpr DiffStatus kAllStatuses[] = {
    DiffStatus::CLOSED,         DiffStatus::ACCEPTED, DiffStatus::ABANDONED,  DiffStatus::CHANGES_PLANNED,
    DiffStatus::NEEDS_REVISION, DiffStatus::REVERTED, DiffStatus::UNLABELLED,
};

std::string_view to_string(DiffStatus status);
std::optional<DiffStatus> parse_status(std::string_view text);
bool is_good(DiffStatus status);
bool is_bad(DiffStatus status);

struct GroundTruth {
  bool buggy = false;
  std::string description;
  std::string culprit;  // function that carries the seeded bug
};

struct DiffCase {
  std::string id;
  ProgramSet parent;
  ProgramSet child;
  std::string title;
  std::string summary;
  DiffStatus status = DiffStatus::UNLABELLED;
  std::optional<GroundTruth> ground_truth;
  double risk_score = 0.0;
};

struct Hunk {
  std::string file;
  int parent_start = 0;  // 1-based; 0 when the parent side is empty
  int parent_count = 0;
  int child_start = 0;
  int child_count = 0;
  std::vector<std::string> removed;
  std::vector<std::string> added;
};

enum class ChangeKind { Added, Removed, Modified };
std::string_view to_string(ChangeKind kind);

struct ChangedDecl {
  std::string file;
  std::string function;
  ChangeKind kind = ChangeKind::Modified;

  friend bool operator==(const ChangedDecl&, const ChangedDecl&) = default;
};

struct Diff {
  std::vector<Hunk> hunks;
  std::vector<ChangedDecl> changed_decls;

  bool empty() const { return hunks.empty() && changed_decls.empty(); }
  int changed_line_count() const;
  // Unified-style text: file headers, @@ ranges, -/+ lines.
  std::string render() const;
  const ChangedDecl* find_decl(std::string_view function) const;
};

class CorpusFormatError : public std::runtime_error {
 public:
  CorpusFormatError(std::string case_id, std::string file, const std::string& message);
  const std::string& case_id() const { return case_id_; }
  const std::string& file() const { return file_; }

 private:
  std::string case_id_;
  std::string file_;
};

// Reads `<dir>/<case-id>/{parent/*.ml0, child/*.ml0, meta.json}` and assigns
// normalized risk scores. Cases are sorted by id.
std::vector<DiffCase> load_corpus(const std::string& path);
DiffCase load_case(const std::string& case_dir);

// Line LCS hunks per file (files sorted by name) plus per-function AST
// comparison for changed_decls.
Diff compute_diff(const ProgramSet& parent, const ProgramSet& child);

std::vector<std::string> split_lines(std::string_view text);

// Unnormalized heuristic: changed_decls + 0.25 * changed lines.
double raw_risk(const Diff& diff);
// Min-max over the corpus with a zero floor: raw / max(raw).
void assign_risk_scores(std::vector<DiffCase>& cases);
double risk_score(const DiffCase& diff_case);

}  // namespace catchjit::corpus
