#include "corpus/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "minilang/parser.hpp"

namespace catchjit::corpus {

namespace fs = std::filesystem;
using minilang::Program;

std::string_view to_string(DiffStatus status) {
  switch (status) {
    case DiffStatus::CLOSED: return "CLOSED";
    case DiffStatus::ACCEPTED: return "ACCEPTED";
    case DiffStatus::ABANDONED: return "ABANDONED";
    case DiffStatus::CHANGES_PLANNED: return "CHANGES_PLANNED";
    case DiffStatus::NEEDS_REVISION: return "NEEDS_REVISION";
    case DiffStatus::REVERTED: return "REVERTED";
    case DiffStatus::UNLABELLED: return "UNLABELLED";
  }
  return "UNLABELLED";
}

std::optional<DiffStatus> parse_status(std::string_view text) {
  for (auto s : kAllStatuses) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool is_good(DiffStatus status) { return status == DiffStatus::CLOSED || status == DiffStatus::ACCEPTED; }

bool is_bad(DiffStatus status) {
  return status == DiffStatus::ABANDONED || status == DiffStatus::CHANGES_PLANNED ||
         status == DiffStatus::NEEDS_REVISION || status == DiffStatus::REVERTED;
}

std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added: return "Added";
    case ChangeKind::Removed: return "Removed";
    case ChangeKind::Modified: return "Modified";
  }
  return "?";
}

int Diff::changed_line_count() const {
  int n = 0;
  for (const auto& h : hunks) n += static_cast<int>(h.removed.size() + h.added.size());
  return n;
}

std::string Diff::render() const {
  std::ostringstream out;
  std::string current;
  for (const auto& h : hunks) {
    if (h.file != current) {
      current = h.file;
      out << "--- a/" << h.file << "\n+++ b/" << h.file << "\n";
    }
    out << "@@ -" << h.parent_start << "," << h.parent_count << " +" << h.child_start << ","
        << h.child_count << " @@\n";
    for (const auto& l : h.removed) out << "-" << l << "\n";
    for (const auto& l : h.added) out << "+" << l << "\n";
  }
  return out.str();
}

const ChangedDecl* Diff::find_decl(std::string_view function) const {
  for (const auto& d : changed_decls) {
    if (d.function == function) return &d;
  }
  return nullptr;
}

CorpusFormatError::CorpusFormatError(std::string case_id, std::string file, const std::string& message)
    : std::runtime_error("case '" + case_id + "', " + file + ": " + message),
      case_id_(std::move(case_id)),
      file_(std::move(file)) {}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProgramSet load_side(const std::string& case_id, const fs::path& dir, const std::string& side) {
  if (!fs::is_directory(dir)) throw CorpusFormatError(case_id, side + "/", "directory missing");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 4 && name.ends_with(".ml0") && !name.ends_with(".test.ml0")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  ProgramSet set;
  for (const auto& f : files) {
    const std::string rel = side + "/" + f.filename().string();
    try {
      set.emplace(f.filename().string(), minilang::parse(read_file(f)));
    } catch (const minilang::SyntaxError& e) {
      throw CorpusFormatError(case_id, rel, e.what());
    }
  }
  try {
    minilang::validate(set);
  } catch (const minilang::ValidationError& e) {
    throw CorpusFormatError(case_id, side + "/", e.what());
  }
  return set;
}

struct LineOp {
  char op;  // '=', '-', '+'
  int parent_line;
  int child_line;
};

std::vector<LineOp> lcs_ops(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;) {
    for (size_t j = m; j-- > 0;) {
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
    }
  }
  std::vector<LineOp> ops;
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      ops.push_back({'=', static_cast<int>(i), static_cast<int>(j)});
      ++i, ++j;
    } else if (j < m && (i == n || dp[i][j + 1] > dp[i + 1][j])) {
      ops.push_back({'+', static_cast<int>(i), static_cast<int>(j)});
      ++j;
    } else {
      ops.push_back({'-', static_cast<int>(i), static_cast<int>(j)});
      ++i;
    }
  }
  return ops;
}

void diff_file(const std::string& file, const std::vector<std::string>& a, const std::vector<std::string>& b,
               std::vector<Hunk>& out) {
  auto ops = lcs_ops(a, b);
  size_t k = 0;
  while (k < ops.size()) {
    if (ops[k].op == '=') {
      ++k;
      continue;
    }
    Hunk h;
    h.file = file;
    int first_parent = ops[k].parent_line, first_child = ops[k].child_line;
    while (k < ops.size() && ops[k].op != '=') {
      if (ops[k].op == '-') {
        h.removed.push_back(a[static_cast<size_t>(ops[k].parent_line)]);
      } else {
        h.added.push_back(b[static_cast<size_t>(ops[k].child_line)]);
      }
      ++k;
    }
    h.parent_count = static_cast<int>(h.removed.size());
    h.child_count = static_cast<int>(h.added.size());
    // Unified-diff convention: an empty side names the line before the hunk.
    h.parent_start = h.parent_count ? first_parent + 1 : first_parent;
    h.child_start = h.child_count ? first_child + 1 : first_child;
    out.push_back(std::move(h));
  }
}

}  // namespace

DiffCase load_case(const std::string& case_dir) {
  fs::path dir(case_dir);
  DiffCase c;
  c.id = dir.filename().string();
  fs::path meta_path = dir / "meta.json";
  if (!fs::is_regular_file(meta_path)) throw CorpusFormatError(c.id, "meta.json", "meta file missing");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw CorpusFormatError(c.id, "meta.json", e.what());
  }
  auto text_field = [&](const char* key, bool required) -> std::string {
    if (!meta.contains(key)) {
      if (required) throw CorpusFormatError(c.id, "meta.json", std::string("missing field '") + key + "'");
      return "";
    }
    if (!meta[key].is_string()) throw CorpusFormatError(c.id, "meta.json", std::string("field '") + key + "' must be text");
    return meta[key].get<std::string>();
  };
  if (!meta.is_object()) throw CorpusFormatError(c.id, "meta.json", "expected an object");
  c.title = text_field("title", true);
  c.summary = text_field("summary", true);
  auto status = parse_status(text_field("status", true));
  if (!status) throw CorpusFormatError(c.id, "meta.json", "unknown status '" + meta["status"].get<std::string>() + "'");
  c.status = *status;
  if (meta.contains("ground_truth") && !meta["ground_truth"].is_null()) {
    const auto& g = meta["ground_truth"];
    if (!g.is_object() || !g.contains("buggy") || !g["buggy"].is_boolean()) {
      throw CorpusFormatError(c.id, "meta.json", "ground_truth needs a boolean 'buggy'");
    }
    GroundTruth gt;
    gt.buggy = g["buggy"].get<bool>();
    gt.description = g.value("description", "");
    gt.culprit = g.value("culprit", "");
    c.ground_truth = gt;
  }
  c.parent = load_side(c.id, dir / "parent", "parent");
  c.child = load_side(c.id, dir / "child", "child");
  return c;
}

std::vector<DiffCase> load_corpus(const std::string& path) {
  if (!fs::is_directory(path)) throw CorpusFormatError("", path, "corpus directory not found");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<DiffCase> cases;
  for (const auto& d : dirs) cases.push_back(load_case(d.string()));
  std::sort(cases.begin(), cases.end(), [](const DiffCase& a, const DiffCase& b) { return a.id < b.id; });
  assign_risk_scores(cases);
  return cases;
}

Diff compute_diff(const ProgramSet& parent, const ProgramSet& child) {
  Diff d;
  std::set<std::string> files;
  for (const auto& [f, _] : parent) files.insert(f);
  for (const auto& [f, _] : child) files.insert(f);
  for (const auto& file : files) {
    auto pa = parent.find(file);
    auto ch = child.find(file);
    const Program* p = pa == parent.end() ? nullptr : &pa->second;
    const Program* c = ch == child.end() ? nullptr : &ch->second;
    diff_file(file, p ? split_lines(p->source_text) : std::vector<std::string>{},
              c ? split_lines(c->source_text) : std::vector<std::string>{}, d.hunks);
    if (p) {
      for (const auto& fn : p->functions) {
        const auto* other = c ? c->find(fn.name) : nullptr;
        if (!other) {
          d.changed_decls.push_back({file, fn.name, ChangeKind::Removed});
        } else if (!minilang::structurally_equal(fn, *other)) {
          d.changed_decls.push_back({file, fn.name, ChangeKind::Modified});
        }
      }
    }
    if (c) {
      for (const auto& fn : c->functions) {
        if (!p || !p->find(fn.name)) d.changed_decls.push_back({file, fn.name, ChangeKind::Added});
      }
    }
  }
  return d;
}

double raw_risk(const Diff& diff) {
  return static_cast<double>(diff.changed_decls.size()) + 0.25 * diff.changed_line_count();
}

void assign_risk_scores(std::vector<DiffCase>& cases) {
  std::vector<double> raw;
  double max_raw = 0.0;
  for (const auto& c : cases) {
    raw.push_back(raw_risk(compute_diff(c.parent, c.child)));
    max_raw = std::max(max_raw, raw.back());
  }
  for (size_t i = 0; i < cases.size(); ++i) cases[i].risk_score = max_raw > 0 ? raw[i] / max_raw : 0.0;
}

double risk_score(const DiffCase& diff_case) { return diff_case.risk_score; }

}  // namespace catchjit::corpus
