#include <cstdio>
#include <algorithm>
#include <map>
#include <sstream>

#include "stats/stats.hpp"

namespace catchjit::stats {

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string good_bad_cell(const StatResult& r) {
  if (!r.available || !r.p_value) return "N/A";
  std::string out = format_p(*r.p_value);
  if (*r.p_value < 0.05) out = "*" + out;
  out += " (" + std::string(abbrev(*r.bucket));
  if (!r.direction.empty()) out += "," + r.direction;
  return out + ")";
}

std::string matrix_cell(const StatResult& r) {
  if (!r.available || !r.p_value) return "N/A";
  std::string out = format_p(*r.p_value);
  if (*r.p_value < 0.05) {
    std::string arrow = r.direction == "row" ? "<-" : (r.direction == "col" ? "^" : "");
    out = arrow + "*" + out + " (" + std::string(abbrev(*r.bucket)) + ")";
  }
  return out;
}

}  // namespace

std::string render_permutation_table(const std::vector<PermutationColumn>& columns, const std::string& caption) {
  std::ostringstream os;
  os << caption << "\n";
  const size_t w = 18;
  os << pad("", 14);
  for (const auto& c : columns) os << pad(c.assessor, w);
  os << "\n";
  for (auto pol : {Polarity::TP, Polarity::FP}) {
    os << (pol == Polarity::TP ? "True Positive (score > 0)" : "False Positive (score < 0)") << "\n";
    auto row = [&](const std::string& label, auto fn) {
      os << pad(label, 14);
      for (const auto& c : columns) os << pad(fn(pol == Polarity::TP ? c.tp : c.fp), w);
      os << "\n";
    };
    row("Significant", [](const PermutationResult& r) {
      return std::to_string(r.significant) + "/" + std::to_string(r.iterations);
    });
    row("Small", [](const PermutationResult& r) { return std::to_string(r.small); });
    row("Medium", [](const PermutationResult& r) { return std::to_string(r.medium); });
    row("Large", [](const PermutationResult& r) { return std::to_string(r.large); });
    row("Prob >= L", [](const PermutationResult& r) { return fixed(r.prob_ge_l(), 5); });
    row("Prob >= M", [](const PermutationResult& r) { return fixed(r.prob_ge_m(), 5); });
    row("Prob >= S", [](const PermutationResult& r) { return fixed(r.prob_ge_s(), 5); });
    row("Prob >= N", [](const PermutationResult& r) { return fixed(r.prob_ge_n(), 5); });
  }
  if (!columns.empty()) {
    auto expected = static_cast<std::int64_t>(static_cast<double>(columns.front().tp.iterations) * 0.05);
    os << "Expected false positives by chance: " << expected << " (5%)\n";
  }
  return os.str();
}

std::string render_good_bad_table(const std::vector<GoodBadCell>& tp_cells, const std::vector<GoodBadCell>& fp_cells) {
  std::vector<std::string> workflows, assessors;
  std::map<std::string, std::map<std::string, std::pair<StatResult, StatResult>>> grid;
  auto note = [&](const GoodBadCell& c, bool tp) {
    if (std::find(workflows.begin(), workflows.end(), c.workflow) == workflows.end()) workflows.push_back(c.workflow);
    if (std::find(assessors.begin(), assessors.end(), c.assessor) == assessors.end()) assessors.push_back(c.assessor);
    auto& slot = grid[c.workflow][c.assessor];
    (tp ? slot.first : slot.second) = c.result;
  };
  for (const auto& c : tp_cells) note(c, true);
  for (const auto& c : fp_cells) note(c, false);
  const size_t w = 20;
  std::ostringstream os;
  os << pad("", 22);
  for (const auto& a : assessors) os << pad(a + " TP", w) << pad(a + " FP", w);
  os << "\n";
  for (const auto& wf : workflows) {
    os << pad(wf, 22);
    for (const auto& a : assessors) {
      auto it = grid[wf].find(a);
      if (it == grid[wf].end()) {
        os << pad("N/A", w) << pad("N/A", w);
        continue;
      }
      os << pad(good_bad_cell(it->second.first), w) << pad(good_bad_cell(it->second.second), w);
    }
    os << "\n";
  }
  os << "cells: Fisher p (Cohen's h bucket, higher group); * marks p < 0.05\n";
  return os.str();
}

std::string render_status_matrix(const StatusMatrix& m) {
  constexpr size_t k = std::size(kMatrixStatuses);
  const size_t w = 16;
  auto label = [&](const std::string& name, std::int64_t n, double rate) {
    std::string s = name + " n=" + std::to_string(n);
    if (m.kind == MatrixKind::Rate) s += " (" + fixed(rate * 100.0, 1) + "%)";
    return s;
  };
  std::ostringstream os;
  os << m.title << "\n" << pad("", 24);
  for (size_t j = 1; j < k; ++j) os << pad(std::string(status_abbrev(kMatrixStatuses[j])), w);
  os << pad(label("Bad", m.bad_n, m.bad_rate), w + 8) << "\n";
  for (size_t i = 0; i < k; ++i) {
    os << pad(label(std::string(status_abbrev(kMatrixStatuses[i])), m.n[i], m.rate[i]), 24);
    for (size_t j = 1; j < k; ++j) os << pad(j > i ? matrix_cell(m.cells[i][j]) : "", w);
    os << "\n";
  }
  os << pad(label("G", m.good_n, m.good_rate), 24);
  for (size_t j = 1; j < k; ++j) os << pad("", w);
  os << matrix_cell(m.good_vs_bad) << "\n";
  os << (m.kind == MatrixKind::Rate ? "Fisher's exact test; effect size Cohen's h"
                                    : "Mann-Whitney U test; effect size Cliff's delta")
     << "; <-P row higher, ^P column higher; * marks p < 0.05\n";
  return os.str();
}

}  // namespace catchjit::stats
