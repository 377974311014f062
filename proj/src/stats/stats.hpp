#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"

namespace catchjit::stats {

// Rows are groups, columns are (hit, miss).
struct ContingencyTable2x2 {
  std::int64_t a = 0, b = 0, c = 0, d = 0;

  std::int64_t total() const { return a + b + c + d; }
  ContingencyTable2x2 transpose() const { return {a, c, b, d}; }
};

struct FisherResult {
  double p = 1.0;
  bool degenerate = false;  // a zero margin; p is 1 by convention
};

// Sum of point probabilities <= observed under fixed margins, with 1e-12
// relative slack.
FisherResult fisher_exact_two_sided(const ContingencyTable2x2& t);
// Hypergeometric point probability of `t` given its margins.
double hypergeometric_pmf(const ContingencyTable2x2& t);

enum class EffectBucket { Negligible, Small, Medium, Large };
std::string_view to_string(EffectBucket b);
std::string_view abbrev(EffectBucket b);  // N, S, M, L
EffectBucket effect_bucket(double h);    // by |h|: 0.2, 0.5, 0.8

// 2 asin(sqrt p1) - 2 asin(sqrt p2). Throws std::invalid_argument outside [0,1].
double cohens_h(double p1, double p2);

// Midranks, 1-based.
std::vector<double> midranks(const std::vector<double>& values);

struct UResult {
  double u = 0.0;  // for xs
  double p = 1.0;
  bool exact = false;
};
// Exact enumeration when n_x + n_y <= 12, else normal approximation with
// tie correction and no continuity correction.
UResult mann_whitney_u(const std::vector<double>& xs, const std::vector<double>& ys);
inline constexpr size_t kExactUMax = 12;

double cliffs_delta(const std::vector<double>& xs, const std::vector<double>& ys);

// Coefficient and p; coefficient is nullopt with `flag` set when a variable
// has zero variance. p is nullopt when n < 3.
struct Correlation {
  std::optional<double> coefficient;
  std::optional<double> p;
  std::string flag;
};
// Pearson over midranks; p from Student t with n-2 degrees of freedom.
Correlation spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);
// Tau-b; p from the tie-corrected normal approximation of S.
Correlation kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys);

struct PairCounts {
  std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, ties_xy = 0;
};
PairCounts count_pairs(const std::vector<double>& xs, const std::vector<double>& ys);

// Items x raters; nullopt cells are missing.
using RatingMatrix = std::vector<std::vector<std::optional<std::string>>>;

struct Agreement {
  std::optional<double> value;
  std::string flag;  // AllOneCategory and similar
};

Agreement cohens_kappa(const std::vector<std::string>& r1, const std::vector<std::string>& r2);
// Requires every item rated by the same number of raters.
Agreement fleiss_kappa(const RatingMatrix& m);
// Nominal level over the coincidence matrix; units with fewer than two
// ratings are skipped.
Agreement krippendorff_alpha(const RatingMatrix& m);

// Landis-Koch: Pr <0, Sl <0.2, Fr <0.4, Mod <0.6, Sub <0.8, AP.
std::string_view landis_koch(double value);

// ---- comparisons -----------------------------------------------------------

enum class Polarity { TP, FP };  // TP: score > 0, FP: score < 0
std::string_view to_string(Polarity p);
bool hits(Polarity p, double score);

struct StatResult {
  std::string statistic;
  bool available = false;  // false: N/A
  double value = 0.0;      // group-1 rate or U
  std::optional<double> p_value;
  std::optional<double> effect;  // h or Cliff's delta
  std::optional<EffectBucket> bucket;
  std::string direction;  // which group is higher, empty when equal
  std::int64_t n1 = 0, n2 = 0;
  double rate1 = 0.0, rate2 = 0.0;
  std::string note;
};

// Fisher p and Cohen's h on hit rates. n = 0 in a group gives N/A.
StatResult compare_rates(std::int64_t hits1, std::int64_t n1, std::int64_t hits2, std::int64_t n2,
                         const std::string& label1, const std::string& label2);
// Mann-Whitney p and Cliff's delta on raw scores.
StatResult compare_scores(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& label1,
                          const std::string& label2);

struct ScoredItem {
  std::string case_id;
  corpus::DiffStatus status = corpus::DiffStatus::UNLABELLED;
  std::string workflow;
  std::string assessor;
  std::optional<double> score;
};

struct GoodBadCell {
  std::string workflow;
  std::string assessor;
  Polarity polarity = Polarity::TP;
  StatResult result;  // group 1 = G, group 2 = B
};

// One cell per (workflow, assessor) in first-seen order. Missing scores are
// left out; unlabelled cases belong to neither group.
std::vector<GoodBadCell> compare_good_bad(const std::vector<ScoredItem>& items, Polarity polarity);

inline constexpr corpus::DiffStatus kMatrixStatuses[] = {
    corpus::DiffStatus::CLOSED,         corpus::DiffStatus::ACCEPTED,       corpus::DiffStatus::ABANDONED,
    corpus::DiffStatus::CHANGES_PLANNED, corpus::DiffStatus::NEEDS_REVISION, corpus::DiffStatus::REVERTED,
};
std::string_view status_abbrev(corpus::DiffStatus s);

enum class MatrixKind { Rate, Score };

struct StatusMatrix {
  std::string title;
  MatrixKind kind = MatrixKind::Rate;
  std::vector<std::int64_t> n;  // per kMatrixStatuses
  std::vector<double> rate;
  std::vector<std::vector<StatResult>> cells;  // [row][col], upper triangle used
  StatResult good_vs_bad;
  std::int64_t good_n = 0, bad_n = 0;
  double good_rate = 0.0, bad_rate = 0.0;
};

// Items already filtered to one workflow and assessor. Rate matrices use
// Fisher and h on hits; score matrices use Mann-Whitney and Cliff's delta.
StatusMatrix status_matrix(const std::vector<ScoredItem>& items, MatrixKind kind, Polarity polarity,
                           const std::string& title);

// ---- permutation sense check ----------------------------------------------

struct PermutationConfig {
  std::int64_t iterations = 10000;
  int min_group = 205;
  int max_group = 232;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  Polarity polarity = Polarity::TP;
};

struct PermutationResult {
  std::int64_t iterations = 0;
  std::int64_t significant = 0;
  std::int64_t negligible = 0, small = 0, medium = 0, large = 0;
  double prob_ge_l() const;
  double prob_ge_m() const;
  double prob_ge_s() const;
  double prob_ge_n() const;  // significant fraction
};

std::uint64_t splitmix64(std::uint64_t x);
// Iteration i draws from mt19937_64 seeded with splitmix64(seed + i), so
// results do not depend on scheduling. Throws std::invalid_argument when the
// pool is smaller than twice the largest group.
PermutationResult permutation_sense_check(const std::vector<double>& pool, const PermutationConfig& config);

// ---- rendering -----------------------------------------------------------

struct PermutationColumn {
  std::string assessor;
  PermutationResult tp;
  PermutationResult fp;
};
std::string render_permutation_table(const std::vector<PermutationColumn>& columns, const std::string& caption);

// Rows: workflows. Columns: assessor x {TP, FP}. Cell "p (bucket,dir)".
std::string render_good_bad_table(const std::vector<GoodBadCell>& tp_cells, const std::vector<GoodBadCell>& fp_cells);

// Upper triangle with "<-P" when the row is higher and "^P" when the column is.
std::string render_status_matrix(const StatusMatrix& m);

std::string format_p(double p);

}  // namespace catchjit::stats
