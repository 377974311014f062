#include "stats/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace catchjit::stats {

namespace {

double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

}  // namespace

// ---- Fisher ----------------------------------------------------------------

double hypergeometric_pmf(const ContingencyTable2x2& t) {
  auto lc = [](double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); };
  double r1 = static_cast<double>(t.a + t.b), r2 = static_cast<double>(t.c + t.d);
  double c1 = static_cast<double>(t.a + t.c), n = r1 + r2;
  return std::exp(lc(r1, static_cast<double>(t.a)) + lc(r2, static_cast<double>(t.c)) - lc(n, c1));
}

FisherResult fisher_exact_two_sided(const ContingencyTable2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw std::invalid_argument("negative count in 2x2 table");
  std::int64_t r1 = t.a + t.b, r2 = t.c + t.d, c1 = t.a + t.c, c2 = t.b + t.d, n = r1 + r2;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return {1.0, true};
  std::int64_t lo = std::max<std::int64_t>(0, c1 - r2), hi = std::min(r1, c1);
  std::int64_t mode = std::clamp<std::int64_t>((r1 + 1) * (c1 + 1) / (n + 2), lo, hi);
  std::vector<double> w(static_cast<size_t>(hi - lo + 1), 0.0);
  auto at = [&](std::int64_t x) -> double& { return w[static_cast<size_t>(x - lo)]; };
  at(mode) = 1.0;
  for (std::int64_t x = mode; x < hi; ++x) {
    at(x + 1) = at(x) * static_cast<double>((r1 - x) * (c1 - x)) / static_cast<double>((x + 1) * (r2 - c1 + x + 1));
  }
  for (std::int64_t x = mode; x > lo; --x) {
    at(x - 1) = at(x) * static_cast<double>(x * (r2 - c1 + x)) / static_cast<double>((r1 - x + 1) * (c1 - x + 1));
  }
  double total = 0.0, tail = 0.0, observed = at(t.a) * (1.0 + 1e-12);
  for (double v : w) {
    total += v;
    if (v <= observed) tail += v;
  }
  return {std::min(1.0, tail / total), false};
}

// ---- effect sizes ----------------------------------------------------------

std::string_view to_string(EffectBucket b) {
  switch (b) {
    case EffectBucket::Negligible: return "Negligible";
    case EffectBucket::Small: return "Small";
    case EffectBucket::Medium: return "Medium";
    case EffectBucket::Large: return "Large";
  }
  return "?";
}

std::string_view abbrev(EffectBucket b) {
  switch (b) {
    case EffectBucket::Negligible: return "N";
    case EffectBucket::Small: return "S";
    case EffectBucket::Medium: return "M";
    case EffectBucket::Large: return "L";
  }
  return "?";
}

EffectBucket effect_bucket(double h) {
  double m = std::fabs(h);
  if (m < 0.2) return EffectBucket::Negligible;
  if (m < 0.5) return EffectBucket::Small;
  if (m < 0.8) return EffectBucket::Medium;
  return EffectBucket::Large;
}

namespace {

// Cliff's delta thresholds 0.147 / 0.33 / 0.474.
EffectBucket delta_bucket(double d) {
  double m = std::fabs(d);
  if (m < 0.147) return EffectBucket::Negligible;
  if (m < 0.33) return EffectBucket::Small;
  if (m < 0.474) return EffectBucket::Medium;
  return EffectBucket::Large;
}

}  // namespace

double cohens_h(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw std::invalid_argument("proportions must lie in [0, 1]");
  }
  return 2.0 * std::asin(std::sqrt(p1)) - 2.0 * std::asin(std::sqrt(p2));
}

// ---- ranks -----------------------------------------------------------------

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

UResult mann_whitney_u(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("Mann-Whitney needs two non-empty samples");
  std::vector<double> pooled(xs);
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  auto ranks = midranks(pooled);
  double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  double n = nx + ny;
  double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(xs.size()), 0.0);
  UResult out;
  out.u = rank_sum - nx * (nx + 1) / 2.0;
  double mean = nx * ny / 2.0;
  double observed = std::fabs(out.u - mean);
  if (pooled.size() <= kExactUMax) {
    out.exact = true;
    size_t total_n = pooled.size(), k = xs.size();
    std::vector<bool> pick(total_n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
    std::int64_t count = 0, extreme = 0;
    do {
      double s = 0.0;
      for (size_t i = 0; i < total_n; ++i) {
        if (pick[i]) s += ranks[i];
      }
      double u = s - nx * (nx + 1) / 2.0;
      ++count;
      if (std::fabs(u - mean) >= observed - 1e-9) ++extreme;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    out.p = static_cast<double>(extreme) / static_cast<double>(count);
    return out;
  }
  std::map<double, int> ties;
  for (double v : pooled) ++ties[v];
  double tie_term = 0.0;
  for (const auto& [v, t] : ties) tie_term += std::pow(t, 3) - t;
  double var = nx * ny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  out.p = var <= 0.0 ? 1.0 : std::min(1.0, normal_two_sided((out.u - mean) / std::sqrt(var)));
  return out;
}

double cliffs_delta(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("Cliff's delta needs two non-empty samples");
  std::int64_t greater = 0, less = 0;
  for (double x : xs) {
    for (double y : ys) {
      if (x > y) ++greater;
      else if (x < y) ++less;
    }
  }
  return static_cast<double>(greater - less) / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

// ---- correlations ----------------------------------------------------------

Correlation spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("paired samples differ in length");
  Correlation out;
  size_t n = xs.size();
  if (n < 2) {
    out.flag = "TooFewPairs";
    return out;
  }
  auto rx = midranks(xs), ry = midranks(ys);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    out.flag = "ZeroVariance";
    return out;
  }
  double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.coefficient = r;
  if (n >= 3) {
    if (std::fabs(r) >= 1.0 - 1e-15) {
      out.p = 0.0;
    } else {
      double df = static_cast<double>(n) - 2.0;
      double t = r * std::sqrt(df / (1.0 - r * r));
      boost::math::students_t dist(df);
      out.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
    }
  }
  return out;
}

PairCounts count_pairs(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("paired samples differ in length");
  PairCounts pc;
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = i + 1; j < xs.size(); ++j) {
      double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
      if (dx == 0 && dy == 0) ++pc.ties_xy;
      else if (dx == 0) ++pc.ties_x;
      else if (dy == 0) ++pc.ties_y;
      else if ((dx > 0) == (dy > 0)) ++pc.concordant;
      else ++pc.discordant;
    }
  }
  return pc;
}

Correlation kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys) {
  auto pc = count_pairs(xs, ys);
  Correlation out;
  double n = static_cast<double>(xs.size());
  if (xs.size() < 2) {
    out.flag = "TooFewPairs";
    return out;
  }
  double n0 = n * (n - 1) / 2.0;
  double n1 = static_cast<double>(pc.ties_x + pc.ties_xy), n2 = static_cast<double>(pc.ties_y + pc.ties_xy);
  if (n0 == n1 || n0 == n2) {
    out.flag = "ZeroVariance";
    return out;
  }
  double s = static_cast<double>(pc.concordant - pc.discordant);
  out.coefficient = std::clamp(s / std::sqrt((n0 - n1) * (n0 - n2)), -1.0, 1.0);
  if (xs.size() >= 3) {
    auto groups = [](const std::vector<double>& v) {
      std::map<double, double> m;
      for (double x : v) m[x] += 1;
      return m;
    };
    double vt = 0, vu = 0, t1 = 0, u1 = 0, t2 = 0, u2 = 0;
    for (const auto& [k, t] : groups(xs)) {
      vt += t * (t - 1) * (2 * t + 5);
      t1 += t * (t - 1);
      t2 += t * (t - 1) * (t - 2);
    }
    for (const auto& [k, u] : groups(ys)) {
      vu += u * (u - 1) * (2 * u + 5);
      u1 += u * (u - 1);
      u2 += u * (u - 1) * (u - 2);
    }
    double var = (n * (n - 1) * (2 * n + 5) - vt - vu) / 18.0 + t1 * u1 / (2 * n * (n - 1)) +
                 t2 * u2 / (9 * n * (n - 1) * (n - 2));
    out.p = var <= 0.0 ? 1.0 : std::min(1.0, normal_two_sided(s / std::sqrt(var)));
  }
  return out;
}

// ---- agreement ---------------------------------------------------------------

Agreement cohens_kappa(const std::vector<std::string>& r1, const std::vector<std::string>& r2) {
  if (r1.size() != r2.size()) throw std::invalid_argument("rater columns differ in length");
  if (r1.size() < 2) throw std::invalid_argument("kappa needs at least two items");
  std::map<std::string, double> c1, c2;
  double agree = 0;
  for (size_t i = 0; i < r1.size(); ++i) {
    c1[r1[i]] += 1;
    c2[r2[i]] += 1;
    if (r1[i] == r2[i]) agree += 1;
  }
  double n = static_cast<double>(r1.size());
  double po = agree / n, pe = 0;
  for (const auto& [k, v] : c1) {
    auto it = c2.find(k);
    if (it != c2.end()) pe += (v / n) * (it->second / n);
  }
  if (pe >= 1.0 - 1e-15) return {std::nullopt, "AllOneCategory"};
  return {(po - pe) / (1 - pe), ""};
}

Agreement fleiss_kappa(const RatingMatrix& m) {
  if (m.size() < 2) throw std::invalid_argument("Fleiss' kappa needs at least two items");
  std::map<std::string, double> totals;
  size_t raters = 0;
  double p_bar = 0;
  for (const auto& row : m) {
    std::map<std::string, double> counts;
    size_t rated = 0;
    for (const auto& cell : row) {
      if (!cell) continue;
      counts[*cell] += 1;
      ++rated;
    }
    if (raters == 0) raters = rated;
    if (rated != raters || rated < 2) throw std::invalid_argument("Fleiss' kappa needs equal rater counts >= 2");
    double sq = 0;
    for (const auto& [k, v] : counts) {
      sq += v * v;
      totals[k] += v;
    }
    double r = static_cast<double>(rated);
    p_bar += (sq - r) / (r * (r - 1));
  }
  double items = static_cast<double>(m.size());
  p_bar /= items;
  double pe = 0;
  for (const auto& [k, v] : totals) {
    double pj = v / (items * static_cast<double>(raters));
    pe += pj * pj;
  }
  if (pe >= 1.0 - 1e-15) return {std::nullopt, "AllOneCategory"};
  return {(p_bar - pe) / (1 - pe), ""};
}

Agreement krippendorff_alpha(const RatingMatrix& m) {
  std::map<std::pair<std::string, std::string>, double> o;
  std::map<std::string, double> nc;
  for (const auto& row : m) {
    std::vector<std::string> vals;
    for (const auto& cell : row) {
      if (cell) vals.push_back(*cell);
    }
    if (vals.size() < 2) continue;
    double w = 1.0 / static_cast<double>(vals.size() - 1);
    for (size_t i = 0; i < vals.size(); ++i) {
      for (size_t j = 0; j < vals.size(); ++j) {
        if (i != j) o[{vals[i], vals[j]}] += w;
      }
    }
  }
  double n = 0;
  for (const auto& [ck, v] : o) {
    nc[ck.first] += v;
    n += v;
  }
  if (n < 2) return {std::nullopt, "TooFewPairableValues"};
  double disagree = 0, expected = 0;
  for (const auto& [ck, v] : o) {
    if (ck.first != ck.second) disagree += v;
  }
  for (const auto& [c, vc] : nc) {
    for (const auto& [k, vk] : nc) {
      if (c != k) expected += vc * vk;
    }
  }
  if (expected == 0) return {std::nullopt, "AllOneCategory"};
  return {1.0 - (n - 1.0) * disagree / expected, ""};
}

std::string_view landis_koch(double v) {
  if (v < 0.0) return "Pr";
  if (v < 0.2) return "Sl";
  if (v < 0.4) return "Fr";
  if (v < 0.6) return "Mod";
  if (v < 0.8) return "Sub";
  return "AP";
}

// ---- comparisons -----------------------------------------------------------

std::string_view to_string(Polarity p) { return p == Polarity::TP ? "TP" : "FP"; }

bool hits(Polarity p, double score) { return p == Polarity::TP ? score > 0.0 : score < 0.0; }

StatResult compare_rates(std::int64_t hits1, std::int64_t n1, std::int64_t hits2, std::int64_t n2,
                         const std::string& label1, const std::string& label2) {
  StatResult r;
  r.statistic = "fisher";
  r.n1 = n1;
  r.n2 = n2;
  if (n1 <= 0 || n2 <= 0) return r;
  r.available = true;
  r.rate1 = static_cast<double>(hits1) / static_cast<double>(n1);
  r.rate2 = static_cast<double>(hits2) / static_cast<double>(n2);
  r.value = r.rate1;
  auto f = fisher_exact_two_sided({hits1, n1 - hits1, hits2, n2 - hits2});
  r.p_value = f.p;
  if (f.degenerate) r.note = "degenerate";
  r.effect = cohens_h(r.rate1, r.rate2);
  r.bucket = effect_bucket(*r.effect);
  if (r.rate1 > r.rate2) r.direction = label1;
  else if (r.rate2 > r.rate1) r.direction = label2;
  return r;
}

StatResult compare_scores(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& label1,
                          const std::string& label2) {
  StatResult r;
  r.statistic = "mann_whitney";
  r.n1 = static_cast<std::int64_t>(xs.size());
  r.n2 = static_cast<std::int64_t>(ys.size());
  if (xs.empty() || ys.empty()) return r;
  r.available = true;
  auto u = mann_whitney_u(xs, ys);
  r.value = u.u;
  r.p_value = u.p;
  r.note = u.exact ? "exact" : "normal";
  r.effect = cliffs_delta(xs, ys);
  r.bucket = delta_bucket(*r.effect);
  r.rate1 = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  r.rate2 = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  if (*r.effect > 0) r.direction = label1;
  else if (*r.effect < 0) r.direction = label2;
  return r;
}

std::vector<GoodBadCell> compare_good_bad(const std::vector<ScoredItem>& items, Polarity polarity) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::array<std::int64_t, 4>> counts;  // gh, gn, bh, bn
  for (const auto& it : items) {
    auto key = std::make_pair(it.workflow, it.assessor);
    if (!counts.count(key)) {
      order.push_back(key);
      counts[key] = {0, 0, 0, 0};
    }
    if (!it.score) continue;
    auto& c = counts[key];
    bool h = hits(polarity, *it.score);
    if (corpus::is_good(it.status)) {
      c[0] += h;
      c[1] += 1;
    } else if (corpus::is_bad(it.status)) {
      c[2] += h;
      c[3] += 1;
    }
  }
  std::vector<GoodBadCell> out;
  for (const auto& key : order) {
    const auto& c = counts[key];
    out.push_back({key.first, key.second, polarity, compare_rates(c[0], c[1], c[2], c[3], "G", "B")});
  }
  return out;
}

std::string_view status_abbrev(corpus::DiffStatus s) {
  switch (s) {
    case corpus::DiffStatus::CLOSED: return "CLS";
    case corpus::DiffStatus::ACCEPTED: return "ACC";
    case corpus::DiffStatus::ABANDONED: return "ABD";
    case corpus::DiffStatus::CHANGES_PLANNED: return "CHP";
    case corpus::DiffStatus::NEEDS_REVISION: return "NRS";
    case corpus::DiffStatus::REVERTED: return "REV";
    case corpus::DiffStatus::UNLABELLED: return "UNL";
  }
  return "?";
}

StatusMatrix status_matrix(const std::vector<ScoredItem>& items, MatrixKind kind, Polarity polarity,
                           const std::string& title) {
  constexpr size_t k = std::size(kMatrixStatuses);
  std::vector<std::vector<double>> scores(k);
  std::vector<double> good, bad;
  for (const auto& it : items) {
    if (!it.score) continue;
    for (size_t i = 0; i < k; ++i) {
      if (kMatrixStatuses[i] == it.status) scores[i].push_back(*it.score);
    }
    if (corpus::is_good(it.status)) good.push_back(*it.score);
    if (corpus::is_bad(it.status)) bad.push_back(*it.score);
  }
  auto hit_count = [&](const std::vector<double>& v) {
    return static_cast<std::int64_t>(std::count_if(v.begin(), v.end(), [&](double s) { return hits(polarity, s); }));
  };
  auto rate_of = [&](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    if (kind == MatrixKind::Rate) return static_cast<double>(hit_count(v)) / static_cast<double>(v.size());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  auto compare = [&](const std::vector<double>& x, const std::vector<double>& y) {
    if (kind == MatrixKind::Rate) {
      return compare_rates(hit_count(x), static_cast<std::int64_t>(x.size()), hit_count(y),
                           static_cast<std::int64_t>(y.size()), "row", "col");
    }
    return compare_scores(x, y, "row", "col");
  };
  StatusMatrix m;
  m.title = title;
  m.kind = kind;
  m.cells.assign(k, std::vector<StatResult>(k));
  for (size_t i = 0; i < k; ++i) {
    m.n.push_back(static_cast<std::int64_t>(scores[i].size()));
    m.rate.push_back(rate_of(scores[i]));
    for (size_t j = i + 1; j < k; ++j) m.cells[i][j] = compare(scores[i], scores[j]);
  }
  m.good_vs_bad = compare(good, bad);
  m.good_n = static_cast<std::int64_t>(good.size());
  m.bad_n = static_cast<std::int64_t>(bad.size());
  m.good_rate = rate_of(good);
  m.bad_rate = rate_of(bad);
  return m;
}

// ---- permutation -------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double PermutationResult::prob_ge_l() const {
  return iterations ? static_cast<double>(large) / static_cast<double>(iterations) : 0.0;
}
double PermutationResult::prob_ge_m() const {
  return iterations ? static_cast<double>(large + medium) / static_cast<double>(iterations) : 0.0;
}
double PermutationResult::prob_ge_s() const {
  return iterations ? static_cast<double>(large + medium + small) / static_cast<double>(iterations) : 0.0;
}
double PermutationResult::prob_ge_n() const {
  return iterations ? static_cast<double>(significant) / static_cast<double>(iterations) : 0.0;
}

PermutationResult permutation_sense_check(const std::vector<double>& pool, const PermutationConfig& cfg) {
  if (cfg.min_group < 1 || cfg.max_group < cfg.min_group) throw std::invalid_argument("bad group size range");
  PermutationResult out;
  out.iterations = std::max<std::int64_t>(0, cfg.iterations);
  if (out.iterations == 0) return out;
  if (pool.size() < static_cast<size_t>(cfg.max_group) * 2) {
    throw std::invalid_argument("pool smaller than twice the largest group");
  }
  std::vector<char> hit(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) hit[i] = hits(cfg.polarity, pool[i]);
  std::vector<size_t> idx(pool.size());
  for (std::int64_t it = 0; it < out.iterations; ++it) {
    std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(it)));
    std::uniform_int_distribution<int> size_dist(cfg.min_group, cfg.max_group);
    int n1 = size_dist(rng), n2 = size_dist(rng);
    std::iota(idx.begin(), idx.end(), 0);
    size_t need = static_cast<size_t>(n1 + n2);
    for (size_t i = 0; i < need; ++i) {
      std::uniform_int_distribution<size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    std::int64_t h1 = 0, h2 = 0;
    for (int i = 0; i < n1; ++i) h1 += hit[idx[static_cast<size_t>(i)]];
    for (int i = n1; i < n1 + n2; ++i) h2 += hit[idx[static_cast<size_t>(i)]];
    auto f = fisher_exact_two_sided({h1, n1 - h1, h2, n2 - h2});
    if (f.p >= cfg.alpha) continue;
    ++out.significant;
    double h = cohens_h(static_cast<double>(h1) / n1, static_cast<double>(h2) / n2);
    switch (effect_bucket(h)) {
      case EffectBucket::Negligible: ++out.negligible; break;
      case EffectBucket::Small: ++out.small; break;
      case EffectBucket::Medium: ++out.medium; break;
      case EffectBucket::Large: ++out.large; break;
    }
  }
  return out;
}

}  // namespace catchjit::stats
