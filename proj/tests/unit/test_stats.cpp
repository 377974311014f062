#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../common/stats_oracles.hpp"
#include "stats/stats.hpp"

using namespace catchjit::stats;
using namespace oracles;

namespace {

std::vector<double> random_ties(std::mt19937_64& rng, size_t n, int levels) {
  std::uniform_int_distribution<int> d(0, levels - 1);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

using Row = std::vector<std::optional<std::string>>;

}  // namespace

TEST_CASE("fisher: matches hypergeometric enumeration for every table with total at most 40") {
  int checked = 0;
  for (int n = 0; n <= 40; ++n) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; a + b <= n; ++b) {
        for (int c = 0; a + b + c <= n; ++c) {
          ContingencyTable2x2 t{a, b, c, n - a - b - c};
          double p = fisher_exact_two_sided(t).p;
          double want = fisher_oracle(t);
          if (std::abs(p - want) > 1e-9) {
            CAPTURE(a);
            CAPTURE(b);
            CAPTURE(c);
            CHECK(p == doctest::Approx(want).epsilon(1e-9));
          }
          ++checked;
        }
      }
    }
  }
  CHECK(checked == 135751);
}

TEST_CASE("fisher: worked examples, degeneracy and symmetry") {
  CHECK(fisher_exact_two_sided({3, 1, 1, 3}).p == doctest::Approx(0.4857142857).epsilon(1e-9));
  CHECK(fisher_exact_two_sided({5, 0, 0, 5}).p == doctest::Approx(0.0079365079).epsilon(1e-9));
  CHECK(fisher_exact_two_sided({2, 2, 2, 2}).p == doctest::Approx(1.0));
  auto deg = fisher_exact_two_sided({0, 0, 3, 4});
  CHECK(deg.degenerate);
  CHECK(deg.p == 1.0);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> cell(0, 30);
  for (int i = 0; i < 200; ++i) {
    ContingencyTable2x2 t{cell(rng), cell(rng), cell(rng), cell(rng)};
    CHECK(fisher_exact_two_sided(t).p == doctest::Approx(fisher_exact_two_sided(t.transpose()).p).epsilon(1e-12));
  }
}

TEST_CASE("cohens_h: closed form, buckets and antisymmetry") {
  CHECK(std::abs(cohens_h(0.75, 0.25) - std::numbers::pi / 3) < 1e-12);
  CHECK(std::abs(cohens_h(1.0, 0.0) - std::numbers::pi) < 1e-12);
  CHECK(cohens_h(0.5, 0.5) == 0.0);
  CHECK(effect_bucket(cohens_h(0.5, 0.5)) == EffectBucket::Negligible);
  CHECK(effect_bucket(cohens_h(0.75, 0.25)) == EffectBucket::Large);
  CHECK(effect_bucket(0.3) == EffectBucket::Small);
  CHECK(effect_bucket(-0.6) == EffectBucket::Medium);
  for (double p1 : {0.0, 0.1, 0.37, 0.9}) {
    for (double p2 : {0.05, 0.5, 1.0}) {
      CHECK(std::abs(cohens_h(p1, p2) - (2 * std::asin(std::sqrt(p1)) - 2 * std::asin(std::sqrt(p2)))) < 1e-12);
      CHECK(cohens_h(p1, p2) == -cohens_h(p2, p1));
    }
  }
  CHECK_THROWS_AS(cohens_h(1.5, 0.0), std::invalid_argument);
}

TEST_CASE("mann_whitney: U values and exact p") {
  CHECK(mann_whitney_u({1, 2, 3}, {4, 5, 6}).u == 0.0);
  CHECK(mann_whitney_u({1, 2, 3}, {1, 2, 3}).u == 4.5);
  CHECK(mann_whitney_u({7}, {7}).u == 0.5);
  auto sep = mann_whitney_u({1, 2, 3}, {4, 5, 6});
  CHECK(sep.exact);
  // Two of the twenty equally likely splits are as extreme.
  CHECK(sep.p == doctest::Approx(0.1).epsilon(1e-12));
  std::vector<double> big_x, big_y;
  for (int i = 0; i < 20; ++i) {
    big_x.push_back(i);
    big_y.push_back(i + 5);
  }
  auto approx = mann_whitney_u(big_x, big_y);
  CHECK_FALSE(approx.exact);
  CHECK(approx.u == static_cast<double>(cross_pairs(big_x, big_y).gt) + 0.5 * 15);
}

TEST_CASE("cliffs_delta and kendall tau-b equal brute-force pair counts") {
  CHECK(cliffs_delta({4, 5, 6}, {1, 2, 3}) == 1.0);
  CHECK(cliffs_delta({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(cliffs_delta({1, 3}, {2}) == 0.0);
  CHECK(*kendall_tau_b({1, 2, 3, 4}, {1, 3, 2, 4}).coefficient == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  std::mt19937_64 rng(11);
  for (size_t n = 2; n <= 50; ++n) {
    auto xs = random_ties(rng, n, 5), ys = random_ties(rng, n + 3, 4);
    auto b = cross_pairs(xs, ys);
    CHECK(cliffs_delta(xs, ys) ==
          static_cast<double>(b.gt - b.lt) / static_cast<double>(xs.size() * ys.size()));
    auto px = random_ties(rng, n, 6), py = random_ties(rng, n, 6);
    auto tau = kendall_tau_b(px, py);
    if (!tau.coefficient) continue;
    CHECK(*tau.coefficient == doctest::Approx(tau_b_oracle(px, py)).epsilon(1e-14));
  }
}

TEST_CASE("spearman and kendall: monotone pairs and zero variance") {
  std::vector<double> up{1, 2, 3, 4, 5}, down{5, 4, 3, 2, 1}, flat{2, 2, 2, 2, 2};
  CHECK(*spearman_rho(up, up).coefficient == doctest::Approx(1.0));
  CHECK(*kendall_tau_b(up, up).coefficient == doctest::Approx(1.0));
  CHECK(*spearman_rho(up, down).coefficient == doctest::Approx(-1.0));
  CHECK(*kendall_tau_b(up, down).coefficient == doctest::Approx(-1.0));
  auto z = spearman_rho(up, flat);
  CHECK_FALSE(z.coefficient);
  CHECK_FALSE(z.flag.empty());
  CHECK_FALSE(kendall_tau_b(up, flat).coefficient);
  CHECK_FALSE(spearman_rho({1, 2}, {1, 2}).p);
}

TEST_CASE("agreement: kappa and alpha fixtures") {
  CHECK(*cohens_kappa({"TP", "FP", "TP", "None"}, {"TP", "FP", "TP", "None"}).value == doctest::Approx(1.0));
  CHECK(*cohens_kappa({"A", "A", "B", "B"}, {"A", "B", "A", "B"}).value == doctest::Approx(0.0));
  auto one = cohens_kappa({"A", "A"}, {"A", "A"});
  CHECK_FALSE(one.value);
  CHECK_FALSE(one.flag.empty());

  RatingMatrix same{{"TP", "TP", "TP"}, {"FP", "FP", "FP"}, {"None", "None", "None"}};
  CHECK(*fleiss_kappa(same).value == doctest::Approx(1.0));
  CHECK(*krippendorff_alpha(same).value == doctest::Approx(1.0));

  // Coincidence matrix by hand: o(TP,TP)=3, o(FP,FP)=3, o(TP,FP)=o(FP,TP)=1.5,
  // o(x,None)=o(None,x)=0.5 for x in {TP,FP}; n=11, n_TP=n_FP=5, n_None=1.
  // D_o = 5/11, D_e = (121-51)/110, alpha = 1 - 5/7 = 2/7.
  RatingMatrix hand{Row{"TP", "TP", "TP"}, Row{"TP", "FP", "FP"}, Row{"FP", "FP", std::nullopt},
                    Row{"TP", "None", "FP"}};
  CHECK(std::abs(*krippendorff_alpha(hand).value - 2.0 / 7.0) < 1e-9);

  // Fleiss by hand: P_i = {1, 1/3, 1/3, 1}, P_bar = 2/3; p_TP = 5/12,
  // p_FP = 5/12, p_None = 1/6, P_e = 27/72; kappa = (2/3 - 3/8) / (5/8).
  RatingMatrix full{{"TP", "TP", "TP"}, {"TP", "FP", "FP"}, {"FP", "FP", "FP"}, {"TP", "None", "None"}};
  CHECK(*fleiss_kappa(full).value == doctest::Approx((2.0 / 3.0 - 3.0 / 8.0) / (5.0 / 8.0)).epsilon(1e-12));

  CHECK(landis_koch(-0.1) == "Pr");
  CHECK(landis_koch(0.1) == "Sl");
  CHECK(landis_koch(0.3) == "Fr");
  CHECK(landis_koch(0.5) == "Mod");
  CHECK(landis_koch(0.7) == "Sub");
  CHECK(landis_koch(0.9) == "AP");
}

TEST_CASE("random inputs stay in range") {
  std::mt19937_64 rng(3);
  const char* labels[] = {"TP", "FP", "None"};
  for (int it = 0; it < 200; ++it) {
    auto xs = random_ties(rng, 3 + it % 20, 7), ys = random_ties(rng, 2 + it % 15, 7);
    auto u = mann_whitney_u(xs, ys);
    CHECK(u.p >= 0.0);
    CHECK(u.p <= 1.0);
    double d = cliffs_delta(xs, ys);
    CHECK(d >= -1.0);
    CHECK(d <= 1.0);
    std::uniform_int_distribution<int> lab(0, 2), cell(0, 15);
    ContingencyTable2x2 t{cell(rng), cell(rng), cell(rng), cell(rng)};
    auto p = fisher_exact_two_sided(t).p;
    CHECK(p >= 0.0);
    CHECK(p <= 1.0 + 1e-12);
    RatingMatrix m;
    std::vector<std::string> r1, r2;
    for (int i = 0; i < 8; ++i) {
      Row row;
      for (int r = 0; r < 3; ++r) row.push_back(std::string(labels[lab(rng)]));
      r1.push_back(*row[0]);
      r2.push_back(*row[1]);
      m.push_back(row);
    }
    if (auto k = cohens_kappa(r1, r2).value) CHECK(*k <= 1.0 + 1e-12);
    if (auto k = fleiss_kappa(m).value) CHECK(*k <= 1.0 + 1e-12);
    if (auto a = krippendorff_alpha(m).value) CHECK(*a <= 1.0 + 1e-12);
  }
}

TEST_CASE("compare_rates: empty group and all-zero scores") {
  auto na = compare_rates(0, 0, 3, 10, "G", "B");
  CHECK_FALSE(na.available);
  auto zero = compare_rates(0, 10, 0, 12, "G", "B");
  CHECK(zero.available);
  REQUIRE(zero.p_value);
  CHECK(*zero.p_value == 1.0);
  CHECK(zero.direction.empty());
  auto split = compare_rates(1, 10, 9, 10, "G", "B");
  CHECK(split.direction == "B");
  CHECK(*split.p_value < 0.01);
}

TEST_CASE("permutation: zero iterations, pool guard and determinism") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> pool(600);
  for (auto& x : pool) x = u(rng);
  PermutationConfig cfg;
  cfg.iterations = 0;
  auto zero = permutation_sense_check(pool, cfg);
  CHECK(zero.significant == 0);
  CHECK(zero.prob_ge_m() == 0.0);
  cfg.iterations = 500;
  cfg.min_group = 6;
  cfg.max_group = 48;
  auto a = permutation_sense_check(pool, cfg);
  auto b = permutation_sense_check(pool, cfg);
  CHECK(a.significant == b.significant);
  CHECK(a.medium == b.medium);
  CHECK(a.large == b.large);
  CHECK(a.prob_ge_s() >= a.prob_ge_m());
  CHECK(a.prob_ge_m() >= a.prob_ge_l());
  cfg.max_group = 400;
  CHECK_THROWS_AS(permutation_sense_check(pool, cfg), std::invalid_argument);
  CHECK(splitmix64(0) != splitmix64(1));
}
