#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hdp/random.hpp"
#include "hdp/stats.hpp"
#include "support/oracles.hpp"

using namespace hdp;

namespace {

std::vector<double> normals(Rng& rng, std::size_t n, double shift = 0.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = shift + rng.normal();
  return v;
}

}  // namespace

TEST(Ks, KolmogorovDistributionValues) {
  // Q(lambda) = 1 - K(lambda); K(1.3581) = 0.95, K(1.6276) = 0.99.
  EXPECT_NEAR(stats::kolmogorov_q(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_q(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_q(0.5), 0.963945, 1e-6);
  EXPECT_DOUBLE_EQ(stats::kolmogorov_q(0.0), 1.0);
  // both branches agree where they meet
  EXPECT_NEAR(stats::kolmogorov_q(1.18 - 1e-9), stats::kolmogorov_q(1.18 + 1e-9), 1e-8);
}

TEST(Ks, StatisticMatchesDirectEcdf) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = normals(rng, 5 + rng.below(30));
    auto b = normals(rng, 5 + rng.below(30), 0.5);
    // introduce ties
    for (auto& x : a) x = std::round(x * 4) / 4;
    for (auto& x : b) x = std::round(x * 4) / 4;
    EXPECT_NEAR(stats::ks_two_sample(a, b).d_statistic, oracle::ks_statistic(a, b), 1e-12);
  }
}

TEST(Ks, PValueKnownCase) {
  // d = 0.5 with n = m = 10: lambda = 0.5 * sqrt(5) = 1.118
  std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> b{6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  const auto r = stats::ks_two_sample(a, b);
  EXPECT_DOUBLE_EQ(r.d_statistic, 0.5);
  EXPECT_NEAR(r.p_value, stats::kolmogorov_q(0.5 * std::sqrt(5.0)), 1e-15);
}

TEST(Ks, Properties) {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = normals(rng, 20 + rng.below(40));
    const auto b = normals(rng, 20 + rng.below(40), rng.uniform());
    const auto ab = stats::ks_two_sample(a, b), ba = stats::ks_two_sample(b, a);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    EXPECT_GT(stats::ks_two_sample(a, a).p_value, 0.999);
    std::vector<double> ta(a), tb(b);
    for (auto& x : ta) x = std::exp(x) * 3 + 1;
    for (auto& x : tb) x = std::exp(x) * 3 + 1;
    EXPECT_DOUBLE_EQ(stats::ks_two_sample(ta, tb).p_value, ab.p_value);
  }
}

TEST(Ks, CloseToPermutationOracle) {
  Rng rng(3);
  const auto a = normals(rng, 60);
  const auto b = normals(rng, 60, 0.3);
  EXPECT_NEAR(stats::ks_two_sample(a, b).p_value, oracle::permutation_ks_p(a, b, 2000, 17), 0.05);
}

TEST(Ranks, MidranksAndSpearman) {
  EXPECT_EQ(stats::midranks(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 8, 16, 32}, z{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(stats::spearman(x, y), 1.0);
  EXPECT_DOUBLE_EQ(stats::spearman(x, z), -1.0);
  EXPECT_DOUBLE_EQ(stats::spearman(x, std::vector<double>{3, 3, 3, 3, 3}), 0.0);
  // Spearman is Pearson on midranks
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    auto a = normals(rng, 30), b = normals(rng, 30);
    for (auto& v : a) v = std::round(v * 2);
    EXPECT_NEAR(stats::spearman(a, b), stats::pearson(stats::midranks(a), stats::midranks(b)), 1e-12);
  }
}

TEST(Auc, KnownValues) {
  EXPECT_DOUBLE_EQ(stats::auc_roc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, {true, true, false, false}), 1.0);
  EXPECT_DOUBLE_EQ(stats::auc_roc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, {true, true, false, false}), 0.0);
  EXPECT_DOUBLE_EQ(stats::auc_roc(std::vector<double>{0.5, 0.5, 0.5}, {true, false, false}), 0.5);
  EXPECT_THROW(stats::auc_roc(std::vector<double>{0.5, 0.6}, {true, true}), stats::StatsError);
}

TEST(Auc, MatchesPairCounting) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(10));
      y[i] = rng.uniform() < 0.4;
    }
    y[0] = true;
    y[1] = false;
    EXPECT_NEAR(stats::auc_roc(s, y), oracle::pair_count_auc(s, y), 1e-12);
  }
}

TEST(Wilcoxon, MatchesExactEnumeration) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.below(6));
      b[i] = static_cast<double>(rng.below(6));
    }
    EXPECT_NEAR(stats::wilcoxon_signed_rank(a, b).p_value, oracle::exact_wilcoxon_p(a, b), 1e-9);
  }
}

TEST(Wilcoxon, NormalApproximationReference) {
  // Ensemble vs pairwise mean AUCs (%) of the 17 targets, RF columns of the
  // published ensemble table; reported p = 0.0069.
  const std::vector<double> ensemble{60.3, 59.7, 65.7, 57.6, 49.3, 51.5, 51.0, 50.1, 48.9,
                                     64.9, 73.2, 77.8, 71.2, 56.5, 53.9, 55.0, 47.0};
  const std::vector<double> pairwise{54.4, 53.8, 56.1, 56.7, 50.0, 51.1, 50.8, 50.0, 49.4,
                                     58.9, 63.2, 56.6, 55.0, 51.9, 53.9, 55.0, 47.0};
  const auto r = stats::wilcoxon_signed_rank(ensemble, pairwise, true, stats::WilcoxonMethod::Normal);
  EXPECT_NEAR(r.p_value, 0.0069, 5e-5);
  EXPECT_EQ(r.n_effective, 14u);
  EXPECT_DOUBLE_EQ(r.statistic, 96.0);

  // LR columns; reported p = 0.0058, the one-decimal table gives 0.0071.
  const std::vector<double> ens_lr{60.3, 60.6, 66.1, 59.3, 49.9, 51.4, 51.4, 49.4, 48.9,
                                   61.4, 75.1, 73.3, 71.0, 68.6, 54.0, 56.6, 47.1};
  const std::vector<double> pair_lr{53.7, 54.0, 54.4, 59.1, 49.9, 50.9, 50.8, 49.7, 49.5,
                                    57.8, 64.8, 59.0, 58.0, 54.2, 54.0, 56.6, 47.1};
  const auto lr = stats::wilcoxon_signed_rank(ens_lr, pair_lr, true, stats::WilcoxonMethod::Normal);
  EXPECT_LT(lr.p_value, 0.01);
  EXPECT_NEAR(stats::mean(ens_lr), 59.1, 0.05);
  EXPECT_NEAR(stats::mean(pair_lr), 54.3, 0.05);
}

TEST(Wilcoxon, AllZeroDifferences) {
  const std::vector<double> a{1, 2, 3};
  const auto r = stats::wilcoxon_signed_rank(a, a);
  EXPECT_EQ(r.n_effective, 0u);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Cliffs, ValuesAndMagnitude) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(stats::cliffs_delta(b, a).delta, 1.0);
  EXPECT_DOUBLE_EQ(stats::cliffs_delta(a, b).delta, -1.0);
  EXPECT_DOUBLE_EQ(stats::cliffs_delta(a, a).delta, 0.0);
  EXPECT_EQ(stats::cliffs_magnitude(0.1), stats::Magnitude::Negligible);
  EXPECT_EQ(stats::cliffs_magnitude(-0.147), stats::Magnitude::Small);
  EXPECT_EQ(stats::cliffs_magnitude(0.33), stats::Magnitude::Medium);
  EXPECT_EQ(stats::cliffs_magnitude(-0.474), stats::Magnitude::Large);
  EXPECT_EQ(stats::short_label(stats::Magnitude::Large), 'L');
}

TEST(Cliffs, AntisymmetricAndMatchesPairs) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(1 + rng.below(20)), b(1 + rng.below(20));
    for (auto& v : a) v = static_cast<double>(rng.below(8));
    for (auto& v : b) v = static_cast<double>(rng.below(8));
    double count = 0.0;
    for (const double x : a)
      for (const double y : b) count += (x > y) - (x < y);
    const double expected = count / static_cast<double>(a.size() * b.size());
    EXPECT_NEAR(stats::cliffs_delta(a, b).delta, expected, 1e-12);
    EXPECT_NEAR(stats::cliffs_delta(b, a).delta, -expected, 1e-12);
  }
}

TEST(TTest, KnownValue) {
  // x = 1..5, mu = 2: t = sqrt(2), df = 4, two-sided p = 0.2302
  const auto r = stats::one_sample_t_test(std::vector<double>{1, 2, 3, 4, 5}, 2.0);
  EXPECT_NEAR(r.t_statistic, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(r.df, 4u);
  EXPECT_NEAR(r.p_value, 0.2302, 1e-4);
}

TEST(Summary, MeanAndMedian) {
  EXPECT_DOUBLE_EQ(stats::mean(std::vector<double>{1, 2, 6}), 3.0);
  EXPECT_DOUBLE_EQ(stats::median({5, 1, 3}), 3.0);
  EXPECT_DOUBLE_EQ(stats::median({4, 1, 3, 2}), 2.5);
}
