#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hdp::stats {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct KsResult {
  double d_statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// effective size n*m/(n+m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Same as ks_two_sample, for inputs that are already sorted ascending.
KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b);

/// Fractional (mid) ranks, 1-based.
std::vector<double> midranks(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation. Defined as 0 when either input is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// ROC AUC as the Mann-Whitney statistic with mid-ranks for ties.
double auc_roc(std::span<const double> scores, const std::vector<bool>& labels);

enum class WilcoxonMethod {
  /// Exact when fewer than 50 nonzero differences, normal otherwise.
  Auto,
  Exact,
  Normal,
};

struct WilcoxonResult {
  /// Sum of ranks of positive differences (a - b).
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_effective = 0;
};

/// Paired two-sided Wilcoxon signed-rank test on a - b. Zero differences are
/// dropped; tied absolute differences share mid-ranks. The exact path
/// enumerates the sign-flip distribution of the observed ranks, so it is
/// exact conditional on ties.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    bool continuity_correction = true,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

enum class Magnitude { Negligible, Small, Medium, Large };

const char* to_string(Magnitude m);
/// One-letter label (N, S, M, L).
char short_label(Magnitude m);

struct CliffsDelta {
  double delta = 0.0;
  Magnitude magnitude = Magnitude::Negligible;
};

Magnitude cliffs_magnitude(double delta);

/// (#{a_i > b_j} - #{a_i < b_j}) / (|a| |b|).
CliffsDelta cliffs_delta(std::span<const double> a, std::span<const double> b);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  double mean = 0.0;
  std::size_t df = 0;
};

/// Two-sided one-sample Student t-test of mean(x) == mu.
TTestResult one_sample_t_test(std::span<const double> x, double mu);

double mean(std::span<const double> x);
double median(std::vector<double> x);

}  // namespace hdp::stats
