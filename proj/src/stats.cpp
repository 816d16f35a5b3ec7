#include "hdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace hdp::stats {

double kolmogorov_q(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form of the same function; the alternating series
    // converges too slowly for small lambda.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k < 64; k += 2) {
      const double term = std::pow(y, k * k);
      sum += term;
      if (term < 1e-16) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-10) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw StatsError("ks_two_sample: empty sample");
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  // Once one sample is exhausted its ECDF is 1; the other only climbs toward 1.
  KsResult r;
  r.d_statistic = d;
  const double effective = n * m / (n + m);
  r.p_value = kolmogorov_q(d * std::sqrt(effective));
  return r;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return ks_two_sample_sorted(sa, sb);
}

std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return x[l] < x[r]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw StatsError("mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  if (x.empty()) throw StatsError("median: empty input");
  std::sort(x.begin(), x.end());
  const auto n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("pearson: length mismatch");
  if (x.size() < 2) throw StatsError("pearson: need at least two observations");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("spearman: length mismatch");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

double auc_roc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw StatsError("auc_roc: length mismatch");
  const auto ranks = midranks(scores);
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (labels[i]) {
      rank_sum += ranks[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw StatsError("auc_roc: labels must contain both classes");
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

namespace {

double normal_two_sided(double z) { return std::min(1.0, std::erfc(std::abs(z) / std::numbers::sqrt2)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, bool continuity_correction,
                                    WilcoxonMethod method) {
  if (a.size() != b.size()) throw StatsError("wilcoxon_signed_rank: length mismatch");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (const double d = a[i] - b[i]; d != 0.0) diffs.push_back(d);

  WilcoxonResult r;
  r.n_effective = diffs.size();
  if (diffs.empty()) return r;

  std::vector<double> abs_diffs(diffs.size());
  std::transform(diffs.begin(), diffs.end(), abs_diffs.begin(), [](double d) { return std::abs(d); });
  const auto ranks = midranks(abs_diffs);

  // Mid-ranks are multiples of 1/2, so doubled ranks are exact integers.
  std::vector<long> doubled(ranks.size());
  long doubled_positive = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = std::lround(2.0 * ranks[i]);
    if (diffs[i] > 0.0) doubled_positive += doubled[i];
  }
  r.statistic = 0.5 * static_cast<double>(doubled_positive);

  const std::size_t n = diffs.size();
  const bool exact = method == WilcoxonMethod::Exact || (method == WilcoxonMethod::Auto && n < 50);
  if (exact) {
    const long total = std::accumulate(doubled.begin(), doubled.end(), 0L);
    // counts[s] = number of sign assignments whose positive doubled-rank sum is s.
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (const long w : doubled) {
      for (long s = reach; s >= 0; --s)
        if (counts[static_cast<std::size_t>(s)] != 0.0) counts[static_cast<std::size_t>(s + w)] += counts[static_cast<std::size_t>(s)];
      reach += w;
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double lower = 0.0, upper = 0.0;
    for (long s = 0; s <= total; ++s) {
      if (s <= doubled_positive) lower += counts[static_cast<std::size_t>(s)];
      if (s >= doubled_positive) upper += counts[static_cast<std::size_t>(s)];
    }
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    return r;
  }

  const double nn = static_cast<double>(n);
  const double expected = nn * (nn + 1.0) / 4.0;
  double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  {
    std::vector<double> sorted = abs_diffs;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i + 1;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      variance -= (t * t * t - t) / 48.0;
      i = j;
    }
  }
  if (variance <= 0.0) return r;
  double z = r.statistic - expected;
  if (continuity_correction) z -= (z > 0.0 ? 0.5 : (z < 0.0 ? -0.5 : 0.0));
  r.p_value = normal_two_sided(z / std::sqrt(variance));
  return r;
}

const char* to_string(Magnitude m) {
  switch (m) {
    case Magnitude::Negligible:
      return "negligible";
    case Magnitude::Small:
      return "small";
    case Magnitude::Medium:
      return "medium";
    case Magnitude::Large:
      return "large";
  }
  return "?";
}

char short_label(Magnitude m) {
  switch (m) {
    case Magnitude::Negligible:
      return 'N';
    case Magnitude::Small:
      return 'S';
    case Magnitude::Medium:
      return 'M';
    case Magnitude::Large:
      return 'L';
  }
  return '?';
}

Magnitude cliffs_magnitude(double delta) {
  const double a = std::abs(delta);
  if (a < 0.147) return Magnitude::Negligible;
  if (a < 0.33) return Magnitude::Small;
  if (a < 0.474) return Magnitude::Medium;
  return Magnitude::Large;
}

CliffsDelta cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw StatsError("cliffs_delta: empty sample");
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  double dominance = 0.0;
  for (const double x : a) {
    const auto below = std::lower_bound(sb.begin(), sb.end(), x) - sb.begin();
    const auto above = sb.end() - std::upper_bound(sb.begin(), sb.end(), x);
    dominance += static_cast<double>(below) - static_cast<double>(above);
  }
  CliffsDelta c;
  c.delta = std::clamp(dominance / (static_cast<double>(a.size()) * static_cast<double>(b.size())), -1.0, 1.0);
  c.magnitude = cliffs_magnitude(c.delta);
  return c;
}

TTestResult one_sample_t_test(std::span<const double> x, double mu) {
  if (x.size() < 2) throw StatsError("one_sample_t_test: need at least two observations");
  TTestResult r;
  r.mean = mean(x);
  r.df = x.size() - 1;
  double ss = 0.0;
  for (const double v : x) ss += (v - r.mean) * (v - r.mean);
  const double se = std::sqrt(ss / static_cast<double>(r.df)) / std::sqrt(static_cast<double>(x.size()));
  if (se == 0.0) {
    r.t_statistic = r.mean == mu ? 0.0 : std::copysign(INFINITY, r.mean - mu);
    r.p_value = r.mean == mu ? 1.0 : 0.0;
    return r;
  }
  r.t_statistic = (r.mean - mu) / se;
  const boost::math::students_t dist(static_cast<double>(r.df));
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic))));
  return r;
}

}  // namespace hdp::stats
