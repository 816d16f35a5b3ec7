#pragma once

// Slow, direct reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hdp/matrix.hpp"
#include "hdp/random.hpp"

namespace hdp::oracle {

/// Best total weight over every partial injective assignment of rows to
/// columns using present edges only.
inline double brute_force_matching(const Matrix& w, const std::vector<std::uint8_t>& present) {
  const std::size_t rows = w.rows(), cols = w.cols();
  std::vector<bool> used(cols, false);
  double best = 0.0;
  const auto recurse = [&](auto&& self, std::size_t r, double total) -> void {
    if (r == rows) {
      best = std::max(best, total);
      return;
    }
    self(self, r + 1, total);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c] || !present[r * cols + c]) continue;
      used[c] = true;
      self(self, r + 1, total + w(r, c));
      used[c] = false;
    }
  };
  recurse(recurse, 0, 0.0);
  return best;
}

/// AUC by counting every (buggy, clean) pair; ties count one half.
inline double pair_count_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Largest ECDF gap, evaluated at every observed value.
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  const auto ecdf = [](const std::vector<double>& s, double x) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= x; })) /
           static_cast<double>(s.size());
  };
  for (const auto& sample : {a, b})
    for (const double x : sample) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
  return d;
}

/// Permutation p-value of the KS statistic: share of label shuffles whose
/// statistic reaches the observed one.
inline double permutation_ks_p(const std::vector<double>& a, const std::vector<double>& b, std::size_t shuffles,
                               std::uint64_t seed) {
  // Sweep form of the statistic for speed; the direct form above checks it.
  const auto sweep = [](std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
      const double v = std::min(x[i], y[j]);
      while (i < x.size() && x[i] == v) ++i;
      while (j < y.size() && y[j] == v) ++j;
      d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
    }
    return d;
  };
  const double observed = sweep(a, b);
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    rng.shuffle(pooled);
    const std::vector<double> x(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(a.size()));
    const std::vector<double> y(pooled.begin() + static_cast<std::ptrdiff_t>(a.size()), pooled.end());
    if (sweep(x, y) >= observed - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(shuffles);
}

/// Shannon entropy in bits of a count vector.
inline double entropy_of_counts(const std::vector<double>& counts) {
  double total = 0.0;
  for (const double c : counts) total += c;
  double h = 0.0;
  for (const double c : counts)
    if (c > 0) h -= c / total * std::log2(c / total);
  return h;
}

/// Gain ratio from a feature-by-class contingency table.
inline double gain_ratio_from_table(const std::vector<std::vector<double>>& table) {
  std::vector<double> row_totals, class_totals(table.empty() ? 0 : table[0].size(), 0.0);
  double total = 0.0;
  for (const auto& row : table) {
    double r = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      r += row[k];
      class_totals[k] += row[k];
    }
    row_totals.push_back(r);
    total += r;
  }
  double conditional = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (row_totals[i] > 0) conditional += row_totals[i] / total * entropy_of_counts(table[i]);
  const double split = entropy_of_counts(row_totals);
  if (split <= 0.0) return 0.0;
  return (entropy_of_counts(class_totals) - conditional) / split;
}

/// Unpenalized logistic regression by plain gradient ascent on standardized
/// features, returned on the raw scale (intercept first).
inline std::vector<double> gradient_descent_logistic(const Matrix& x, const std::vector<bool>& y,
                                                     std::size_t max_iterations = 400000) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < n; ++r) mean[c] += x(r, c);
    mean[c] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) sd[c] += (x(r, c) - mean[c]) * (x(r, c) - mean[c]);
    sd[c] = std::sqrt(sd[c] / static_cast<double>(n));
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(p + 1, 1.0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) z[r][c + 1] = (x(r, c) - mean[c]) / sd[c];
  // Lipschitz bound of the mean log-likelihood gradient.
  double lipschitz = 0.0;
  for (const auto& row : z) {
    double s = 0.0;
    for (const double v : row) s += v * v;
    lipschitz += 0.25 * s;
  }
  lipschitz /= static_cast<double>(n);
  const double step = 1.0 / lipschitz;
  std::vector<double> beta(p + 1, 0.0), grad(p + 1);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double eta = 0.0;
      for (std::size_t c = 0; c <= p; ++c) eta += beta[c] * z[r][c];
      const double residual = (y[r] ? 1.0 : 0.0) - 1.0 / (1.0 + std::exp(-eta));
      for (std::size_t c = 0; c <= p; ++c) grad[c] += residual * z[r][c];
    }
    double norm = 0.0;
    for (std::size_t c = 0; c <= p; ++c) {
      grad[c] /= static_cast<double>(n);
      norm = std::max(norm, std::abs(grad[c]));
      beta[c] += step * grad[c];
    }
    if (norm < 1e-11) break;
  }
  std::vector<double> raw(p + 1, 0.0);
  raw[0] = beta[0];
  for (std::size_t c = 0; c < p; ++c) {
    raw[c + 1] = beta[c + 1] / sd[c];
    raw[0] -= beta[c + 1] * mean[c] / sd[c];
  }
  return raw;
}

/// Two-sided exact signed-rank p-value by enumerating every sign pattern of
/// the observed (mid)ranks. Zero differences are dropped.
inline double exact_wilcoxon_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  const std::size_t n = d.size();
  if (n == 0) return 1.0;
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) below += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
    }
    ranks[i] = below + (equal + 1.0) / 2.0;
  }
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0) observed += ranks[i];
  std::size_t lower = 0, upper = 0;
  const std::size_t patterns = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += ranks[i];
    if (w <= observed + 1e-9) ++lower;
    if (w >= observed - 1e-9) ++upper;
  }
  const double p = 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(patterns);
  return std::min(1.0, p);
}

}  // namespace hdp::oracle
