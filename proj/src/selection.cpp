#include "hdp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hdp::selection {

std::vector<std::size_t> discretize(std::span<const double> values, std::size_t n_bins) {
  if (values.empty()) throw std::invalid_argument("discretize: empty input");
  if (n_bins < 2) throw std::invalid_argument("discretize: need at least two bins");
  const std::size_t n = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::size_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto below = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    raw[i] = n_bins * below / n;
  }
  std::vector<std::size_t> used = raw;
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (auto& b : raw) b = static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), b) - used.begin());
  return raw;
}

double entropy(std::span<const std::size_t> symbols) {
  if (symbols.empty()) return 0.0;
  std::map<std::size_t, std::size_t> counts;
  for (const auto s : symbols) ++counts[s];
  const double n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [symbol, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double gain_ratio(std::span<const std::size_t> feature_bins, const std::vector<bool>& labels) {
  if (feature_bins.size() != labels.size()) throw std::invalid_argument("gain_ratio: length mismatch");
  if (feature_bins.empty()) return 0.0;
  const double n = static_cast<double>(labels.size());

  // bin -> (clean count, buggy count)
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> table;
  std::size_t n_buggy = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& cell = table[feature_bins[i]];
    if (labels[i]) {
      ++cell.second;
      ++n_buggy;
    } else {
      ++cell.first;
    }
  }
  const auto h2 = [](double a, double b) {
    const double t = a + b;
    double h = 0.0;
    if (a > 0) h -= a / t * std::log2(a / t);
    if (b > 0) h -= b / t * std::log2(b / t);
    return h;
  };

  const double h_label = h2(n - static_cast<double>(n_buggy), static_cast<double>(n_buggy));
  double h_conditional = 0.0;
  double h_feature = 0.0;
  for (const auto& [bin, cell] : table) {
    const double clean = static_cast<double>(cell.first);
    const double buggy = static_cast<double>(cell.second);
    const double p = (clean + buggy) / n;
    h_conditional += p * h2(clean, buggy);
    h_feature -= p * std::log2(p);
  }
  if (h_feature <= 0.0) return 0.0;
  return std::max(0.0, (h_label - h_conditional) / h_feature);
}

std::vector<std::string> SelectedFeatures::metric_names() const {
  std::vector<std::string> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.metric_name);
  return out;
}

std::vector<std::size_t> SelectedFeatures::columns() const {
  std::vector<std::size_t> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.column);
  return out;
}

std::size_t top_count(double fraction, std::size_t n_metrics) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("top_count: fraction must be in (0, 1]");
  const double raw = fraction * static_cast<double>(n_metrics);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(k, n_metrics == 0 ? 0 : 1, n_metrics);
}

std::vector<FeatureScore> score_features(const DefectDataset& dataset, std::size_t n_bins) {
  std::vector<FeatureScore> scores;
  scores.reserve(dataset.n_metrics());
  for (std::size_t c = 0; c < dataset.n_metrics(); ++c) {
    const auto bins = discretize(dataset.column(c), n_bins);
    scores.push_back({dataset.metric_names()[c], c, gain_ratio(bins, dataset.labels())});
  }
  return scores;
}

SelectedFeatures select_top(const DefectDataset& dataset, double fraction, std::size_t n_bins) {
  auto scores = score_features(dataset, n_bins);
  std::stable_sort(scores.begin(), scores.end(), [](const FeatureScore& l, const FeatureScore& r) {
    if (l.gain_ratio != r.gain_ratio) return l.gain_ratio > r.gain_ratio;
    return l.column < r.column;
  });
  scores.resize(top_count(fraction, dataset.n_metrics()));
  return {std::move(scores), fraction};
}

}  // namespace hdp::selection
