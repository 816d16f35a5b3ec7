#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hdp/dataset.hpp"

namespace hdp::selection {

/// Equal-frequency discretization. A value's bin is
/// floor(n_bins * #{values strictly below it} / n), compacted to 0..k-1, so
/// equal values always share a bin and at most n_bins bins are used.
std::vector<std::size_t> discretize(std::span<const double> values, std::size_t n_bins);

/// Shannon entropy in bits of a discrete sample.
double entropy(std::span<const std::size_t> symbols);

/// (H(label) - H(label | feature)) / H(feature); 0 when H(feature) = 0.
double gain_ratio(std::span<const std::size_t> feature_bins, const std::vector<bool>& labels);

struct FeatureScore {
  std::string metric_name;
  std::size_t column = 0;
  double gain_ratio = 0.0;
};

struct SelectedFeatures {
  /// Ordered by descending score, ties by ascending column index.
  std::vector<FeatureScore> features;
  double fraction = 1.0;

  std::vector<std::string> metric_names() const;
  std::vector<std::size_t> columns() const;
  std::size_t size() const { return features.size(); }
};

/// ceil(fraction * n_metrics), guarded against floating-point overshoot
/// (0.15 * 20 must give 3, not 4).
std::size_t top_count(double fraction, std::size_t n_metrics);

/// Gain ratio of every metric against the labels, in column order.
std::vector<FeatureScore> score_features(const DefectDataset& dataset, std::size_t n_bins = 10);

SelectedFeatures select_top(const DefectDataset& dataset, double fraction = 0.15, std::size_t n_bins = 10);

}  // namespace hdp::selection
