#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdp/model.hpp"
#include "hdp/random.hpp"

namespace hdp::model {

namespace {

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini, lower is better
};

double gini(double buggy, double total) {
  if (total <= 0.0) return 0.0;
  const double p = buggy / total;
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<bool>& y, const ForestParams& params, std::size_t mtry, Rng& rng)
      : x_(x), y_(y), params_(params), mtry_(mtry), rng_(rng) {}

  RandomForestModel::Tree build(std::vector<std::size_t> samples) {
    RandomForestModel::Tree tree;
    struct Pending {
      std::uint32_t node;
      std::size_t begin, end;
    };
    samples_ = std::move(samples);
    tree.push_back({});
    std::vector<Pending> stack{{0, 0, samples_.size()}};
    while (!stack.empty()) {
      const auto task = stack.back();
      stack.pop_back();
      const std::size_t n = task.end - task.begin;
      std::size_t buggy = 0;
      for (std::size_t k = task.begin; k < task.end; ++k) buggy += y_[samples_[k]] ? 1 : 0;
      tree[task.node].value = static_cast<double>(buggy) / static_cast<double>(n);

      if (buggy == 0 || buggy == n || n < 2 * params_.min_leaf_size) continue;
      const auto split = find_split(task.begin, task.end, buggy);
      if (split.feature < 0) continue;

      const auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                      samples_.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::size_t s) {
                                        return x_(s, static_cast<std::size_t>(split.feature)) <= split.threshold;
                                      });
      const auto split_at = static_cast<std::size_t>(mid - samples_.begin());
      const auto left = static_cast<std::uint32_t>(tree.size());
      tree.push_back({});
      tree.push_back({});
      tree[task.node].feature = split.feature;
      tree[task.node].threshold = split.threshold;
      tree[task.node].left = left;
      tree[task.node].right = left + 1;
      stack.push_back({left + 1, split_at, task.end});
      stack.push_back({left, task.begin, split_at});
    }
    return tree;
  }

 private:
  // Tries features in a random order; after mtry features the search only
  // continues while no valid split has been found.
  Split find_split(std::size_t begin, std::size_t end, std::size_t buggy_total) {
    const std::size_t p = x_.cols();
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), 0);
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(end - begin);
    for (std::size_t k = 0; k < p; ++k) {
      if (k >= mtry_ && best.feature >= 0) break;
      const auto pick = k + static_cast<std::size_t>(rng_.below(p - k));
      std::swap(features[k], features[pick]);
      const std::size_t f = features[k];

      column_.clear();
      for (std::size_t s = begin; s < end; ++s) column_.push_back({x_(samples_[s], f), y_[samples_[s]]});
      std::sort(column_.begin(), column_.end(),
                [](const auto& l, const auto& r) { return l.first < r.first || (l.first == r.first && l.second < r.second); });

      double left_buggy = 0.0;
      for (std::size_t i = 0; i + 1 < column_.size(); ++i) {
        left_buggy += column_[i].second ? 1.0 : 0.0;
        if (column_[i].first == column_[i + 1].first) continue;
        const double n_left = static_cast<double>(i + 1);
        const double n_right = n - n_left;
        if (i + 1 < params_.min_leaf_size || column_.size() - (i + 1) < params_.min_leaf_size) continue;
        const double right_buggy = static_cast<double>(buggy_total) - left_buggy;
        const double impurity = (n_left * gini(left_buggy, n_left) + n_right * gini(right_buggy, n_right)) / n;
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = static_cast<std::int32_t>(f);
          double threshold = 0.5 * (column_[i].first + column_[i + 1].first);
          if (!(threshold < column_[i + 1].first)) threshold = column_[i].first;
          best.threshold = threshold;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const std::vector<bool>& y_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<std::size_t> samples_;
  std::vector<std::pair<double, bool>> column_;
};

}  // namespace

RandomForestModel RandomForestModel::fit(const Matrix& x, const std::vector<bool>& y, const ForestParams& params) {
  if (x.rows() != y.size()) throw ModelError("fit: row count does not match label count");
  if (x.rows() < 2) throw ModelError("fit: need at least two rows");
  const auto n_buggy = std::count(y.begin(), y.end(), true);
  if (n_buggy == 0 || static_cast<std::size_t>(n_buggy) == y.size())
    throw ModelError("fit: training labels must contain both classes");
  if (params.n_trees == 0 || params.min_leaf_size == 0) throw ModelError("fit: n_trees and min_leaf_size must be positive");
  if (x.cols() == 0) throw ModelError("fit: no features");

  RandomForestModel model;
  model.feature_count_ = x.cols();
  model.params_ = params;
  const std::size_t mtry =
      params.features_per_split > 0
          ? std::min(params.features_per_split, x.cols())
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols())))));

  model.trees_.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, {t}));
    std::vector<std::size_t> bootstrap(x.rows());
    for (auto& s : bootstrap) s = static_cast<std::size_t>(rng.below(x.rows()));
    TreeBuilder builder(x, y, params, mtry, rng);
    model.trees_.push_back(builder.build(std::move(bootstrap)));
  }
  return model;
}

double RandomForestModel::predict_proba(std::span<const double> row) const {
  if (row.size() != feature_count_) throw ModelError("predict_proba: feature count mismatch");
  double sum = 0.0;
  for (const auto& tree : trees_) {
    std::uint32_t node = 0;
    while (tree[node].feature >= 0)
      node = row[static_cast<std::size_t>(tree[node].feature)] <= tree[node].threshold ? tree[node].left : tree[node].right;
    sum += tree[node].value;
  }
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> RandomForestModel::predict_proba(const Matrix& x) const {
  if (x.cols() != feature_count_) throw ModelError("predict_proba: feature count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_proba(x.row(r));
  return out;
}

}  // namespace hdp::model
