#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "hdp/experiment.hpp"

namespace hdp::experiment::detail {

/// Source-side work that does not depend on the target: feature selection
/// and the sorted selected columns.
struct PreparedSource {
  const DefectDataset* data = nullptr;
  selection::SelectedFeatures selected;
  matching::SortedColumns sorted;
  std::vector<std::string> names;
  std::vector<std::size_t> columns;

  PreparedSource(const DefectDataset& d, const matching::MatchConfig& config);
};

/// Target-side data for one scoring round (a fold or the whole target).
struct PreparedTarget {
  std::vector<std::string> names;
  std::vector<std::size_t> columns;
  const Matrix* instances = nullptr;
  const std::vector<bool>* labels = nullptr;
  matching::SortedColumns sorted;

  PreparedTarget(const std::vector<std::string>& metric_names, const Matrix& x, const std::vector<bool>& y);
};

/// Fitted source models keyed by (source, training columns). Each entry is
/// fitted once; the seed depends only on the key, so reuse does not change
/// results.
class ModelCache {
 public:
  ModelCache(model::ClassifierKind kind, model::Hyperparameters hp, std::uint64_t global_seed)
      : kind_(kind), hp_(std::move(hp)), seed_(global_seed) {}

  std::shared_ptr<const model::TrainedModel> get(const PreparedSource& source, std::size_t source_id,
                                                 const std::vector<std::size_t>& columns);

 private:
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const model::TrainedModel> model;
  };

  model::ClassifierKind kind_;
  model::Hyperparameters hp_;
  std::uint64_t seed_;
  std::mutex mutex_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::shared_ptr<Slot>> slots_;
};

matching::MetricMatching match_prepared(const PreparedSource& source, const PreparedTarget& target,
                                        const matching::MatchConfig& config);

/// Probabilities for the target under a feasible matching.
std::vector<double> predict_matched(const PreparedSource& source, std::size_t source_id, const PreparedTarget& target,
                                    const matching::MetricMatching& matching, ModelCache& cache);

}  // namespace hdp::experiment::detail
