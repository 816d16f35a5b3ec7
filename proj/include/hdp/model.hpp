#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hdp/matrix.hpp"

namespace hdp::model {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ClassifierKind { LogisticRegression, RandomForest };

const char* to_string(ClassifierKind k);
/// Short tag used in file names and flags: "lr" or "rf".
const char* short_name(ClassifierKind k);
ClassifierKind parse_classifier(const std::string& s);

struct LogisticParams {
  int max_iterations = 100;
  /// Convergence when the largest coefficient change falls below this.
  double tolerance = 1e-6;
  /// Added to the diagonal of the normal equations.
  double ridge = 1e-8;
  /// |linear score| is capped here during fitting.
  double score_cap = 30.0;
};

struct ForestParams {
  std::size_t n_trees = 100;
  /// 0 selects floor(sqrt(feature count)), at least 1.
  std::size_t features_per_split = 0;
  std::size_t min_leaf_size = 1;
  std::uint64_t seed = 1;
};

struct Hyperparameters {
  LogisticParams lr;
  ForestParams rf;
};

/// Logistic regression fitted by Newton/IRLS on internally standardized
/// features. Constant training columns standardize to 0 and get no weight.
class LogisticModel {
 public:
  static LogisticModel fit(const Matrix& x, const std::vector<bool>& y, const LogisticParams& params = {});

  /// Builds a model directly from standardized-space coefficients.
  LogisticModel(std::vector<double> means, std::vector<double> scales, double intercept,
                std::vector<double> coefficients);

  std::vector<double> predict_proba(const Matrix& x) const;
  double predict_proba(std::span<const double> row) const;

  std::size_t feature_count() const { return means_.size(); }
  double intercept() const { return intercept_; }
  /// Coefficients on the standardized features.
  const std::vector<double>& coefficients() const { return coefficients_; }
  /// Intercept followed by coefficients on the original feature scale.
  std::vector<double> raw_coefficients() const;
  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

 private:
  LogisticModel() = default;

  std::vector<double> means_;
  std::vector<double> scales_;  // 0 marks a constant column
  double intercept_ = 0.0;
  std::vector<double> coefficients_;
  bool converged_ = true;
  int iterations_ = 0;
};

/// Bagged CART trees with Gini splits; each tree draws from its own seeded
/// substream, so the fit depends only on the seed.
class RandomForestModel {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 for a leaf
    double threshold = 0.0;     // go left when value <= threshold
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;  // buggy fraction at a leaf
  };
  using Tree = std::vector<Node>;

  static RandomForestModel fit(const Matrix& x, const std::vector<bool>& y, const ForestParams& params = {});

  std::vector<double> predict_proba(const Matrix& x) const;
  double predict_proba(std::span<const double> row) const;

  std::size_t feature_count() const { return feature_count_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }

 private:
  std::size_t feature_count_ = 0;
  ForestParams params_;
  std::vector<Tree> trees_;
};

/// A fitted classifier of either kind.
class TrainedModel {
 public:
  explicit TrainedModel(LogisticModel m) : model_(std::move(m)) {}
  explicit TrainedModel(RandomForestModel m) : model_(std::move(m)) {}

  ClassifierKind kind() const;
  std::size_t feature_count() const;
  /// Probability of the buggy class for every row. Throws ModelError when the
  /// column count differs from the training feature count.
  std::vector<double> predict_proba(const Matrix& x) const;

  const LogisticModel* logistic() const { return std::get_if<LogisticModel>(&model_); }
  const RandomForestModel* forest() const { return std::get_if<RandomForestModel>(&model_); }

 private:
  std::variant<LogisticModel, RandomForestModel> model_;
};

TrainedModel fit_logistic(const Matrix& x, const std::vector<bool>& y, const Hyperparameters& hp = {});
TrainedModel fit_random_forest(const Matrix& x, const std::vector<bool>& y, const Hyperparameters& hp = {});
TrainedModel fit(ClassifierKind kind, const Matrix& x, const std::vector<bool>& y, const Hyperparameters& hp = {});
std::vector<double> predict_proba(const TrainedModel& m, const Matrix& x);

}  // namespace hdp::model
