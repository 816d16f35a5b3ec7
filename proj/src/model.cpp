#include "hdp/csv.hpp"
#include "hdp/model.hpp"

namespace hdp::model {

const char* to_string(ClassifierKind k) {
  return k == ClassifierKind::LogisticRegression ? "LogisticRegression" : "RandomForest";
}

const char* short_name(ClassifierKind k) { return k == ClassifierKind::LogisticRegression ? "lr" : "rf"; }

ClassifierKind parse_classifier(const std::string& s) {
  const auto v = csv::to_lower(s);
  if (v == "lr" || v == "logistic") return ClassifierKind::LogisticRegression;
  if (v == "rf" || v == "forest") return ClassifierKind::RandomForest;
  throw ModelError("unknown classifier '" + s + "' (expected lr or rf)");
}

ClassifierKind TrainedModel::kind() const {
  return std::holds_alternative<LogisticModel>(model_) ? ClassifierKind::LogisticRegression
                                                        : ClassifierKind::RandomForest;
}

std::size_t TrainedModel::feature_count() const {
  return std::visit([](const auto& m) { return m.feature_count(); }, model_);
}

std::vector<double> TrainedModel::predict_proba(const Matrix& x) const {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
}

TrainedModel fit_logistic(const Matrix& x, const std::vector<bool>& y, const Hyperparameters& hp) {
  return TrainedModel(LogisticModel::fit(x, y, hp.lr));
}

TrainedModel fit_random_forest(const Matrix& x, const std::vector<bool>& y, const Hyperparameters& hp) {
  return TrainedModel(RandomForestModel::fit(x, y, hp.rf));
}

TrainedModel fit(ClassifierKind kind, const Matrix& x, const std::vector<bool>& y, const Hyperparameters& hp) {
  return kind == ClassifierKind::LogisticRegression ? fit_logistic(x, y, hp) : fit_random_forest(x, y, hp);
}

std::vector<double> predict_proba(const TrainedModel& m, const Matrix& x) { return m.predict_proba(x); }

}  // namespace hdp::model
