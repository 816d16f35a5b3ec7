#include <algorithm>
#include <numeric>

#include "hdp/experiment.hpp"
#include "hdp/random.hpp"

namespace hdp::experiment {

namespace {

constexpr std::uint64_t kFoldTag = 0x666f6c64;   // "fold"
constexpr std::uint64_t kWpdpTag = 0x77706470;   // "wpdp"

bool has_both_classes(const std::vector<bool>& y) {
  const auto buggy = std::count(y.begin(), y.end(), true);
  return buggy > 0 && static_cast<std::size_t>(buggy) < y.size();
}

}  // namespace

std::vector<std::size_t> stratified_folds(const std::vector<bool>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: need at least two folds");
  std::vector<std::size_t> buggy, clean;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? buggy : clean).push_back(i);
  Rng rng(seed);
  rng.shuffle(buggy);
  rng.shuffle(clean);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t position = 0;
  for (const auto i : buggy) fold[i] = position++ % k;
  for (const auto i : clean) fold[i] = position++ % k;
  return fold;
}

std::uint64_t fold_seed_base(std::uint64_t global_seed, const std::string& project) {
  return derive_seed(global_seed, {kFoldTag, hash_string(project)});
}

std::uint64_t replication_seed(std::uint64_t fold_base, std::size_t rep) { return derive_seed(fold_base, {rep}); }

std::vector<double> CvResult::present() const {
  std::vector<double> out;
  for (const auto& a : aucs)
    if (a) out.push_back(*a);
  return out;
}

std::optional<double> CvResult::mean() const {
  const auto values = present();
  if (values.empty()) return std::nullopt;
  return stats::mean(values);
}

model::Hyperparameters with_seed(model::Hyperparameters hp, std::uint64_t seed) {
  hp.rf.seed = seed;
  return hp;
}

CvResult wpdp(const DefectDataset& dataset, model::ClassifierKind kind, const CvPlan& plan, std::uint64_t fold_base,
              const model::Hyperparameters& hp) {
  CvResult result;
  result.repeats = plan.repeats;
  result.folds = plan.folds;
  result.aucs.assign(plan.repeats * plan.folds, std::nullopt);
  const auto& labels = dataset.labels();
  for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
    const auto folds = stratified_folds(labels, plan.folds, replication_seed(fold_base, rep));
    for (std::size_t f = 0; f < plan.folds; ++f) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test_rows : train_rows).push_back(i);
      std::vector<bool> train_y, test_y;
      for (const auto i : train_rows) train_y.push_back(labels[i]);
      for (const auto i : test_rows) test_y.push_back(labels[i]);
      if (!has_both_classes(train_y) || !has_both_classes(test_y)) continue;

      const auto model = model::fit(kind, dataset.instances().select_rows(train_rows), train_y,
                                    with_seed(hp, derive_seed(fold_base, {kWpdpTag, rep, f})));
      const auto scores = model.predict_proba(dataset.instances().select_rows(test_rows));
      result.aucs[rep * plan.folds + f] = stats::auc_roc(scores, test_y);
    }
  }
  return result;
}

std::vector<std::string> common_metrics(const DefectDataset& source, const DefectDataset& target) {
  std::vector<std::string> out;
  for (const auto& name : source.metric_names())
    if (target.metric_index(name)) out.push_back(name);
  return out;
}

std::optional<double> cpdp(const DefectDataset& source, const DefectDataset& target, model::ClassifierKind kind,
                           const model::Hyperparameters& hp) {
  const auto shared = common_metrics(source, target);
  if (shared.empty()) return std::nullopt;
  std::vector<std::size_t> source_cols, target_cols;
  for (const auto& name : shared) {
    source_cols.push_back(*source.metric_index(name));
    target_cols.push_back(*target.metric_index(name));
  }
  const auto model = model::fit(kind, source.instances().select_columns(source_cols), source.labels(), hp);
  const auto scores = model.predict_proba(target.instances().select_columns(target_cols));
  return stats::auc_roc(scores, target.labels());
}

}  // namespace hdp::experiment
