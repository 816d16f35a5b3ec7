#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdp/experiment.hpp"
#include "hdp/random.hpp"

namespace hdp::experiment {

namespace {

constexpr std::size_t kTopMetrics = 3;
constexpr std::uint64_t kSimilarityTag = 0x73696d;  // "sim"

std::vector<double> pairwise_spearman(const DefectDataset& d, const std::vector<std::string>& metrics) {
  std::vector<std::vector<double>> columns;
  for (const auto& name : metrics) columns.push_back(d.column(*d.metric_index(name)));
  std::vector<double> out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t j = i + 1; j < columns.size(); ++j) out.push_back(stats::spearman(columns[i], columns[j]));
  return out;
}

}  // namespace

std::optional<SimilarityDetail> domain_agnostic_distance(const DefectDataset& train, const DefectDataset& test) {
  const auto shared = common_metrics(train, test);
  if (shared.size() < kTopMetrics) return std::nullopt;

  std::vector<double> label(train.n_instances());
  for (std::size_t i = 0; i < label.size(); ++i) label[i] = train.labels()[i] ? 1.0 : 0.0;
  std::vector<double> strength;
  for (const auto& name : shared)
    strength.push_back(std::abs(stats::spearman(train.column(*train.metric_index(name)), label)));

  // Stable order: stronger first, earlier metric on ties.
  std::vector<std::size_t> order(shared.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return strength[a] > strength[b]; });

  SimilarityDetail detail;
  for (std::size_t k = 0; k < kTopMetrics; ++k) detail.metrics.push_back(shared[order[k]]);
  detail.train_correlations = pairwise_spearman(train, detail.metrics);
  detail.test_correlations = pairwise_spearman(test, detail.metrics);
  double sum = 0.0;
  for (std::size_t k = 0; k < detail.train_correlations.size(); ++k) {
    const double d = detail.train_correlations[k] - detail.test_correlations[k];
    sum += d * d;
  }
  detail.distance = std::sqrt(sum);
  return detail;
}

SimilarityChoice domain_agnostic_select(const std::vector<DefectDataset>& candidates, const DefectDataset& target) {
  SimilarityChoice choice;
  choice.distances.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (candidates[c].project_name() == target.project_name()) continue;
    const auto detail = domain_agnostic_distance(candidates[c], target);
    if (!detail) continue;
    choice.distances[c] = detail->distance;
    if (!choice.chosen || detail->distance < *choice.distances[*choice.chosen]) choice.chosen = c;
  }
  return choice;
}

DomainAgnosticEvaluation domain_agnostic_evaluation(const std::vector<DefectDataset>& datasets,
                                                    const std::vector<std::optional<double>>& wpdp_means,
                                                    model::ClassifierKind kind, std::uint64_t seed,
                                                    const model::Hyperparameters& hp) {
  if (wpdp_means.size() != datasets.size())
    throw std::invalid_argument("domain_agnostic_evaluation: one WPDP mean per dataset");
  DomainAgnosticEvaluation eval;
  std::vector<double> normalized;
  for (std::size_t t = 0; t < datasets.size(); ++t) {
    const auto& target = datasets[t];
    DomainAgnosticOutcome outcome;
    outcome.target = target.project_name();
    const auto choice = domain_agnostic_select(datasets, target);
    if (choice.chosen) {
      const auto& source = datasets[*choice.chosen];
      outcome.chosen = source.project_name();
      outcome.distance = choice.distances[*choice.chosen];
      const auto model_seed = derive_seed(seed, {kSimilarityTag, hash_string(source.project_name())});
      outcome.auc = cpdp(source, target, kind, with_seed(hp, model_seed));
      if (outcome.auc && wpdp_means[t] && *wpdp_means[t] > 0.0) {
        outcome.normalized_auc = *outcome.auc / *wpdp_means[t];
        normalized.push_back(*outcome.normalized_auc);
      }
    }
    eval.outcomes.push_back(std::move(outcome));
  }
  if (normalized.size() >= 2) eval.t_test = stats::one_sample_t_test(normalized, 1.0);
  return eval;
}

}  // namespace hdp::experiment
