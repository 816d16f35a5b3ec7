#include "hdp/experiment.hpp"
#include "hdp_engine.hpp"

namespace hdp::experiment {

EnsembleResult ensemble_hdp(const std::vector<DefectDataset>& sources, const DefectDataset& target,
                            const matching::MatchConfig& match, model::ClassifierKind kind, std::uint64_t seed,
                            const model::Hyperparameters& hp) {
  if (sources.empty()) throw std::invalid_argument("ensemble_hdp: at least one source required");
  EnsembleResult result;
  result.target = target.project_name();

  const detail::PreparedTarget prepared_target(target.metric_names(), target.instances(), target.labels());
  detail::ModelCache cache(kind, hp, seed);
  std::vector<double> vote(target.n_instances(), 0.0);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].project_name() == target.project_name()) continue;
    const detail::PreparedSource source(sources[s], match);
    const auto m = detail::match_prepared(source, prepared_target, match);
    if (!m.feasible) continue;
    const auto probs = detail::predict_matched(source, s, prepared_target, m, cache);
    for (std::size_t i = 0; i < vote.size(); ++i) vote[i] += probs[i];
    result.feasible_sources.push_back(sources[s].project_name());
    result.source_aucs.push_back(stats::auc_roc(probs, target.labels()));
  }
  if (result.feasible_sources.empty()) return result;

  const double k = static_cast<double>(result.feasible_sources.size());
  for (auto& v : vote) v /= k;
  result.ensemble_auc = stats::auc_roc(vote, target.labels());
  result.mean_pairwise_auc = stats::mean(result.source_aucs);
  return result;
}

}  // namespace hdp::experiment
