#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdp/dataset.hpp"
#include "hdp/matching.hpp"
#include "hdp/model.hpp"
#include "hdp/stats.hpp"

namespace hdp::experiment {

/// An AUC, or nullopt for a missing cell (infeasible HDP, single-class fold).
using Auc = std::optional<double>;

// --- cross-validation -------------------------------------------------------

/// Stratified fold assignment: each class is shuffled independently and dealt
/// round-robin into k folds, the dealing position carrying over from the
/// buggy class to the clean class so fold sizes differ by at most one.
std::vector<std::size_t> stratified_folds(const std::vector<bool>& labels, std::size_t k, std::uint64_t seed);

struct CvPlan {
  std::size_t repeats = 10;
  std::size_t folds = 10;

  /// 10 x 10-fold, for the WPDP/CPDP table.
  static CvPlan ten_by_ten() { return {10, 10}; }
  /// n x 2-fold, the layout shared with the HDP grid.
  static CvPlan two_fold(std::size_t repeats = 100) { return {repeats, 2}; }
};

/// Seed base for all fold splits of one target project. WPDP and HDP use the
/// same base so their folds are identical and can be paired.
std::uint64_t fold_seed_base(std::uint64_t global_seed, const std::string& project);
/// Seed of the split for replication `rep` under a fold seed base.
std::uint64_t replication_seed(std::uint64_t fold_base, std::size_t rep);

struct CvResult {
  std::size_t repeats = 0;
  std::size_t folds = 0;
  /// Indexed rep * folds + fold.
  std::vector<Auc> aucs;

  Auc at(std::size_t rep, std::size_t fold) const { return aucs[rep * folds + fold]; }
  std::vector<double> present() const;
  /// Mean over present cells; nullopt when none.
  std::optional<double> mean() const;
};

/// Model hyperparameters for one fit, with the forest seed filled in.
model::Hyperparameters with_seed(model::Hyperparameters hp, std::uint64_t seed);

/// Within-project prediction: for every replication the dataset is split into
/// stratified folds; each fold is scored by a model trained on the others.
CvResult wpdp(const DefectDataset& dataset, model::ClassifierKind kind, const CvPlan& plan, std::uint64_t fold_base,
              const model::Hyperparameters& hp = {});

// --- cross-project with shared metrics --------------------------------------

/// Metric names of `source` that also occur in `target`, in source order.
std::vector<std::string> common_metrics(const DefectDataset& source, const DefectDataset& target);

/// Trains on the metrics shared by name and tests once on the whole target.
/// nullopt when the two datasets share no metric.
std::optional<double> cpdp(const DefectDataset& source, const DefectDataset& target, model::ClassifierKind kind,
                           const model::Hyperparameters& hp = {});

// --- heterogeneous prediction -----------------------------------------------

struct HdpConfig {
  matching::MatchConfig match;
  model::ClassifierKind kind = model::ClassifierKind::LogisticRegression;
  std::size_t n_repeats = 100;
  std::uint64_t seed = 1;
  model::Hyperparameters hp;
  std::size_t jobs = 1;
};

/// Seed of the HDP model trained on `source` with the given columns; depends
/// only on the training side so one fit can serve every target.
std::uint64_t hdp_model_seed(std::uint64_t global_seed, const std::string& source,
                             std::span<const std::size_t> source_columns);

/// (source, target, replication, fold) -> AUC or missing, over 2-fold CV of
/// every target. Self pairs are never filled.
class AucGrid {
 public:
  AucGrid() = default;
  AucGrid(std::vector<std::string> projects, std::vector<std::string> groups, std::size_t n_repeats);

  static constexpr std::size_t kFolds = 2;

  const std::vector<std::string>& projects() const { return projects_; }
  const std::vector<std::string>& groups() const { return groups_; }
  std::size_t n_projects() const { return projects_.size(); }
  std::size_t n_repeats() const { return n_repeats_; }
  std::size_t cells_per_pair() const { return n_repeats_ * kFolds; }

  Auc& at(std::size_t source, std::size_t target, std::size_t rep, std::size_t fold);
  const Auc& at(std::size_t source, std::size_t target, std::size_t rep, std::size_t fold) const;
  std::span<const Auc> pair(std::size_t source, std::size_t target) const;
  std::span<Auc> pair(std::size_t source, std::size_t target);

  std::size_t feasible_count(std::size_t source, std::size_t target) const;
  double missing_fraction(std::size_t source, std::size_t target) const;
  std::optional<std::size_t> project_index(const std::string& name) const;

  /// Configuration the grid was produced with (informational).
  HdpConfig config;

 private:
  std::vector<std::string> projects_;
  std::vector<std::string> groups_;
  std::size_t n_repeats_ = 0;
  std::vector<Auc> cells_;
};

struct PairSummary {
  std::string source;
  std::string target;
  std::size_t n_feasible = 0;
  std::size_t n_total = 0;
  std::optional<double> mean_auc;
  bool feasible_under_threshold = false;
};

/// A pair is feasible at a NaN threshold when it has at least one AUC and its
/// fraction of missing cells is at most the threshold.
bool pair_feasible(const AucGrid& grid, std::size_t source, std::size_t target, double nan_threshold);

PairSummary summarize_pair(const AucGrid& grid, std::size_t source, std::size_t target, double nan_threshold);

struct PairResult {
  std::vector<Auc> cells;  // rep * 2 + fold
  PairSummary summary;
};

/// One (source, target) pair: for each replication and each of the two
/// stratified target folds, match the source against that fold; record a
/// missing cell when infeasible, else train on the matched source metrics and
/// score the fold.
PairResult hdp_pairwise(const DefectDataset& source, const DefectDataset& target, const HdpConfig& config,
                        double nan_threshold = 0.99);

using PairProgress = std::function<void(const PairSummary&)>;

/// Every ordered pair of distinct datasets. Results are identical for any
/// `config.jobs`; `progress` is called once per completed pair (from worker
/// threads, in completion order).
AucGrid hdp_grid(const std::vector<DefectDataset>& datasets, const HdpConfig& config,
                 const PairProgress& progress = {}, double nan_threshold = 0.99);

struct FeasibilityPoint {
  double threshold = 0.0;
  std::size_t feasible_pairs = 0;
  std::size_t total_pairs = 0;
};

std::vector<FeasibilityPoint> feasibility_curve(const AucGrid& grid, std::span<const double> nan_thresholds);

struct ComparisonRecord {
  std::string target;
  double wpdp_mean = 0.0;
  std::optional<double> hdp_mean;
  std::optional<stats::CliffsDelta> cliffs;
  std::size_t n_feasible_cells = 0;  // over all sources
  std::size_t n_total_cells = 0;
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;

  double predictability() const {
    return n_total_cells == 0 ? 0.0 : static_cast<double>(n_feasible_cells) / static_cast<double>(n_total_cells);
  }
};

/// Per target: paired Wilcoxon between WPDP and HDP AUCs on the same folds for
/// every source feasible at the NaN threshold (tie when p >= alpha, otherwise
/// the sign of the median HDP - WPDP difference), and Cliff's delta of the
/// pooled HDP AUCs against the WPDP AUCs. `wpdp` holds one 2-fold CvResult
/// per grid project, built from the same fold seeds.
std::vector<ComparisonRecord> compare_wpdp_hdp(const AucGrid& grid, const std::vector<CvResult>& wpdp,
                                               double alpha = 0.05, double nan_threshold = 0.99);

// --- ensemble ---------------------------------------------------------------

struct EnsembleResult {
  std::string target;
  std::vector<std::string> feasible_sources;
  std::vector<double> source_aucs;
  std::optional<double> ensemble_auc;
  std::optional<double> mean_pairwise_auc;

  bool has_feasible_source() const { return !feasible_sources.empty(); }
};

/// Matches every source against the whole target; each feasible source's
/// model scores the target and the per-instance probabilities are averaged.
/// Sources with the target's project name are skipped.
EnsembleResult ensemble_hdp(const std::vector<DefectDataset>& sources, const DefectDataset& target,
                            const matching::MatchConfig& match, model::ClassifierKind kind, std::uint64_t seed,
                            const model::Hyperparameters& hp = {});

// --- domain-agnostic similarity ---------------------------------------------

struct SimilarityDetail {
  std::vector<std::string> metrics;          // top three by |Spearman| with the label on the training side
  std::vector<double> train_correlations;    // pairwise Spearman among them
  std::vector<double> test_correlations;
  double distance = 0.0;
};

/// Distance between training and test projects: the training project's three
/// metrics most correlated with the label (among metrics the test project also
/// has), the three pairwise correlations among them in each project, and the
/// Euclidean distance between those vectors. nullopt when fewer than three
/// metrics are shared.
std::optional<SimilarityDetail> domain_agnostic_distance(const DefectDataset& train, const DefectDataset& test);

struct SimilarityChoice {
  std::optional<std::size_t> chosen;  // index into the candidates
  std::vector<std::optional<double>> distances;

  bool selectable() const { return chosen.has_value(); }
};

/// Picks the candidate closest to the target; candidates with the target's
/// project name are not eligible. Ties go to the earlier candidate.
SimilarityChoice domain_agnostic_select(const std::vector<DefectDataset>& candidates, const DefectDataset& target);

struct DomainAgnosticOutcome {
  std::string target;
  std::optional<std::string> chosen;
  std::optional<double> distance;
  std::optional<double> auc;
  std::optional<double> normalized_auc;  // auc / WPDP mean
};

struct DomainAgnosticEvaluation {
  std::vector<DomainAgnosticOutcome> outcomes;
  std::optional<stats::TTestResult> t_test;  // normalized AUCs against 1
};

/// For every dataset, trains on the closest other dataset (over shared metric
/// names) and normalizes the AUC by that target's WPDP mean.
DomainAgnosticEvaluation domain_agnostic_evaluation(const std::vector<DefectDataset>& datasets,
                                                    const std::vector<std::optional<double>>& wpdp_means,
                                                    model::ClassifierKind kind, std::uint64_t seed,
                                                    const model::Hyperparameters& hp = {});

// --- target prediction coverage ---------------------------------------------

struct GroupCell {
  std::size_t feasible_pairs = 0;
  std::size_t total_pairs = 0;
  double percentage = 0.0;
};

struct GroupSummary {
  std::string group;
  std::optional<double> median_wpdp;
  std::optional<double> median_hdp;
  std::size_t covered_targets = 0;
  double coverage_percentage = 0.0;
};

struct CoverageReport {
  std::vector<std::string> groups;  // order of first appearance in the grid
  std::vector<std::vector<GroupCell>> cells;  // [source group][target group]
  std::vector<GroupSummary> sources;
  std::size_t n_datasets = 0;
};

/// Per (source group, target group): pairs feasible at the threshold over all
/// distinct pairs. Per source group: share of all datasets predictable by at
/// least one member, the median WPDP mean of its members and the median HDP
/// AUC over its feasible pairs' cells.
CoverageReport coverage_report(const AucGrid& grid, double nan_threshold,
                               const std::vector<std::optional<double>>& wpdp_means = {});

}  // namespace hdp::experiment
