#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>

#include "hdp/experiment.hpp"
#include "hdp/parallel.hpp"
#include "hdp/random.hpp"
#include "hdp_engine.hpp"

namespace hdp::experiment {

namespace detail {

PreparedSource::PreparedSource(const DefectDataset& d, const matching::MatchConfig& config)
    : data(&d), selected(selection::select_top(d, config.fraction, config.n_bins)) {
  names = selected.metric_names();
  columns = selected.columns();
  sorted = matching::SortedColumns::from(d.instances(), columns);
}

PreparedTarget::PreparedTarget(const std::vector<std::string>& metric_names, const Matrix& x,
                               const std::vector<bool>& y)
    : names(metric_names), columns(x.cols()), instances(&x), labels(&y), sorted(matching::SortedColumns::from(x)) {
  std::iota(columns.begin(), columns.end(), 0);
}

std::shared_ptr<const model::TrainedModel> ModelCache::get(const PreparedSource& source, std::size_t source_id,
                                                           const std::vector<std::size_t>& columns) {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(mutex_);
    auto& entry = slots_[{source_id, columns}];
    if (!entry) entry = std::make_shared<Slot>();
    slot = entry;
  }
  std::call_once(slot->once, [&] {
    const auto& d = *source.data;
    const auto seed = hdp_model_seed(seed_, d.project_name(), columns);
    slot->model = std::make_shared<const model::TrainedModel>(
        model::fit(kind_, d.instances().select_columns(columns), d.labels(), with_seed(hp_, seed)));
  });
  return slot->model;
}

matching::MetricMatching match_prepared(const PreparedSource& source, const PreparedTarget& target,
                                        const matching::MatchConfig& config) {
  auto scores = matching::score_matrix(source.sorted, source.names, source.columns, target.sorted, target.names,
                                       target.columns);
  return matching::max_weight_matching(matching::apply_cutoff(std::move(scores), config.cutoff), config.policy);
}

std::vector<double> predict_matched(const PreparedSource& source, std::size_t source_id, const PreparedTarget& target,
                                    const matching::MetricMatching& matching, ModelCache& cache) {
  const auto model = cache.get(source, source_id, matching.source_columns());
  return model->predict_proba(target.instances->select_columns(matching.target_columns()));
}

}  // namespace detail

namespace {

constexpr std::uint64_t kModelTag = 0x6d6f64656c;  // "model"

/// Fills the grid for the given ordered pairs (each listed target against the
/// listed sources).
void run_grid(const std::vector<const DefectDataset*>& datasets, const std::vector<std::size_t>& targets,
              const std::vector<std::size_t>& sources, const HdpConfig& config, AucGrid& grid,
              const PairProgress& progress, double nan_threshold) {
  // Source preparation, one per source dataset.
  std::vector<std::unique_ptr<detail::PreparedSource>> prepared(datasets.size());
  parallel_for(sources.size(), config.jobs, [&](std::size_t k) {
    const auto s = sources[k];
    prepared[s] = std::make_unique<detail::PreparedSource>(*datasets[s], config.match);
  });

  detail::ModelCache cache(config.kind, config.hp, config.seed);
  const std::size_t reps = config.n_repeats;
  std::vector<std::atomic<std::size_t>> remaining(datasets.size());
  for (const auto t : targets) remaining[t] = reps;
  std::mutex progress_mutex;

  parallel_for(targets.size() * reps, config.jobs, [&](std::size_t task) {
    const std::size_t t = targets[task / reps];
    const std::size_t rep = task % reps;
    const auto& target = *datasets[t];
    const auto folds = stratified_folds(
        target.labels(), AucGrid::kFolds, replication_seed(fold_seed_base(config.seed, target.project_name()), rep));
    for (std::size_t f = 0; f < AucGrid::kFolds; ++f) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < folds.size(); ++i)
        if (folds[i] == f) rows.push_back(i);
      const Matrix fold_x = target.instances().select_rows(rows);
      std::vector<bool> fold_y;
      fold_y.reserve(rows.size());
      for (const auto i : rows) fold_y.push_back(target.labels()[i]);
      const auto buggy = std::count(fold_y.begin(), fold_y.end(), true);
      if (buggy == 0 || static_cast<std::size_t>(buggy) == fold_y.size()) continue;

      const detail::PreparedTarget prepared_target(target.metric_names(), fold_x, fold_y);
      for (const auto s : sources) {
        if (s == t) continue;
        const auto m = detail::match_prepared(*prepared[s], prepared_target, config.match);
        if (!m.feasible) continue;
        const auto scores = detail::predict_matched(*prepared[s], s, prepared_target, m, cache);
        grid.at(s, t, rep, f) = stats::auc_roc(scores, fold_y);
      }
    }
    if (remaining[t].fetch_sub(1) == 1 && progress) {
      std::lock_guard lock(progress_mutex);
      for (const auto s : sources)
        if (s != t) progress(summarize_pair(grid, s, t, nan_threshold));
    }
  });
}

}  // namespace

std::uint64_t hdp_model_seed(std::uint64_t global_seed, const std::string& source,
                             std::span<const std::size_t> source_columns) {
  std::uint64_t h = derive_seed(global_seed, {kModelTag, hash_string(source)});
  for (const auto c : source_columns) h = derive_seed(h, {c});
  return h;
}

AucGrid::AucGrid(std::vector<std::string> projects, std::vector<std::string> groups, std::size_t n_repeats)
    : projects_(std::move(projects)), groups_(std::move(groups)), n_repeats_(n_repeats) {
  if (groups_.size() != projects_.size()) throw std::invalid_argument("AucGrid: one group per project required");
  cells_.assign(projects_.size() * projects_.size() * cells_per_pair(), std::nullopt);
}

Auc& AucGrid::at(std::size_t source, std::size_t target, std::size_t rep, std::size_t fold) {
  return cells_[(source * projects_.size() + target) * cells_per_pair() + rep * kFolds + fold];
}

const Auc& AucGrid::at(std::size_t source, std::size_t target, std::size_t rep, std::size_t fold) const {
  return cells_[(source * projects_.size() + target) * cells_per_pair() + rep * kFolds + fold];
}

std::span<const Auc> AucGrid::pair(std::size_t source, std::size_t target) const {
  return {cells_.data() + (source * projects_.size() + target) * cells_per_pair(), cells_per_pair()};
}

std::span<Auc> AucGrid::pair(std::size_t source, std::size_t target) {
  return {cells_.data() + (source * projects_.size() + target) * cells_per_pair(), cells_per_pair()};
}

std::size_t AucGrid::feasible_count(std::size_t source, std::size_t target) const {
  const auto cells = pair(source, target);
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const Auc& a) { return a.has_value(); }));
}

double AucGrid::missing_fraction(std::size_t source, std::size_t target) const {
  if (cells_per_pair() == 0) return 1.0;
  return 1.0 - static_cast<double>(feasible_count(source, target)) / static_cast<double>(cells_per_pair());
}

std::optional<std::size_t> AucGrid::project_index(const std::string& name) const {
  const auto it = std::find(projects_.begin(), projects_.end(), name);
  if (it == projects_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - projects_.begin());
}

bool pair_feasible(const AucGrid& grid, std::size_t source, std::size_t target, double nan_threshold) {
  if (source == target) return false;
  return grid.feasible_count(source, target) > 0 && grid.missing_fraction(source, target) <= nan_threshold + 1e-12;
}

PairSummary summarize_pair(const AucGrid& grid, std::size_t source, std::size_t target, double nan_threshold) {
  PairSummary s;
  s.source = grid.projects()[source];
  s.target = grid.projects()[target];
  s.n_total = grid.cells_per_pair();
  double sum = 0.0;
  for (const auto& a : grid.pair(source, target)) {
    if (!a) continue;
    ++s.n_feasible;
    sum += *a;
  }
  if (s.n_feasible > 0) s.mean_auc = sum / static_cast<double>(s.n_feasible);
  s.feasible_under_threshold = pair_feasible(grid, source, target, nan_threshold);
  return s;
}

PairResult hdp_pairwise(const DefectDataset& source, const DefectDataset& target, const HdpConfig& config,
                        double nan_threshold) {
  AucGrid grid({source.project_name(), target.project_name()}, {source.group_name(), target.group_name()},
               config.n_repeats);
  run_grid({&source, &target}, {1}, {0}, config, grid, {}, nan_threshold);
  PairResult result;
  const auto cells = grid.pair(0, 1);
  result.cells.assign(cells.begin(), cells.end());
  result.summary = summarize_pair(grid, 0, 1, nan_threshold);
  return result;
}

AucGrid hdp_grid(const std::vector<DefectDataset>& datasets, const HdpConfig& config, const PairProgress& progress,
                 double nan_threshold) {
  std::vector<std::string> projects, groups;
  std::vector<const DefectDataset*> pointers;
  for (const auto& d : datasets) {
    projects.push_back(d.project_name());
    groups.push_back(d.group_name());
    pointers.push_back(&d);
  }
  AucGrid grid(std::move(projects), std::move(groups), config.n_repeats);
  grid.config = config;
  std::vector<std::size_t> all(datasets.size());
  std::iota(all.begin(), all.end(), 0);
  run_grid(pointers, all, all, config, grid, progress, nan_threshold);
  return grid;
}

std::vector<FeasibilityPoint> feasibility_curve(const AucGrid& grid, std::span<const double> nan_thresholds) {
  std::vector<FeasibilityPoint> curve;
  const std::size_t n = grid.n_projects();
  for (const double threshold : nan_thresholds) {
    FeasibilityPoint point;
    point.threshold = threshold;
    point.total_pairs = n * (n > 0 ? n - 1 : 0);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        if (pair_feasible(grid, s, t, threshold)) ++point.feasible_pairs;
    curve.push_back(point);
  }
  return curve;
}

std::vector<ComparisonRecord> compare_wpdp_hdp(const AucGrid& grid, const std::vector<CvResult>& wpdp, double alpha,
                                               double nan_threshold) {
  if (wpdp.size() != grid.n_projects()) throw std::invalid_argument("compare_wpdp_hdp: one WPDP result per project");
  std::vector<ComparisonRecord> records;
  const std::size_t n = grid.n_projects();
  for (std::size_t t = 0; t < n; ++t) {
    const auto& base = wpdp[t];
    if (base.repeats * base.folds != grid.cells_per_pair())
      throw std::invalid_argument("compare_wpdp_hdp: WPDP layout does not match the grid");
    ComparisonRecord rec;
    rec.target = grid.projects()[t];
    const auto base_values = base.present();
    rec.wpdp_mean = base_values.empty() ? 0.0 : stats::mean(base_values);

    std::vector<double> pooled;
    for (std::size_t s = 0; s < n; ++s) {
      if (s == t) continue;
      rec.n_total_cells += grid.cells_per_pair();
      rec.n_feasible_cells += grid.feasible_count(s, t);
      if (!pair_feasible(grid, s, t, nan_threshold)) continue;

      const auto cells = grid.pair(s, t);
      std::vector<double> hdp_values, wpdp_values, diffs;
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!cells[k]) continue;
        pooled.push_back(*cells[k]);
        if (!base.aucs[k]) continue;
        hdp_values.push_back(*cells[k]);
        wpdp_values.push_back(*base.aucs[k]);
        diffs.push_back(*cells[k] - *base.aucs[k]);
      }
      if (diffs.empty()) {
        ++rec.ties;
        continue;
      }
      const auto test = stats::wilcoxon_signed_rank(hdp_values, wpdp_values, true);
      const double median_diff = stats::median(diffs);
      if (test.p_value >= alpha || median_diff == 0.0)
        ++rec.ties;
      else if (median_diff > 0.0)
        ++rec.wins;
      else
        ++rec.losses;
    }
    if (!pooled.empty()) {
      rec.hdp_mean = stats::mean(pooled);
      if (!base_values.empty()) rec.cliffs = stats::cliffs_delta(pooled, base_values);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace hdp::experiment
