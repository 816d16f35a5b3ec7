#include <fstream>
#include <mutex>
#include <ostream>

#include <fmt/format.h>

#include "hdp/app.hpp"
#include "hdp/parallel.hpp"
#include "hdp/random.hpp"
#include "json.hpp"

namespace hdp::app {

namespace {

constexpr std::uint64_t kCpdpTag = 0x63706470;  // "cpdp"

std::string joined_names(const std::vector<DefectDataset>& datasets, bool groups) {
  std::string out;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    if (i) out += '|';
    out += groups ? datasets[i].group_name() : datasets[i].project_name();
  }
  return out;
}

/// Writes result files and collects their text rendering for report.txt.
class Writer {
 public:
  Writer(const RunConfig& config, std::ostream& log) : config_(config), log_(log) {}

  void write(const std::string& file, FileHeader header, const Table& table) {
    header.config_hash = config_.hash();
    header.seed = config_.seed;
    write_result_file(config_.out / file, header, table);
    log_ << "wrote " << (config_.out / file).string() << "\n";
    text_ += render_text(table);
    for (const auto& [k, v] : header.fields)
      if (k != "projects" && k != "groups") text_ += k + ": " + v + "\n";
    text_ += "\n";
  }

  const std::string& text() const { return text_; }

 private:
  const RunConfig& config_;
  std::ostream& log_;
  std::string text_;
};

std::vector<experiment::CvResult> run_wpdp(const std::vector<DefectDataset>& datasets, model::ClassifierKind kind,
                                           const experiment::CvPlan& plan, const RunConfig& config) {
  std::vector<experiment::CvResult> results(datasets.size());
  parallel_for(datasets.size(), config.jobs, [&](std::size_t i) {
    results[i] = experiment::wpdp(datasets[i], kind, plan,
                                  experiment::fold_seed_base(config.seed, datasets[i].project_name()));
  });
  return results;
}

std::vector<std::optional<double>> means_of(const std::vector<experiment::CvResult>& results) {
  std::vector<std::optional<double>> out;
  for (const auto& r : results) out.push_back(r.mean());
  return out;
}

Table cpdp_table(const std::vector<DefectDataset>& datasets, const std::vector<std::optional<double>>& wpdp_means,
                 model::ClassifierKind kind, const RunConfig& config) {
  const std::size_t n = datasets.size();
  std::vector<std::optional<double>> cells(n * n);
  parallel_for(n * n, config.jobs, [&](std::size_t k) {
    const std::size_t s = k / n, t = k % n;
    if (s == t) {
      cells[k] = wpdp_means[s];
      return;
    }
    const auto hp = experiment::with_seed({}, derive_seed(config.seed, {kCpdpTag, hash_string(datasets[s].project_name())}));
    cells[k] = experiment::cpdp(datasets[s], datasets[t], kind, hp);
  });
  Table t{"cpdp", {"source"}, {}};
  for (const auto& d : datasets) t.headers.push_back(d.project_name());
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::string> row{datasets[s].project_name()};
    for (std::size_t c = 0; c < n; ++c) row.push_back(format_auc(cells[s * n + c]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table distance_table(const std::vector<DefectDataset>& datasets) {
  Table t{"similarity_distance", {"train"}, {}};
  for (const auto& d : datasets) t.headers.push_back(d.project_name());
  for (const auto& train : datasets) {
    std::vector<std::string> row{train.project_name()};
    for (const auto& test : datasets) {
      const auto detail = experiment::domain_agnostic_distance(train, test);
      row.push_back(detail ? format_number(detail->distance, 3) : "NaN");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table selection_table(const experiment::DomainAgnosticEvaluation& eval,
                      const std::vector<std::optional<double>>& wpdp_means) {
  Table t{"similarity_selection", {"target", "chosen", "distance", "auc", "wpdp_auc", "normalized_auc"}, {}};
  for (std::size_t i = 0; i < eval.outcomes.size(); ++i) {
    const auto& o = eval.outcomes[i];
    t.rows.push_back({o.target, o.chosen.value_or(""), o.distance ? format_number(*o.distance, 3) : "NaN",
                      format_auc(o.auc), format_auc(wpdp_means[i]), format_auc(o.normalized_auc)});
  }
  return t;
}

void run_classifier(const std::vector<DefectDataset>& datasets, model::ClassifierKind kind, const RunConfig& config,
                    const std::set<Analysis>& which, Writer& writer, std::ostream& log) {
  const std::string tag = model::short_name(kind);
  const auto want = [&](Analysis a) { return which.count(a) > 0; };
  FileHeader base;
  base.fields["classifier"] = tag;
  base.fields["projects"] = joined_names(datasets, false);

  std::vector<std::optional<double>> wpdp10_means;
  if (want(Analysis::Wpdp) || want(Analysis::Cpdp) || want(Analysis::Similarity)) {
    log << fmt::format("[{}] wpdp 10x10-fold on {} datasets\n", tag, datasets.size());
    const auto plan = experiment::CvPlan::ten_by_ten();
    const auto results = run_wpdp(datasets, kind, plan, config);
    wpdp10_means = means_of(results);
    auto h = base;
    h.kind = "wpdp";
    h.fields["repeats"] = std::to_string(plan.repeats);
    h.fields["folds"] = std::to_string(plan.folds);
    std::vector<std::string> names;
    for (const auto& d : datasets) names.push_back(d.project_name());
    writer.write("wpdp_10x10_" + tag + ".csv", h, cv_table(names, results));
  }

  if (want(Analysis::Cpdp)) {
    log << fmt::format("[{}] cpdp on {} ordered pairs\n", tag, datasets.size() * datasets.size());
    auto h = base;
    h.kind = "cpdp";
    writer.write("cpdp_" + tag + ".csv", h, cpdp_table(datasets, wpdp10_means, kind, config));
  }

  if (want(Analysis::Hdp) || want(Analysis::Coverage)) {
    const auto hdp_config = config.hdp_config(kind);
    std::mutex log_mutex;
    const auto progress = [&](const experiment::PairSummary& p) {
      std::lock_guard lock(log_mutex);
      log << fmt::format("[{}] hdp {} -> {}: {}/{} feasible, mean AUC {}\n", tag, p.source, p.target, p.n_feasible,
                         p.n_total, format_auc(p.mean_auc));
    };
    const auto grid = experiment::hdp_grid(datasets, hdp_config, progress, config.nan_threshold);

    auto h = base;
    h.kind = "hdp_grid";
    h.fields["groups"] = joined_names(datasets, true);
    h.fields["repeats"] = std::to_string(config.n_repeats);
    h.fields["nan_threshold"] = fmt::format("{}", config.nan_threshold);
    writer.write("hdp_grid_" + tag + ".csv", h, grid_table(grid));

    auto ph = base;
    ph.kind = "hdp_pairs";
    ph.fields["nan_threshold"] = fmt::format("{}", config.nan_threshold);
    writer.write("hdp_pairs_" + tag + ".csv", ph, pair_table(grid, config.nan_threshold));

    const auto thresholds = default_nan_thresholds();
    auto fh = base;
    fh.kind = "feasibility";
    writer.write("feasibility_" + tag + ".csv", fh, feasibility_table(experiment::feasibility_curve(grid, thresholds)));

    log << fmt::format("[{}] wpdp {}x2-fold for paired comparison\n", tag, config.n_repeats);
    const auto plan = experiment::CvPlan::two_fold(config.n_repeats);
    const auto wpdp2 = run_wpdp(datasets, kind, plan, config);
    auto wh = base;
    wh.kind = "wpdp";
    wh.fields["repeats"] = std::to_string(plan.repeats);
    wh.fields["folds"] = std::to_string(plan.folds);
    std::vector<std::string> names;
    for (const auto& d : datasets) names.push_back(d.project_name());
    writer.write("wpdp_2fold_" + tag + ".csv", wh, cv_table(names, wpdp2));

    if (want(Analysis::Hdp)) {
      auto ch = base;
      ch.kind = "comparison";
      writer.write("comparison_" + tag + ".csv", ch,
                   comparison_table(experiment::compare_wpdp_hdp(grid, wpdp2, 0.05, config.nan_threshold)));
    }
    if (want(Analysis::Coverage)) {
      auto ch = base;
      ch.kind = "coverage";
      ch.fields["nan_threshold"] = fmt::format("{}", config.nan_threshold);
      writer.write("coverage_" + tag + ".csv", ch,
                   coverage_table(experiment::coverage_report(grid, config.nan_threshold, means_of(wpdp2))));
    }
  }

  if (want(Analysis::Ensemble)) {
    log << fmt::format("[{}] ensemble over {} targets\n", tag, datasets.size());
    std::vector<experiment::EnsembleResult> results(datasets.size());
    const auto hdp_config = config.hdp_config(kind);
    parallel_for(datasets.size(), config.jobs, [&](std::size_t t) {
      results[t] = experiment::ensemble_hdp(datasets, datasets[t], hdp_config.match, kind, config.seed);
    });
    std::vector<double> ensemble, pairwise;
    for (const auto& r : results)
      if (r.ensemble_auc) {
        ensemble.push_back(*r.ensemble_auc);
        pairwise.push_back(*r.mean_pairwise_auc);
      }
    auto h = base;
    h.kind = "ensemble";
    if (!ensemble.empty()) {
      h.fields["mean_ensemble_auc"] = format_auc(stats::mean(ensemble));
      h.fields["mean_pairwise_auc"] = format_auc(stats::mean(pairwise));
      h.fields["wilcoxon_p"] = format_number(stats::wilcoxon_signed_rank(ensemble, pairwise).p_value, 4);
    }
    writer.write("ensemble_" + tag + ".csv", h, ensemble_table(results));
  }

  if (want(Analysis::Similarity)) {
    log << fmt::format("[{}] domain-agnostic selection\n", tag);
    const auto eval = experiment::domain_agnostic_evaluation(datasets, wpdp10_means, kind, config.seed);
    auto h = base;
    h.kind = "similarity_selection";
    if (eval.t_test) {
      h.fields["normalized_auc_mean"] = format_number(eval.t_test->mean, 3);
      h.fields["t_statistic"] = format_number(eval.t_test->t_statistic, 3);
      h.fields["t_test_p"] = format_number(eval.t_test->p_value, 4);
    }
    writer.write("similarity_selection_" + tag + ".csv", h, selection_table(eval, wpdp10_means));
  }
}

}  // namespace

int cmd_validate(const std::filesystem::path& manifest_path, std::ostream& out, std::ostream& err) {
  Manifest manifest;
  try {
    manifest = load_manifest(manifest_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<DefectDataset> datasets;
  bool failed = false;
  for (const auto& entry : manifest.entries) {
    try {
      datasets.push_back(
          load_dataset(entry.path, entry.project_name, entry.group_name, entry.label_column, entry.label_rule));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      failed = true;
    }
  }
  const auto table = dataset_table(datasets);
  out << render_text(table);
  std::size_t accepted = 0;
  for (const auto& d : datasets)
    if (!check_inclusion(compute_stats(d))) ++accepted;
  out << fmt::format("{} accepted, {} rejected, {} failed to load\n", accepted, datasets.size() - accepted,
                     manifest.entries.size() - datasets.size());
  return failed ? 1 : 0;
}

int cmd_run(const RunConfig& config, const std::set<Analysis>& which, std::ostream& log) {
  try {
    config.validate();
    const auto manifest = load_manifest(config.manifest);
    auto inclusion = apply_inclusion_criteria(load_manifest_datasets(manifest));
    for (const auto& r : inclusion.rejected)
      log << fmt::format("excluded {}: {}\n", r.dataset.project_name(), to_string(r.reason));
    const auto& datasets = inclusion.accepted;
    log << fmt::format("{} datasets accepted, config hash {}\n", datasets.size(), config.hash());

    std::filesystem::create_directories(config.out);
    Writer writer(config, log);
    if (which.count(Analysis::Similarity)) {
      FileHeader h;
      h.kind = "similarity_distance";
      h.fields["projects"] = joined_names(datasets, false);
      writer.write("similarity_distance.csv", h, distance_table(datasets));
    }
    for (const auto kind : config.classifiers) run_classifier(datasets, kind, config, which, writer, log);

    nlohmann::ordered_json meta;
    meta["config_hash"] = config.hash();
    meta["config"] = nlohmann::ordered_json::parse(config.canonical_json());
    std::vector<std::string> analyses;
    for (const auto a : which) analyses.emplace_back(to_string(a));
    meta["analyses"] = analyses;
    std::vector<std::string> accepted, rejected;
    for (const auto& d : datasets) accepted.push_back(d.project_name());
    for (const auto& r : inclusion.rejected) rejected.push_back(r.dataset.project_name());
    meta["accepted"] = accepted;
    meta["rejected"] = rejected;
    {
      std::ofstream out(config.out / "run.json", std::ios::binary | std::ios::trunc);
      out << meta.dump(2) << "\n";
      if (!out) throw std::runtime_error("cannot write run.json");
    }
    {
      std::ofstream out(config.out / "report.txt", std::ios::binary | std::ios::trunc);
      out << writer.text();
      if (!out) throw std::runtime_error("cannot write report.txt");
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hdp::app
