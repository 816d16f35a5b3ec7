#include <fstream>
#include <map>
#include <ostream>

#include "hdp/app.hpp"

namespace hdp::app {

int cmd_report(const std::vector<std::filesystem::path>& inputs, const std::optional<std::filesystem::path>& out_dir,
               std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::filesystem::path, ResultFile>> files;
  try {
    for (const auto& p : inputs) files.emplace_back(p, read_result_file(p));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  for (std::size_t i = 1; i < files.size(); ++i) {
    const auto& a = files.front().second.header;
    const auto& b = files[i].second.header;
    if (a.config_hash != b.config_hash || a.seed != b.seed) {
      err << "error: config hash mismatch: " << files.front().first.string() << " has " << a.config_hash << " (seed "
          << a.seed << "), " << files[i].first.string() << " has " << b.config_hash << " (seed " << b.seed << ")\n";
      return 1;
    }
  }

  std::vector<Table> tables;
  try {
    // Grid and 2-fold WPDP files of one classifier combine into the comparison.
    std::map<std::string, experiment::AucGrid> grids;
    std::map<std::string, double> thresholds;
    std::map<std::string, std::vector<experiment::CvResult>> two_fold;
    for (const auto& [path, file] : files) {
      const auto classifier = file.header.fields.count("classifier") ? file.header.fields.at("classifier") : "";
      if (file.header.kind == "hdp_grid") {
        auto grid = grid_from_file(file);
        const auto nt = file.header.fields.find("nan_threshold");
        const double threshold = nt == file.header.fields.end() ? 0.99 : std::stod(nt->second);
        thresholds[classifier] = threshold;
        tables.push_back(pair_table(grid, threshold));
        tables.back().title = "hdp_pairs " + classifier;
        tables.push_back(feasibility_table(experiment::feasibility_curve(grid, default_nan_thresholds())));
        tables.back().title = "feasibility " + classifier;
        grids.emplace(classifier, std::move(grid));
      } else if (file.header.kind == "wpdp" && file.header.fields.count("folds") && file.header.fields.at("folds") == "2") {
        two_fold.emplace(classifier, cv_from_file(file));
        tables.push_back(file.table);
        tables.back().title = "wpdp 2-fold " + classifier;
      } else {
        tables.push_back(file.table);
        tables.back().title = file.header.kind + (classifier.empty() ? "" : " " + classifier);
      }
    }
    for (const auto& [classifier, grid] : grids) {
      const auto it = two_fold.find(classifier);
      if (it == two_fold.end()) continue;
      tables.push_back(comparison_table(experiment::compare_wpdp_hdp(grid, it->second, 0.05, thresholds.at(classifier))));
      tables.back().title = "comparison " + classifier;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  for (const auto& t : tables) out << render_text(t) << "\n";
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    for (const auto& t : tables) {
      std::string name = t.title;
      for (auto& c : name)
        if (c == ' ' || c == '-') c = '_';
      std::ofstream f(*out_dir / (name + ".csv"), std::ios::binary | std::ios::trunc);
      f << render_csv(t);
      if (!f) {
        err << "error: cannot write " << (*out_dir / (name + ".csv")).string() << "\n";
        return 1;
      }
    }
  }
  return 0;
}

}  // namespace hdp::app
