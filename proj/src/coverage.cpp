#include <algorithm>

#include "hdp/experiment.hpp"

namespace hdp::experiment {

CoverageReport coverage_report(const AucGrid& grid, double nan_threshold,
                               const std::vector<std::optional<double>>& wpdp_means) {
  const std::size_t n = grid.n_projects();
  if (!wpdp_means.empty() && wpdp_means.size() != n)
    throw std::invalid_argument("coverage_report: one WPDP mean per project");

  CoverageReport report;
  report.n_datasets = n;
  std::vector<std::size_t> group_of(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& g = grid.groups()[p];
    auto it = std::find(report.groups.begin(), report.groups.end(), g);
    if (it == report.groups.end()) it = report.groups.insert(report.groups.end(), g);
    group_of[p] = static_cast<std::size_t>(it - report.groups.begin());
  }
  const std::size_t n_groups = report.groups.size();
  std::vector<std::size_t> group_size(n_groups, 0);
  for (const auto g : group_of) ++group_size[g];

  report.cells.assign(n_groups, std::vector<GroupCell>(n_groups));
  for (std::size_t a = 0; a < n_groups; ++a)
    for (std::size_t b = 0; b < n_groups; ++b)
      report.cells[a][b].total_pairs = a == b ? group_size[a] * (group_size[a] - 1) : group_size[a] * group_size[b];

  std::vector<std::vector<bool>> covered(n_groups, std::vector<bool>(n, false));
  std::vector<std::vector<double>> hdp_aucs(n_groups);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (!pair_feasible(grid, s, t, nan_threshold)) continue;
      ++report.cells[group_of[s]][group_of[t]].feasible_pairs;
      covered[group_of[s]][t] = true;
      for (const auto& a : grid.pair(s, t))
        if (a) hdp_aucs[group_of[s]].push_back(*a);
    }
  }
  for (auto& row : report.cells)
    for (auto& cell : row)
      cell.percentage = cell.total_pairs == 0 ? 0.0
                                              : 100.0 * static_cast<double>(cell.feasible_pairs) /
                                                    static_cast<double>(cell.total_pairs);

  for (std::size_t g = 0; g < n_groups; ++g) {
    GroupSummary summary;
    summary.group = report.groups[g];
    summary.covered_targets = static_cast<std::size_t>(std::count(covered[g].begin(), covered[g].end(), true));
    summary.coverage_percentage =
        n == 0 ? 0.0 : 100.0 * static_cast<double>(summary.covered_targets) / static_cast<double>(n);
    if (!hdp_aucs[g].empty()) summary.median_hdp = stats::median(hdp_aucs[g]);
    if (!wpdp_means.empty()) {
      std::vector<double> members;
      for (std::size_t p = 0; p < n; ++p)
        if (group_of[p] == g && wpdp_means[p]) members.push_back(*wpdp_means[p]);
      if (!members.empty()) summary.median_wpdp = stats::median(members);
    }
    report.sources.push_back(std::move(summary));
  }
  return report;
}

}  // namespace hdp::experiment
