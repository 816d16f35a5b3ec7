#include "hdp/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hdp/csv.hpp"
#include "hdp/stats.hpp"

namespace hdp::matching {

std::size_t ScoreMatrix::edge_count() const {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), std::uint8_t{1}));
}

SortedColumns SortedColumns::from(const Matrix& m, const std::vector<std::size_t>& cols) {
  SortedColumns out;
  out.columns.reserve(cols.size());
  for (const auto c : cols) {
    auto col = m.column(c);
    std::sort(col.begin(), col.end());
    out.columns.push_back(std::move(col));
  }
  return out;
}

SortedColumns SortedColumns::from(const Matrix& m) {
  std::vector<std::size_t> cols(m.cols());
  std::iota(cols.begin(), cols.end(), 0);
  return from(m, cols);
}

ScoreMatrix score_matrix(const SortedColumns& source, std::vector<std::string> source_names,
                         std::vector<std::size_t> source_columns, const SortedColumns& target,
                         std::vector<std::string> target_names, std::vector<std::size_t> target_columns) {
  ScoreMatrix m;
  m.scores = Matrix(source.columns.size(), target.columns.size());
  for (std::size_t i = 0; i < source.columns.size(); ++i)
    for (std::size_t j = 0; j < target.columns.size(); ++j)
      m.scores(i, j) = stats::ks_two_sample_sorted(source.columns[i], target.columns[j]).p_value;
  m.present.assign(m.scores.rows() * m.scores.cols(), 1);
  m.source_metrics = std::move(source_names);
  m.target_metrics = std::move(target_names);
  m.source_columns = std::move(source_columns);
  m.target_columns = std::move(target_columns);
  return m;
}

ScoreMatrix score_matrix(const DefectDataset& source, const selection::SelectedFeatures& selected,
                         const DefectDataset& target) {
  const auto src_cols = selected.columns();
  std::vector<std::size_t> tgt_cols(target.n_metrics());
  std::iota(tgt_cols.begin(), tgt_cols.end(), 0);
  return score_matrix(SortedColumns::from(source.instances(), src_cols), selected.metric_names(), src_cols,
                      SortedColumns::from(target.instances()), target.metric_names(), tgt_cols);
}

ScoreMatrix apply_cutoff(ScoreMatrix m, double cutoff) {
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw std::invalid_argument("apply_cutoff: cutoff must be in [0, 1]");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m.scores(i, j) < cutoff) m.present[i * m.cols() + j] = 0;
  m.cutoff = cutoff;
  return m;
}

const char* to_string(FeasibilityPolicy p) {
  return p == FeasibilityPolicy::AllSourceMatched ? "all-source" : "any";
}

FeasibilityPolicy parse_policy(const std::string& s) {
  const auto v = csv::to_lower(s);
  if (v == "all-source" || v == "all") return FeasibilityPolicy::AllSourceMatched;
  if (v == "any") return FeasibilityPolicy::AnyMatched;
  throw std::invalid_argument("unknown feasibility policy '" + s + "' (expected all-source or any)");
}

std::vector<std::size_t> MetricMatching::source_columns() const {
  std::vector<std::size_t> out;
  for (const auto& p : pairs) out.push_back(p.source_column);
  return out;
}

std::vector<std::size_t> MetricMatching::target_columns() const {
  std::vector<std::size_t> out;
  for (const auto& p : pairs) out.push_back(p.target_column);
  return out;
}

namespace {

struct Solution {
  double weight = 0.0;
  /// Per row of the sub-problem, index into its column list (or nullopt).
  std::vector<std::optional<std::size_t>> assignment;
};

// Hungarian method (potentials + augmenting paths, O(n^2 m)) on the rows and
// columns given. An absent edge costs 0, which is the same as leaving the row
// unmatched, so the minimum-cost assignment is a maximum-weight matching.
Solution solve(const Matrix& weights, const std::vector<std::uint8_t>& present, const std::vector<std::size_t>& rows,
               const std::vector<std::size_t>& cols) {
  Solution sol;
  sol.assignment.assign(rows.size(), std::nullopt);
  if (rows.empty() || cols.empty()) return sol;

  const std::size_t n = rows.size();
  const std::size_t m = std::max(cols.size(), n);  // dummy columns when rows outnumber columns
  const std::size_t stride = weights.cols();
  const auto cost = [&](std::size_t i, std::size_t j) -> double {
    if (j >= cols.size()) return 0.0;
    const std::size_t r = rows[i], c = cols[j];
    return present[r * stride + c] ? -weights(r, c) : 0.0;
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0 || j > cols.size()) continue;
    const std::size_t i = p[j] - 1;
    if (present[rows[i] * stride + cols[j - 1]]) sol.assignment[i] = j - 1;
  }
  // Sum in row order so equal matchings give bit-identical weights.
  for (std::size_t i = 0; i < n; ++i)
    if (sol.assignment[i]) sol.weight += weights(rows[i], cols[*sol.assignment[i]]);
  return sol;
}

bool reaches(double candidate, double optimum) {
  return candidate >= optimum - 1e-12 * std::max(1.0, std::abs(optimum));
}

}  // namespace

std::vector<std::optional<std::size_t>> max_weight_assignment(const Matrix& weights,
                                                              const std::vector<std::uint8_t>& present) {
  if (present.size() != weights.rows() * weights.cols())
    throw std::invalid_argument("max_weight_assignment: mask size does not match weights");
  const std::size_t n_rows = weights.rows();
  std::vector<std::size_t> rows(n_rows), cols(weights.cols());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);

  std::vector<std::optional<std::size_t>> result(n_rows);
  auto current = solve(weights, present, rows, cols);
  // Fix rows one at a time to the smallest column that still admits an
  // optimal completion.
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double optimum = current.weight;
    std::optional<std::size_t> incumbent;
    if (current.assignment[0]) incumbent = cols[*current.assignment[0]];

    std::vector<std::size_t> rest_rows(rows.begin() + 1, rows.end());
    std::optional<std::size_t> chosen;
    std::optional<Solution> chosen_rest;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t c = cols[k];
      if (incumbent && c >= *incumbent) break;
      if (!present[i * weights.cols() + c]) continue;
      std::vector<std::size_t> rest_cols = cols;
      rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(k));
      auto rest = solve(weights, present, rest_rows, rest_cols);
      if (reaches(weights(i, c) + rest.weight, optimum)) {
        chosen = c;
        chosen_rest = std::move(rest);
        break;
      }
    }
    if (!chosen && incumbent) {
      chosen = incumbent;
      Solution rest;
      rest.weight = current.weight - weights(i, *incumbent);
      rest.assignment.assign(current.assignment.begin() + 1, current.assignment.end());
      const auto pos = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), *incumbent) - cols.begin());
      for (auto& a : rest.assignment)
        if (a && *a > pos) --*a;
      chosen_rest = std::move(rest);
    }

    result[i] = chosen;
    rows = std::move(rest_rows);
    if (chosen) {
      cols.erase(std::find(cols.begin(), cols.end(), *chosen));
      current = std::move(*chosen_rest);
    } else {
      current.assignment.erase(current.assignment.begin());
    }
  }
  return result;
}

MetricMatching max_weight_matching(const ScoreMatrix& m, FeasibilityPolicy policy) {
  MetricMatching out;
  out.cutoff = m.cutoff;
  out.n_sources = m.rows();
  const auto assignment = max_weight_assignment(m.scores, m.present);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (!assignment[i]) continue;
    const std::size_t j = *assignment[i];
    MatchedPair pair;
    pair.source_index = i;
    pair.target_index = j;
    pair.source_metric = m.source_metrics.empty() ? std::string() : m.source_metrics[i];
    pair.target_metric = m.target_metrics.empty() ? std::string() : m.target_metrics[j];
    pair.source_column = m.source_columns.empty() ? i : m.source_columns[i];
    pair.target_column = m.target_columns.empty() ? j : m.target_columns[j];
    pair.score = m.scores(i, j);
    out.total_weight += pair.score;
    out.pairs.push_back(std::move(pair));
  }
  out.feasible = policy == FeasibilityPolicy::AllSourceMatched
                     ? (out.n_sources > 0 && out.pairs.size() == out.n_sources)
                     : !out.pairs.empty();
  return out;
}

MetricMatching match(const DefectDataset& source, const DefectDataset& target, const MatchConfig& config) {
  const auto selected = selection::select_top(source, config.fraction, config.n_bins);
  return max_weight_matching(apply_cutoff(score_matrix(source, selected, target), config.cutoff), config.policy);
}

}  // namespace hdp::matching
