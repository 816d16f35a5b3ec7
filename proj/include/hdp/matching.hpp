#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdp/dataset.hpp"
#include "hdp/matrix.hpp"
#include "hdp/selection.hpp"

namespace hdp::matching {

/// KS matching scores between source metrics (rows) and target metrics
/// (columns). Edges below the cutoff are marked absent.
struct ScoreMatrix {
  std::vector<std::string> source_metrics;
  std::vector<std::string> target_metrics;
  /// Dataset column of each row / column, for slicing the data afterwards.
  std::vector<std::size_t> source_columns;
  std::vector<std::size_t> target_columns;
  Matrix scores;
  std::vector<std::uint8_t> present;
  double cutoff = 0.0;

  std::size_t rows() const { return scores.rows(); }
  std::size_t cols() const { return scores.cols(); }
  bool is_present(std::size_t i, std::size_t j) const { return present[i * cols() + j] != 0; }
  double score(std::size_t i, std::size_t j) const { return scores(i, j); }
  std::size_t edge_count() const;
};

/// Each column sorted ascending; lets one target fold be scored against many
/// sources without re-sorting.
struct SortedColumns {
  std::vector<std::vector<double>> columns;

  static SortedColumns from(const Matrix& m, const std::vector<std::size_t>& cols);
  static SortedColumns from(const Matrix& m);
};

ScoreMatrix score_matrix(const DefectDataset& source, const selection::SelectedFeatures& selected,
                         const DefectDataset& target);

/// Scores pre-sorted columns. `source_columns`/`target_columns` record which
/// dataset column each sorted column came from.
ScoreMatrix score_matrix(const SortedColumns& source, std::vector<std::string> source_names,
                         std::vector<std::size_t> source_columns, const SortedColumns& target,
                         std::vector<std::string> target_names, std::vector<std::size_t> target_columns);

/// Marks entries with score < cutoff absent; the rest are kept exactly.
ScoreMatrix apply_cutoff(ScoreMatrix m, double cutoff);

enum class FeasibilityPolicy {
  /// Every selected source metric must receive a match.
  AllSourceMatched,
  /// At least one pair.
  AnyMatched,
};

const char* to_string(FeasibilityPolicy p);
FeasibilityPolicy parse_policy(const std::string& s);

struct MatchedPair {
  std::size_t source_index = 0;  // row in the score matrix
  std::size_t target_index = 0;  // column in the score matrix
  std::string source_metric;
  std::string target_metric;
  std::size_t source_column = 0;  // dataset column
  std::size_t target_column = 0;
  double score = 0.0;
};

struct MetricMatching {
  /// Sorted by source index.
  std::vector<MatchedPair> pairs;
  double total_weight = 0.0;
  bool feasible = false;
  double cutoff = 0.0;
  std::size_t n_sources = 0;

  std::vector<std::size_t> source_columns() const;
  std::vector<std::size_t> target_columns() const;
};

/// Maximum-weight matching over the present edges, one result per row
/// (nullopt = unmatched). Among optimal matchings the one whose pair list is
/// lexicographically smallest by (row, column) is returned.
std::vector<std::optional<std::size_t>> max_weight_assignment(const Matrix& weights,
                                                              const std::vector<std::uint8_t>& present);

MetricMatching max_weight_matching(const ScoreMatrix& m, FeasibilityPolicy policy = FeasibilityPolicy::AllSourceMatched);

struct MatchConfig {
  double fraction = 0.15;
  double cutoff = 0.05;
  FeasibilityPolicy policy = FeasibilityPolicy::AllSourceMatched;
  std::size_t n_bins = 10;
};

/// select_top -> score_matrix -> apply_cutoff -> max_weight_matching.
MetricMatching match(const DefectDataset& source, const DefectDataset& target, const MatchConfig& config = {});

}  // namespace hdp::matching
