#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdp/matrix.hpp"

namespace hdp {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the label column is decoded to buggy/clean.
enum class LabelRule {
  /// {0,1}, {n,y}, {false,true}, {clean,buggy}, case-insensitive.
  Auto,
  /// Non-negative integer defect count; any positive count is buggy.
  DefectCount,
};

/// Module-by-metric matrix with a binary defect label per module.
///
/// Immutable after construction. The constructor enforces the shape
/// invariants, unique metric names, finite values and the presence of both
/// classes.
class DefectDataset {
 public:
  DefectDataset(std::string project_name, std::string group_name, std::vector<std::string> metric_names,
                Matrix instances, std::vector<bool> labels);

  const std::string& project_name() const { return project_name_; }
  const std::string& group_name() const { return group_name_; }
  const std::vector<std::string>& metric_names() const { return metric_names_; }
  const Matrix& instances() const { return instances_; }
  const std::vector<bool>& labels() const { return labels_; }

  std::size_t n_instances() const { return instances_.rows(); }
  std::size_t n_metrics() const { return instances_.cols(); }
  std::size_t n_buggy() const { return n_buggy_; }

  std::vector<double> column(std::size_t metric) const { return instances_.column(metric); }
  std::optional<std::size_t> metric_index(const std::string& name) const;

 private:
  std::string project_name_;
  std::string group_name_;
  std::vector<std::string> metric_names_;
  Matrix instances_;
  std::vector<bool> labels_;
  std::size_t n_buggy_ = 0;
};

struct DatasetStats {
  std::size_t n_instances = 0;
  std::size_t n_buggy = 0;
  double buggy_ratio = 0.0;
  std::size_t n_metrics = 0;
  double epv = 0.0;
};

DatasetStats compute_stats(const DefectDataset& d);

/// Parses comma-separated text with a header row. The label column is
/// removed from the metric matrix; the remaining column order is kept.
DefectDataset parse_dataset(std::istream& in, const std::string& project_name, const std::string& group_name,
                            const std::string& label_column, LabelRule rule = LabelRule::Auto);

DefectDataset load_dataset(const std::filesystem::path& path, const std::string& project_name,
                           const std::string& group_name, const std::string& label_column,
                           LabelRule rule = LabelRule::Auto);

struct InclusionCriteria {
  double min_epv = 10.0;
  double max_buggy_ratio = 0.5;
};

enum class RejectReason { LowEpv, HighDefectRatio };

const char* to_string(RejectReason r);

struct Rejection {
  DefectDataset dataset;
  RejectReason reason;
};

struct InclusionResult {
  std::vector<DefectDataset> accepted;
  std::vector<Rejection> rejected;
};

/// Returns the first violated criterion, checked in the order EPV then defect ratio.
std::optional<RejectReason> check_inclusion(const DatasetStats& s, const InclusionCriteria& criteria = {});

InclusionResult apply_inclusion_criteria(std::vector<DefectDataset> datasets, const InclusionCriteria& criteria = {});

// --- manifest ---------------------------------------------------------------

struct ManifestEntry {
  std::filesystem::path path;
  std::string project_name;
  std::string group_name;
  std::string label_column;
  LabelRule label_rule = LabelRule::Auto;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// Reads a manifest: CSV with header `path,project,group,label_column[,label_rule]`.
/// Blank lines and lines starting with '#' are ignored. Relative dataset
/// paths are resolved against `base_dir`.
Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// Loads every dataset listed in the manifest, in manifest order.
std::vector<DefectDataset> load_manifest_datasets(const Manifest& manifest);

LabelRule parse_label_rule(const std::string& s);
const char* to_string(LabelRule r);

}  // namespace hdp
