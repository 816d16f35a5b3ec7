#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdp/experiment.hpp"

namespace hdp::app {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Analysis { Wpdp, Cpdp, Hdp, Ensemble, Similarity, Coverage };

const char* to_string(Analysis a);
Analysis parse_analysis(const std::string& s);
/// Comma-separated list; empty means every analysis.
std::set<Analysis> parse_analyses(const std::string& list);

struct RunConfig {
  std::filesystem::path manifest;
  std::vector<model::ClassifierKind> classifiers{model::ClassifierKind::LogisticRegression};
  double fraction = 0.15;
  double cutoff = 0.05;
  std::size_t n_repeats = 100;
  double nan_threshold = 0.99;
  matching::FeasibilityPolicy policy = matching::FeasibilityPolicy::AllSourceMatched;
  std::uint64_t seed = 1;
  std::filesystem::path out = "results";
  std::size_t jobs = 1;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  /// Canonical JSON of every result-affecting field (not `out`, not `jobs`).
  std::string canonical_json() const;
  /// 16 hex digits of FNV-1a over canonical_json().
  std::string hash() const;
  experiment::HdpConfig hdp_config(model::ClassifierKind kind) const;
};

/// "lr", "rf" or "both".
std::vector<model::ClassifierKind> parse_classifiers(const std::string& s);

// --- tables -----------------------------------------------------------------

struct Table {
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
};

/// Fixed-width text; numbers right-aligned, text left-aligned.
std::string render_text(const Table& t);
/// Comma-separated, header row first.
std::string render_csv(const Table& t);

/// Fixed 3-decimal rendering; nullopt renders as "NaN".
std::string format_auc(const std::optional<double>& v);
std::string format_number(double v, int decimals);

// --- result files -----------------------------------------------------------

/// Leading `# key=value` lines of every emitted file. The first line is
/// always `# config_hash=<hash> seed=<seed>`.
struct FileHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string kind;
  std::map<std::string, std::string> fields;
};

std::string header_text(const FileHeader& h);

struct ResultFile {
  FileHeader header;
  Table table;
};

ResultFile parse_result_file(std::istream& in);
ResultFile read_result_file(const std::filesystem::path& path);
void write_result_file(const std::filesystem::path& path, const FileHeader& header, const Table& table);

Table grid_table(const experiment::AucGrid& grid);
experiment::AucGrid grid_from_file(const ResultFile& file);
Table cv_table(const std::vector<std::string>& projects, const std::vector<experiment::CvResult>& results);
std::vector<experiment::CvResult> cv_from_file(const ResultFile& file, std::vector<std::string>* projects = nullptr);

// Result tables.
Table dataset_table(const std::vector<DefectDataset>& datasets, const InclusionCriteria& criteria = {});
Table pair_table(const experiment::AucGrid& grid, double nan_threshold);
Table feasibility_table(const std::vector<experiment::FeasibilityPoint>& curve);
Table comparison_table(const std::vector<experiment::ComparisonRecord>& records);
Table ensemble_table(const std::vector<experiment::EnsembleResult>& results);
Table coverage_table(const experiment::CoverageReport& report);

/// NaN thresholds reported in the feasibility curve.
std::vector<double> default_nan_thresholds();

// --- commands ---------------------------------------------------------------

/// Loads every dataset of the manifest and prints the dataset summary with
/// accept/reject verdicts. Returns 0, or 1 when a file cannot be loaded.
int cmd_validate(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err);

/// Runs the requested analyses on the accepted datasets and writes result
/// files under config.out, plus run.json and report.txt. Returns 0 on
/// success, 1 on failure (reported on `log`).
int cmd_run(const RunConfig& config, const std::set<Analysis>& which, std::ostream& log);

/// Renders result files as aligned text on `out` and, when `out_dir` is set,
/// as CSV files there. Refuses inputs whose config hashes differ.
int cmd_report(const std::vector<std::filesystem::path>& inputs, const std::optional<std::filesystem::path>& out_dir,
               std::ostream& out, std::ostream& err);

}  // namespace hdp::app
