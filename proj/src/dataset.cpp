#include "hdp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "hdp/csv.hpp"

namespace hdp {

namespace csv {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    fields.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace csv

DefectDataset::DefectDataset(std::string project_name, std::string group_name, std::vector<std::string> metric_names,
                             Matrix instances, std::vector<bool> labels)
    : project_name_(std::move(project_name)),
      group_name_(std::move(group_name)),
      metric_names_(std::move(metric_names)),
      instances_(std::move(instances)),
      labels_(std::move(labels)) {
  if (instances_.rows() != labels_.size())
    throw DatasetError(project_name_ + ": row count does not match label count");
  if (instances_.cols() != metric_names_.size())
    throw DatasetError(project_name_ + ": column count does not match metric names");
  std::unordered_set<std::string> seen;
  for (const auto& name : metric_names_)
    if (!seen.insert(name).second) throw DatasetError(project_name_ + ": duplicate metric name '" + name + "'");
  for (const double v : instances_.data())
    if (!std::isfinite(v)) throw DatasetError(project_name_ + ": non-finite metric value");
  n_buggy_ = static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), true));
  if (n_buggy_ == 0 || n_buggy_ == labels_.size())
    throw DatasetError(project_name_ + ": labels must contain both buggy and clean instances");
}

std::optional<std::size_t> DefectDataset::metric_index(const std::string& name) const {
  const auto it = std::find(metric_names_.begin(), metric_names_.end(), name);
  if (it == metric_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - metric_names_.begin());
}

DatasetStats compute_stats(const DefectDataset& d) {
  DatasetStats s;
  s.n_instances = d.n_instances();
  s.n_buggy = d.n_buggy();
  s.n_metrics = d.n_metrics();
  s.buggy_ratio = static_cast<double>(s.n_buggy) / static_cast<double>(s.n_instances);
  s.epv = s.n_metrics == 0 ? 0.0 : static_cast<double>(s.n_buggy) / static_cast<double>(s.n_metrics);
  return s;
}

namespace {

std::optional<bool> decode_label(std::string_view raw, LabelRule rule) {
  if (rule == LabelRule::DefectCount) {
    const auto v = csv::parse_double(raw);
    if (!v || *v < 0.0 || *v != std::floor(*v)) return std::nullopt;
    return *v > 0.0;
  }
  const auto s = csv::to_lower(csv::trim(raw));
  if (s == "1" || s == "y" || s == "yes" || s == "true" || s == "buggy") return true;
  if (s == "0" || s == "n" || s == "no" || s == "false" || s == "clean") return false;
  return std::nullopt;
}

}  // namespace

DefectDataset parse_dataset(std::istream& in, const std::string& project_name, const std::string& group_name,
                            const std::string& label_column, LabelRule rule) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!csv::trim(line).empty()) {
      header = csv::split_line(line);
      break;
    }
  }
  if (header.empty()) throw DatasetError(project_name + ": missing header row");

  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end())
    throw DatasetError(project_name + ": label column '" + label_column + "' not found in header");
  const auto label_pos = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> metric_names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_pos) metric_names.push_back(header[c]);

  std::vector<double> values;
  std::vector<bool> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != header.size())
      throw DatasetError(project_name + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_pos) {
        const auto label = decode_label(fields[c], rule);
        if (!label)
          throw DatasetError(project_name + ": line " + std::to_string(line_no) + ": unknown label value '" +
                             fields[c] + "'");
        labels.push_back(*label);
        continue;
      }
      const auto v = csv::parse_double(fields[c]);
      if (!v)
        throw DatasetError(project_name + ": line " + std::to_string(line_no) + ": non-numeric or missing value '" +
                           fields[c] + "' in column '" + header[c] + "'");
      values.push_back(*v);
    }
  }

  const auto n_rows = labels.size();
  return DefectDataset(project_name, group_name, std::move(metric_names),
                       Matrix(n_rows, header.size() - 1, std::move(values)), std::move(labels));
}

DefectDataset load_dataset(const std::filesystem::path& path, const std::string& project_name,
                           const std::string& group_name, const std::string& label_column, LabelRule rule) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file '" + path.string() + "'");
  return parse_dataset(in, project_name, group_name, label_column, rule);
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::LowEpv:
      return "EPV";
    case RejectReason::HighDefectRatio:
      return "defect ratio";
  }
  return "?";
}

std::optional<RejectReason> check_inclusion(const DatasetStats& s, const InclusionCriteria& criteria) {
  if (!(s.epv >= criteria.min_epv)) return RejectReason::LowEpv;
  if (s.buggy_ratio > criteria.max_buggy_ratio) return RejectReason::HighDefectRatio;
  return std::nullopt;
}

InclusionResult apply_inclusion_criteria(std::vector<DefectDataset> datasets, const InclusionCriteria& criteria) {
  InclusionResult result;
  for (auto& d : datasets) {
    if (const auto reason = check_inclusion(compute_stats(d), criteria))
      result.rejected.push_back({std::move(d), *reason});
    else
      result.accepted.push_back(std::move(d));
  }
  return result;
}

}  // namespace hdp
