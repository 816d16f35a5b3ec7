#include <fstream>
#include <istream>
#include <unordered_set>

#include "hdp/csv.hpp"
#include "hdp/dataset.hpp"

namespace hdp {

LabelRule parse_label_rule(const std::string& s) {
  const auto v = csv::to_lower(csv::trim(s));
  if (v.empty() || v == "auto") return LabelRule::Auto;
  if (v == "count" || v == "defect-count") return LabelRule::DefectCount;
  throw DatasetError("unknown label rule '" + s + "' (expected auto or count)");
}

const char* to_string(LabelRule r) {
  return r == LabelRule::Auto ? "auto" : "count";
}

Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  Manifest manifest;
  std::unordered_set<std::string> projects;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = csv::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = csv::split_line(trimmed);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 4 || csv::to_lower(fields[0]) != "path" || csv::to_lower(fields[1]) != "project" ||
          csv::to_lower(fields[2]) != "group" || csv::to_lower(fields[3]) != "label_column")
        throw DatasetError("manifest: expected header 'path,project,group,label_column[,label_rule]'");
      continue;
    }
    if (fields.size() < 4 || fields.size() > 5)
      throw DatasetError("manifest: line " + std::to_string(line_no) + " must have 4 or 5 fields");
    ManifestEntry e;
    e.path = fields[0];
    if (e.path.is_relative()) e.path = base_dir / e.path;
    e.project_name = fields[1];
    e.group_name = fields[2];
    e.label_column = fields[3];
    if (fields.size() == 5) e.label_rule = parse_label_rule(fields[4]);
    if (e.project_name.empty()) throw DatasetError("manifest: line " + std::to_string(line_no) + ": empty project name");
    if (!projects.insert(e.project_name).second)
      throw DatasetError("manifest: duplicate project name '" + e.project_name + "'");
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path());
}

std::vector<DefectDataset> load_manifest_datasets(const Manifest& manifest) {
  std::vector<DefectDataset> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries)
    out.push_back(load_dataset(e.path, e.project_name, e.group_name, e.label_column, e.label_rule));
  return out;
}

}  // namespace hdp
