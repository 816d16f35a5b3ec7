#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hdp/app.hpp"
#include "hdp/csv.hpp"

namespace hdp::app {

namespace {

bool looks_numeric(const std::string& s) {
  if (s == "NaN") return true;
  return csv::parse_double(s).has_value();
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string field(const FileHeader& h, const std::string& key) {
  const auto it = h.fields.find(key);
  if (it == h.fields.end()) throw std::runtime_error("result file lacks header field '" + key + "'");
  return it->second;
}

std::size_t parse_size(const std::string& s) {
  const auto v = csv::parse_double(s);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
    throw std::runtime_error("expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(*v);
}

std::optional<double> parse_auc(const std::string& s) {
  if (s == "NaN") return std::nullopt;
  const auto v = csv::parse_double(s);
  if (!v) throw std::runtime_error("expected an AUC or NaN, got '" + s + "'");
  return v;
}

std::string pct(double v) { return format_number(v, 1); }

}  // namespace

std::string format_auc(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : "NaN"; }

std::string format_number(double v, int decimals) { return fmt::format("{:.{}f}", v, decimals); }

std::string render_text(const Table& t) {
  const std::size_t n = t.headers.size();
  std::vector<std::size_t> width(n, 0);
  std::vector<bool> numeric(n, true);
  for (std::size_t c = 0; c < n; ++c) width[c] = t.headers[c].size();
  for (const auto& row : t.rows)
    for (std::size_t c = 0; c < n && c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
      if (!row[c].empty() && !looks_numeric(row[c])) numeric[c] = false;
    }
  std::string out;
  if (!t.title.empty()) out += t.title + "\n";
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < n; ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      if (c) s += "  ";
      s += numeric[c] ? fmt::format("{:>{}}", cell, width[c]) : fmt::format("{:<{}}", cell, width[c]);
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out += s + "\n";
  };
  line(t.headers);
  std::size_t total = 0;
  for (std::size_t c = 0; c < n; ++c) total += width[c] + (c ? 2 : 0);
  out += std::string(total, '-') + "\n";
  for (const auto& row : t.rows) line(row);
  return out;
}

std::string render_csv(const Table& t) {
  std::string out = join(t.headers, ',') + "\n";
  for (const auto& row : t.rows) out += join(row, ',') + "\n";
  return out;
}

std::string header_text(const FileHeader& h) {
  std::string out = fmt::format("# config_hash={} seed={}\n", h.config_hash, h.seed);
  out += "# kind=" + h.kind + "\n";
  for (const auto& [k, v] : h.fields) out += "# " + k + "=" + v + "\n";
  return out;
}

ResultFile parse_result_file(std::istream& in) {
  ResultFile file;
  std::string line;
  bool first = true;
  bool have_header_row = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header_row && line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      if (first) {
        std::stringstream tokens(body);
        std::string token;
        while (tokens >> token) {
          const auto eq = token.find('=');
          if (eq == std::string::npos) continue;
          const auto key = token.substr(0, eq), value = token.substr(eq + 1);
          if (key == "config_hash") file.header.config_hash = value;
          if (key == "seed") file.header.seed = std::stoull(value);
        }
        if (file.header.config_hash.empty()) throw std::runtime_error("result file lacks a config_hash line");
        first = false;
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const auto key = body.substr(0, eq), value = body.substr(eq + 1);
      if (key == "kind")
        file.header.kind = value;
      else
        file.header.fields[key] = value;
      continue;
    }
    if (first) throw std::runtime_error("result file lacks a config_hash line");
    if (line.empty()) continue;
    if (!have_header_row) {
      file.table.headers = csv::split_line(line);
      have_header_row = true;
    } else {
      file.table.rows.push_back(csv::split_line(line));
    }
  }
  if (first) throw std::runtime_error("result file is empty");
  file.table.title = file.header.kind;
  return file;
}

ResultFile read_result_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return parse_result_file(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_result_file(const std::filesystem::path& path, const FileHeader& header, const Table& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header_text(header) << render_csv(table);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Table grid_table(const experiment::AucGrid& grid) {
  Table t{"hdp_grid", {"source", "target", "source_group", "target_group", "rep", "fold", "auc"}, {}};
  const std::size_t n = grid.n_projects();
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t tg = 0; tg < n; ++tg) {
      if (s == tg) continue;
      for (std::size_t r = 0; r < grid.n_repeats(); ++r)
        for (std::size_t f = 0; f < experiment::AucGrid::kFolds; ++f)
          t.rows.push_back({grid.projects()[s], grid.projects()[tg], grid.groups()[s], grid.groups()[tg],
                            std::to_string(r + 1), std::to_string(f + 1), format_auc(grid.at(s, tg, r, f))});
    }
  return t;
}

experiment::AucGrid grid_from_file(const ResultFile& file) {
  const auto projects = split(field(file.header, "projects"), '|');
  const auto groups = split(field(file.header, "groups"), '|');
  experiment::AucGrid grid(projects, groups, parse_size(field(file.header, "repeats")));
  for (const auto& row : file.table.rows) {
    if (row.size() != 7) throw std::runtime_error("grid row with wrong field count");
    const auto s = grid.project_index(row[0]), t = grid.project_index(row[1]);
    const auto rep = parse_size(row[4]), fold = parse_size(row[5]);
    if (!s || !t || rep < 1 || rep > grid.n_repeats() || fold < 1 || fold > experiment::AucGrid::kFolds)
      throw std::runtime_error("grid row out of range");
    grid.at(*s, *t, rep - 1, fold - 1) = parse_auc(row[6]);
  }
  return grid;
}

Table cv_table(const std::vector<std::string>& projects, const std::vector<experiment::CvResult>& results) {
  Table t{"wpdp", {"project", "rep", "fold", "auc"}, {}};
  for (std::size_t p = 0; p < projects.size(); ++p)
    for (std::size_t r = 0; r < results[p].repeats; ++r)
      for (std::size_t f = 0; f < results[p].folds; ++f)
        t.rows.push_back({projects[p], std::to_string(r + 1), std::to_string(f + 1), format_auc(results[p].at(r, f))});
  return t;
}

std::vector<experiment::CvResult> cv_from_file(const ResultFile& file, std::vector<std::string>* projects_out) {
  const auto projects = split(field(file.header, "projects"), '|');
  const auto repeats = parse_size(field(file.header, "repeats"));
  const auto folds = parse_size(field(file.header, "folds"));
  std::vector<experiment::CvResult> results(projects.size());
  for (auto& r : results) {
    r.repeats = repeats;
    r.folds = folds;
    r.aucs.assign(repeats * folds, std::nullopt);
  }
  for (const auto& row : file.table.rows) {
    if (row.size() != 4) throw std::runtime_error("cv row with wrong field count");
    const auto it = std::find(projects.begin(), projects.end(), row[0]);
    const auto rep = parse_size(row[1]), fold = parse_size(row[2]);
    if (it == projects.end() || rep < 1 || rep > repeats || fold < 1 || fold > folds)
      throw std::runtime_error("cv row out of range");
    results[static_cast<std::size_t>(it - projects.begin())].aucs[(rep - 1) * folds + fold - 1] = parse_auc(row[3]);
  }
  if (projects_out) *projects_out = projects;
  return results;
}

Table dataset_table(const std::vector<DefectDataset>& datasets, const InclusionCriteria& criteria) {
  Table t{"datasets",
          {"group", "project", "metrics", "instances", "buggy", "buggy_pct", "epv", "verdict"},
          {}};
  for (const auto& d : datasets) {
    const auto s = compute_stats(d);
    const auto reject = check_inclusion(s, criteria);
    t.rows.push_back({d.group_name(), d.project_name(), std::to_string(s.n_metrics), std::to_string(s.n_instances),
                      std::to_string(s.n_buggy), pct(100.0 * s.buggy_ratio), format_number(s.epv, 1),
                      reject ? std::string("rejected: ") + to_string(*reject) : "accepted"});
  }
  return t;
}

Table pair_table(const experiment::AucGrid& grid, double nan_threshold) {
  Table t{"hdp_pairs", {"source", "target", "n_feasible", "n_total", "mean_auc", "feasible"}, {}};
  for (std::size_t s = 0; s < grid.n_projects(); ++s)
    for (std::size_t tg = 0; tg < grid.n_projects(); ++tg) {
      if (s == tg) continue;
      const auto p = experiment::summarize_pair(grid, s, tg, nan_threshold);
      t.rows.push_back({p.source, p.target, std::to_string(p.n_feasible), std::to_string(p.n_total),
                        format_auc(p.mean_auc), p.feasible_under_threshold ? "yes" : "no"});
    }
  return t;
}

Table feasibility_table(const std::vector<experiment::FeasibilityPoint>& curve) {
  Table t{"feasibility", {"nan_threshold_pct", "feasible_pairs", "total_pairs", "feasible_pct"}, {}};
  for (const auto& p : curve)
    t.rows.push_back({pct(100.0 * p.threshold), std::to_string(p.feasible_pairs), std::to_string(p.total_pairs),
                      pct(p.total_pairs ? 100.0 * static_cast<double>(p.feasible_pairs) /
                                              static_cast<double>(p.total_pairs)
                                        : 0.0)});
  return t;
}

Table comparison_table(const std::vector<experiment::ComparisonRecord>& records) {
  Table t{"comparison",
          {"target", "wpdp_auc", "hdp_auc", "cliffs_delta", "magnitude", "feasible_cells", "total_cells",
           "predictability_pct", "win", "tie", "loss"},
          {}};
  std::size_t win = 0, tie = 0, loss = 0, feasible = 0, total = 0;
  std::vector<double> wpdp_means, hdp_means;
  for (const auto& r : records) {
    t.rows.push_back({r.target, format_auc(r.wpdp_mean), format_auc(r.hdp_mean),
                      r.cliffs ? format_number(r.cliffs->delta, 3) : "NaN",
                      r.cliffs ? std::string(1, stats::short_label(r.cliffs->magnitude)) : "",
                      std::to_string(r.n_feasible_cells), std::to_string(r.n_total_cells),
                      pct(100.0 * r.predictability()), std::to_string(r.wins), std::to_string(r.ties),
                      std::to_string(r.losses)});
    win += r.wins;
    tie += r.ties;
    loss += r.losses;
    feasible += r.n_feasible_cells;
    total += r.n_total_cells;
    wpdp_means.push_back(r.wpdp_mean);
    if (r.hdp_mean) hdp_means.push_back(*r.hdp_mean);
  }
  if (!records.empty())
    t.rows.push_back({"Total", format_auc(stats::mean(wpdp_means)),
                      format_auc(hdp_means.empty() ? std::nullopt : std::optional(stats::mean(hdp_means))), "", "",
                      std::to_string(feasible), std::to_string(total),
                      pct(total ? 100.0 * static_cast<double>(feasible) / static_cast<double>(total) : 0.0),
                      std::to_string(win), std::to_string(tie), std::to_string(loss)});
  return t;
}

Table ensemble_table(const std::vector<experiment::EnsembleResult>& results) {
  Table t{"ensemble", {"target", "n_sources", "sources", "ensemble_auc", "pairwise_mean_auc"}, {}};
  for (const auto& r : results)
    t.rows.push_back({r.target, std::to_string(r.feasible_sources.size()), join(r.feasible_sources, ';'),
                      format_auc(r.ensemble_auc), format_auc(r.mean_pairwise_auc)});
  return t;
}

Table coverage_table(const experiment::CoverageReport& report) {
  Table t{"coverage", {"source_group"}, {}};
  for (const auto& g : report.groups) {
    t.headers.push_back(g + "_pairs");
    t.headers.push_back(g + "_pct");
  }
  for (const char* h : {"median_wpdp", "median_hdp", "covered_targets", "coverage_pct"}) t.headers.emplace_back(h);
  for (std::size_t a = 0; a < report.groups.size(); ++a) {
    std::vector<std::string> row{report.groups[a]};
    for (const auto& cell : report.cells[a]) {
      row.push_back(std::to_string(cell.feasible_pairs));
      row.push_back(pct(cell.percentage));
    }
    const auto& s = report.sources[a];
    row.push_back(format_auc(s.median_wpdp));
    row.push_back(format_auc(s.median_hdp));
    row.push_back(std::to_string(s.covered_targets));
    row.push_back(pct(s.coverage_percentage));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> default_nan_thresholds() {
  return {0.0, 0.01, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95, 0.99, 1.0};
}

}  // namespace hdp::app
