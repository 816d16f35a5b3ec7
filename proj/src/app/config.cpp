#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "hdp/app.hpp"
#include "hdp/csv.hpp"
#include "hdp/random.hpp"
#include "json.hpp"

namespace hdp::app {

namespace {

constexpr const char* kAnalysisNames[] = {"wpdp", "cpdp", "hdp", "ensemble", "similarity", "coverage"};

}  // namespace

const char* to_string(Analysis a) { return kAnalysisNames[static_cast<int>(a)]; }

Analysis parse_analysis(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == kAnalysisNames[i]) return static_cast<Analysis>(i);
  throw ConfigError("unknown analysis '" + s + "' (expected wpdp, cpdp, hdp, ensemble, similarity or coverage)");
}

std::set<Analysis> parse_analyses(const std::string& list) {
  std::set<Analysis> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto trimmed = csv::trim(item);
    if (!trimmed.empty()) out.insert(parse_analysis(std::string(trimmed)));
  }
  if (out.empty())
    for (int i = 0; i < 6; ++i) out.insert(static_cast<Analysis>(i));
  return out;
}

std::vector<model::ClassifierKind> parse_classifiers(const std::string& s) {
  if (s == "both") return {model::ClassifierKind::LogisticRegression, model::ClassifierKind::RandomForest};
  try {
    return {model::parse_classifier(s)};
  } catch (const std::exception&) {
    throw ConfigError("unknown classifier '" + s + "' (expected lr, rf or both)");
  }
}

void RunConfig::validate() const {
  if (manifest.empty()) throw ConfigError("manifest path is required");
  if (classifiers.empty()) throw ConfigError("at least one classifier is required");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError(fmt::format("fraction must be in (0, 1], got {}", fraction));
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw ConfigError(fmt::format("cutoff must be in [0, 1], got {}", cutoff));
  if (!(nan_threshold >= 0.0 && nan_threshold <= 1.0))
    throw ConfigError(fmt::format("nan threshold must be in [0, 1], got {}", nan_threshold));
  if (n_repeats < 1) throw ConfigError("repeats must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

std::string RunConfig::canonical_json() const {
  nlohmann::ordered_json j;
  j["manifest"] = std::filesystem::absolute(manifest).lexically_normal().string();
  std::vector<std::string> kinds;
  for (const auto k : classifiers) kinds.emplace_back(model::short_name(k));
  j["classifiers"] = kinds;
  j["fraction"] = fraction;
  j["cutoff"] = cutoff;
  j["n_repeats"] = n_repeats;
  j["nan_threshold"] = nan_threshold;
  j["policy"] = matching::to_string(policy);
  j["seed"] = seed;
  return j.dump();
}

std::string RunConfig::hash() const { return fmt::format("{:016x}", hash_string(canonical_json())); }

experiment::HdpConfig RunConfig::hdp_config(model::ClassifierKind kind) const {
  experiment::HdpConfig c;
  c.match.fraction = fraction;
  c.match.cutoff = cutoff;
  c.match.policy = policy;
  c.kind = kind;
  c.n_repeats = n_repeats;
  c.seed = seed;
  c.jobs = jobs;
  return c;
}

}  // namespace hdp::app
