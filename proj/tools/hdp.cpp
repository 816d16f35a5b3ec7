#include <iostream>

#include "CLI11.hpp"
#include "hdp/app.hpp"
#include "hdp/parallel.hpp"

int main(int argc, char** argv) {
  using namespace hdp;
  CLI::App app{"Heterogeneous defect prediction experiments"};
  app.require_subcommand(1);

  std::string manifest;
  auto* validate = app.add_subcommand("validate", "Load a manifest and print dataset statistics");
  validate->add_option("--manifest", manifest, "Dataset manifest (CSV)")->required();

  app::RunConfig config;
  config.jobs = default_jobs();
  std::string classifier = "lr", policy = "all-source", only;
  auto* run = app.add_subcommand("run", "Run experiments and write result files");
  run->add_option("--manifest", config.manifest, "Dataset manifest (CSV)")->required();
  run->add_option("--classifier", classifier, "lr, rf or both")->capture_default_str();
  run->add_option("--fraction", config.fraction, "Fraction of source metrics kept by gain ratio")->capture_default_str();
  run->add_option("--cutoff", config.cutoff, "Minimum KS p-value for a metric pair")->capture_default_str();
  run->add_option("--repeats", config.n_repeats, "Replications of 2-fold CV")->capture_default_str();
  run->add_option("--nan-threshold", config.nan_threshold, "Acceptable fraction of infeasible cells")
      ->capture_default_str();
  run->add_option("--policy", policy, "Feasibility policy: all-source or any")->capture_default_str();
  run->add_option("--seed", config.seed, "Global seed")->capture_default_str();
  run->add_option("--out", config.out, "Output directory")->capture_default_str();
  run->add_option("--jobs", config.jobs, "Worker threads")->envname("HDP_JOBS");
  run->add_option("--only", only, "Comma-separated subset of wpdp,cpdp,hdp,ensemble,similarity,coverage");

  std::vector<std::string> inputs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Render result files as tables");
  report->add_option("files", inputs, "Result files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Directory for CSV renderings");

  CLI11_PARSE(app, argc, argv);

  if (*validate) return app::cmd_validate(manifest, std::cout, std::cerr);
  if (*run) {
    try {
      config.classifiers = app::parse_classifiers(classifier);
      config.policy = matching::parse_policy(policy);
      return app::cmd_run(config, app::parse_analyses(only), std::cerr);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  std::optional<std::filesystem::path> out_dir;
  if (!report_out.empty()) out_dir = report_out;
  std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
  return app::cmd_report(paths, out_dir, std::cout, std::cerr);
}
