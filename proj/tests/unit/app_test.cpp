#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdp/app.hpp"
#include "support/synthetic.hpp"

using namespace hdp;
using namespace hdp::app;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class AppTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("hdp_app_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  RunConfig config(const std::filesystem::path& manifest, const std::string& out) const {
    RunConfig c;
    c.manifest = manifest;
    c.n_repeats = 2;
    c.seed = 42;
    c.out = dir_ / out;
    return c;
  }

  std::filesystem::path dir_;
};

}  // namespace

TEST(Config, Validation) {
  RunConfig c;
  c.manifest = "m.csv";
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.fraction = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.cutoff = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.nan_threshold = -0.1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.n_repeats = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.manifest.clear();
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Config, HashIgnoresOutputAndJobs) {
  RunConfig a;
  a.manifest = "m.csv";
  auto b = a;
  b.out = "elsewhere";
  b.jobs = 8;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, ParsesLists) {
  EXPECT_EQ(parse_classifiers("both").size(), 2u);
  EXPECT_THROW(parse_classifiers("svm"), ConfigError);
  EXPECT_EQ(parse_analyses("hdp, coverage"), (std::set<Analysis>{Analysis::Hdp, Analysis::Coverage}));
  EXPECT_EQ(parse_analyses("").size(), 6u);
  EXPECT_THROW(parse_analyses("hdp,plots"), ConfigError);
}

TEST(Tables, TextAlignsAndCsvRoundTrips) {
  Table t{"demo", {"name", "auc"}, {{"JDT", "0.810"}, {"ML", "NaN"}}};
  const auto text = render_text(t);
  EXPECT_NE(text.find("JDT   0.810"), std::string::npos);
  EXPECT_NE(text.find("ML      NaN"), std::string::npos);
  FileHeader h{"0123456789abcdef", 7, "demo", {{"classifier", "lr"}}};
  std::istringstream in(header_text(h) + render_csv(t));
  const auto f = parse_result_file(in);
  EXPECT_EQ(f.header.config_hash, h.config_hash);
  EXPECT_EQ(f.header.seed, 7u);
  EXPECT_EQ(f.header.kind, "demo");
  EXPECT_EQ(f.header.fields.at("classifier"), "lr");
  EXPECT_EQ(f.table.headers, t.headers);
  EXPECT_EQ(f.table.rows, t.rows);
  EXPECT_EQ(format_auc(std::nullopt), "NaN");
}

TEST(Tables, GridRoundTrip) {
  experiment::AucGrid grid({"a", "b"}, {"X", "Y"}, 2);
  grid.at(0, 1, 1, 0) = 0.625;
  grid.at(1, 0, 0, 1) = 0.5;
  ResultFile f;
  f.header.fields = {{"projects", "a|b"}, {"groups", "X|Y"}, {"repeats", "2"}};
  f.table = grid_table(grid);
  EXPECT_EQ(f.table.rows.size(), 8u);
  const auto back = grid_from_file(f);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(back.at(s, t, r, k), grid.at(s, t, r, k));
}

TEST_F(AppTest, ValidateEmptyManifestSucceeds) {
  std::ofstream(dir_ / "empty.csv") << "path,project,group,label_column\n";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(dir_ / "empty.csv", out, err), 0);
  EXPECT_NE(out.str().find("project"), std::string::npos);
  EXPECT_NE(out.str().find("0 accepted"), std::string::npos);
}

TEST_F(AppTest, ValidateNamesMissingFile) {
  std::ofstream(dir_ / "m.csv") << "path,project,group,label_column\nnope.csv,P,G,bug\n";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(dir_ / "m.csv", out, err), 1);
  EXPECT_NE(err.str().find("nope.csv"), std::string::npos);
}

TEST_F(AppTest, ValidateSyntheticCorpus) {
  const auto manifest = hdp::testing::write_corpus(dir_ / "corpus", 3);
  std::ostringstream out, err;
  EXPECT_EQ(cmd_validate(manifest, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("5 accepted"), std::string::npos) << out.str();
}

TEST_F(AppTest, RunIsByteIdenticalAndReportChecksHashes) {
  const auto manifest = hdp::testing::write_corpus(dir_ / "corpus", 3, 250);
  std::ostringstream log;
  auto c1 = config(manifest, "run1");
  auto c2 = config(manifest, "run2");
  c2.jobs = 3;
  ASSERT_EQ(cmd_run(c1, {Analysis::Hdp, Analysis::Coverage}, log), 0) << log.str();
  ASSERT_EQ(cmd_run(c2, {Analysis::Hdp, Analysis::Coverage}, log), 0) << log.str();
  for (const char* f : {"hdp_grid_lr.csv", "hdp_pairs_lr.csv", "comparison_lr.csv", "coverage_lr.csv", "run.json"})
    EXPECT_EQ(slurp(dir_ / "run1" / f), slurp(dir_ / "run2" / f)) << f;
  EXPECT_NE(log.str().find("[lr] hdp A1 -> B1"), std::string::npos) << log.str();

  std::ostringstream out, err;
  ASSERT_EQ(cmd_report({dir_ / "run1" / "hdp_grid_lr.csv", dir_ / "run1" / "wpdp_2fold_lr.csv"}, dir_ / "rendered",
                       out, err),
            0)
      << err.str();
  EXPECT_NE(out.str().find("comparison lr"), std::string::npos);
  EXPECT_NE(out.str().find("win"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "rendered" / "comparison_lr.csv"));

  auto c3 = config(manifest, "run3");
  c3.seed = 43;
  ASSERT_EQ(cmd_run(c3, {Analysis::Hdp}, log), 0);
  std::ostringstream out2, err2;
  EXPECT_EQ(cmd_report({dir_ / "run1" / "hdp_grid_lr.csv", dir_ / "run3" / "wpdp_2fold_lr.csv"}, std::nullopt, out2,
                       err2),
            1);
  EXPECT_NE(err2.str().find("mismatch"), std::string::npos);
}

TEST_F(AppTest, ReportOfEmptyGridHasHeadersOnly) {
  std::ofstream(dir_ / "empty.csv") << "path,project,group,label_column\n";
  std::ostringstream log;
  ASSERT_EQ(cmd_run(config(dir_ / "empty.csv", "run"), {Analysis::Hdp}, log), 0) << log.str();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_report({dir_ / "run" / "hdp_grid_lr.csv"}, std::nullopt, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("source  target"), std::string::npos);
}

TEST_F(AppTest, RunRejectsInvalidConfig) {
  std::ostringstream log;
  auto c = config(dir_ / "missing.csv", "run");
  EXPECT_EQ(cmd_run(c, {Analysis::Hdp}, log), 1);
  c.fraction = 2.0;
  EXPECT_EQ(cmd_run(c, {Analysis::Hdp}, log), 1);
  EXPECT_NE(log.str().find("fraction"), std::string::npos);
}

TEST_F(AppTest, AllAnalysesWriteFiles) {
  const auto manifest = hdp::testing::write_corpus(dir_ / "corpus", 4, 250);
  std::ostringstream log;
  auto c = config(manifest, "all");
  c.classifiers = parse_classifiers("both");
  ASSERT_EQ(cmd_run(c, parse_analyses(""), log), 0) << log.str();
  for (const char* f : {"wpdp_10x10_lr.csv", "cpdp_rf.csv", "ensemble_lr.csv", "similarity_distance.csv",
                        "similarity_selection_rf.csv", "coverage_rf.csv", "feasibility_lr.csv", "report.txt"})
    EXPECT_TRUE(std::filesystem::exists(dir_ / "all" / f)) << f;
  const auto grid = read_result_file(dir_ / "all" / "hdp_grid_lr.csv");
  EXPECT_EQ(grid.header.config_hash, c.hash());
  EXPECT_EQ(grid.header.seed, 42u);
}
