#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdp/dataset.hpp"
#include "support/synthetic.hpp"

using namespace hdp;

namespace {

DefectDataset parse(const std::string& text, LabelRule rule = LabelRule::Auto) {
  std::istringstream in(text);
  return parse_dataset(in, "p", "g", "bug", rule);
}

DefectDataset with_counts(std::size_t n, std::size_t buggy, std::size_t metrics) {
  Matrix x(n, metrics);
  std::vector<bool> y(n, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < metrics; ++c) x(i, c) = static_cast<double>(i * (c + 1));
  for (std::size_t i = 0; i < buggy; ++i) y[i] = true;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < metrics; ++c) names.push_back("m" + std::to_string(c));
  return DefectDataset("d" + std::to_string(n) + "_" + std::to_string(buggy), "g", names, std::move(x), std::move(y));
}

}  // namespace

TEST(Dataset, ParsesMetricsAndLabels) {
  const auto d = parse("loc,bug,cc\n10,1,2\n20,0,3\n30,yes,4\n");
  EXPECT_EQ(d.n_instances(), 3u);
  EXPECT_EQ(d.metric_names(), (std::vector<std::string>{"loc", "cc"}));
  EXPECT_EQ(d.labels(), (std::vector<bool>{true, false, true}));
  EXPECT_EQ(d.instances()(2, 1), 4.0);
  EXPECT_EQ(d.n_buggy(), 2u);
}

TEST(Dataset, LabelSpellings) {
  const auto d = parse("m,bug\n1,Buggy\n2,clean\n3,TRUE\n4,n\n5,No\n6,Y\n");
  EXPECT_EQ(d.labels(), (std::vector<bool>{true, false, true, false, false, true}));
}

TEST(Dataset, DefectCountRule) {
  const auto d = parse("m,bug\n1,0\n2,3\n3,1\n", LabelRule::DefectCount);
  EXPECT_EQ(d.labels(), (std::vector<bool>{false, true, true}));
  EXPECT_THROW(parse("m,bug\n1,0\n2,3\n3,1\n"), DatasetError);  // 3 is not a 0/1 label
}

TEST(Dataset, RejectsMalformedInput) {
  EXPECT_THROW(parse(""), DatasetError);
  EXPECT_THROW(parse("m,other\n1,1\n"), DatasetError);
  EXPECT_THROW(parse("m,bug\n1,1\n2\n"), DatasetError);
  EXPECT_THROW(parse("m,bug\nx,1\n2,0\n"), DatasetError);
  EXPECT_THROW(parse("m,bug\n,1\n2,0\n"), DatasetError);
  EXPECT_THROW(parse("m,bug\n1,maybe\n2,0\n"), DatasetError);
  EXPECT_THROW(parse("m,m,bug\n1,1,1\n2,2,0\n"), DatasetError);
  EXPECT_THROW(parse("m,bug\n1,1\n2,1\n"), DatasetError);  // one class only
}

TEST(Dataset, MissingFileNamesThePath) {
  try {
    load_dataset("/nonexistent/file.csv", "p", "g", "bug");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/file.csv"), std::string::npos);
  }
}

TEST(Dataset, StatsAndEpv) {
  // 130 buggy of 1000 with 12 metrics: EPV 10.8
  const auto s = compute_stats(with_counts(1000, 130, 12));
  EXPECT_EQ(s.n_buggy, 130u);
  EXPECT_DOUBLE_EQ(s.buggy_ratio, 0.13);
  EXPECT_NEAR(s.epv, 10.833, 1e-3);
}

TEST(Dataset, InclusionCriteria) {
  EXPECT_FALSE(check_inclusion(compute_stats(with_counts(100, 40, 4))));
  EXPECT_EQ(check_inclusion(compute_stats(with_counts(100, 55, 4))), RejectReason::HighDefectRatio);
  EXPECT_EQ(check_inclusion(compute_stats(with_counts(100, 30, 4))), RejectReason::LowEpv);
  // exactly on both limits is accepted
  EXPECT_FALSE(check_inclusion(compute_stats(with_counts(100, 50, 5))));
  // EPV is reported first when both fail
  EXPECT_EQ(check_inclusion(compute_stats(with_counts(100, 60, 10))), RejectReason::LowEpv);
}

TEST(Dataset, InclusionPartitionsInput) {
  std::vector<DefectDataset> all;
  for (std::size_t b = 10; b <= 90; b += 10) all.push_back(with_counts(100, b, 3));
  const auto r = apply_inclusion_criteria(all);
  EXPECT_EQ(r.accepted.size() + r.rejected.size(), all.size());
  for (const auto& d : r.accepted) EXPECT_FALSE(check_inclusion(compute_stats(d)));
  for (const auto& rej : r.rejected) EXPECT_EQ(check_inclusion(compute_stats(rej.dataset)), rej.reason);
}

TEST(Manifest, ParsesEntriesRelativeToBase) {
  std::istringstream in("# corpus\npath,project,group,label_column,label_rule\n\na.csv,A,G1,bug\n/abs/b.csv,B,G2,defects,count\n");
  const auto m = parse_manifest(in, "/data");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].path, std::filesystem::path("/data/a.csv"));
  EXPECT_EQ(m.entries[0].label_rule, LabelRule::Auto);
  EXPECT_EQ(m.entries[1].path, std::filesystem::path("/abs/b.csv"));
  EXPECT_EQ(m.entries[1].label_rule, LabelRule::DefectCount);
}

TEST(Manifest, RejectsDuplicatesAndBadRows) {
  std::istringstream dup("path,project,group,label_column\na.csv,A,G,bug\nb.csv,A,G,bug\n");
  EXPECT_THROW(parse_manifest(dup, "."), DatasetError);
  std::istringstream short_row("path,project,group,label_column\na.csv,A\n");
  EXPECT_THROW(parse_manifest(short_row, "."), DatasetError);
  std::istringstream empty("");
  EXPECT_TRUE(parse_manifest(empty, ".").entries.empty());
}

TEST(Manifest, LoadsSyntheticCorpus) {
  const auto dir = std::filesystem::temp_directory_path() / "hdp_manifest_test";
  const auto manifest = hdp::testing::write_corpus(dir, 9);
  const auto datasets = load_manifest_datasets(load_manifest(manifest));
  ASSERT_EQ(datasets.size(), 5u);
  EXPECT_EQ(datasets[2].project_name(), "B1");
  EXPECT_EQ(datasets[2].group_name(), "GroupB");
  EXPECT_EQ(datasets[0].n_metrics(), 8u);
  std::filesystem::remove_all(dir);
}
