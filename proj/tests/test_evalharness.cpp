#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "dtpca/evalharness.hpp"
#include "support/fixtures.hpp"

using namespace dtpca;
using testing_support::make_synthetic_dataset;
using testing_support::ScratchDir;
using testing_support::SyntheticSpec;

namespace {

AccuracyRow row(std::size_t train, std::size_t test, MatchMode mode, const std::string& scheme, std::size_t correct) {
  AccuracyRow r;
  r.train_count = train;
  r.test_count = test;
  r.mode = mode;
  r.scheme = mode == MatchMode::pca_only ? "none" : scheme;
  r.correct = correct;
  r.total = test;
  r.percent = accuracy(correct, test);
  return r;
}

}  // namespace

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(30, 30), 100.0);
  EXPECT_EQ(accuracy(43, 45), 95.6);
  EXPECT_EQ(accuracy(0, 10), 0.0);
  EXPECT_EQ(accuracy(26, 30), 86.7);
  EXPECT_EQ(format_percent(26, 30), "86.7");
  EXPECT_EQ(format_percent(30, 30), "100.0");
  // 1/8 = 12.5 exactly, 1/16 = 6.25 rounds half-up
  EXPECT_EQ(format_percent(1, 16), "6.3");
  EXPECT_THROW(accuracy(0, 0), Error);
  EXPECT_THROW(accuracy(3, 2), Error);
}

TEST(Accuracy, TenthsMatchExactRationalRounding) {
  for (std::size_t t = 1; t <= 200; ++t)
    for (std::size_t c = 0; c <= t; ++c) {
      // floor(1000c/t + 1/2) computed independently
      const std::size_t num = 2000 * c + t, den = 2 * t;
      EXPECT_EQ(accuracy_tenths(c, t), static_cast<std::int64_t>(num / den));
      const double p = accuracy(c, t);
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 100.0);
    }
}

TEST(RunExperiment, FifteenByNineWithSevenTrainingVariants) {
  ScratchDir dir("eval7");
  const auto data = make_synthetic_dataset(dir.path(), SyntheticSpec{});
  ExperimentConfig config;
  config.manifest_path = data.manifest;
  config.train_variants = 7;
  const AccuracyTable table = run_experiment(config);
  ASSERT_EQ(table.rows.size(), 2u);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.train_count, 105u);
    EXPECT_EQ(r.test_count, 30u);
    EXPECT_EQ(r.total, 30u);
    EXPECT_EQ(r.split_label(), "Train – 105 Test – 30");
  }
  EXPECT_EQ(table.rows[0].mode, MatchMode::pca_only);
  EXPECT_EQ(table.rows[0].scheme, "none");
  EXPECT_EQ(table.rows[1].mode, MatchMode::dt_pca);
  EXPECT_EQ(table.rows[1].scheme, "68");
}

TEST(EvaluateSplit, TrainingSetAsTestSetIsPerfect) {
  ScratchDir dir("self");
  SyntheticSpec spec;
  spec.subjects = 5;
  spec.variants = 3;
  const auto data = make_synthetic_dataset(dir.path(), spec);
  const DatasetManifest m = load_manifest(data.manifest);
  ExperimentConfig config;
  const AccuracyTable table = evaluate_split(m, m, config);
  ASSERT_EQ(table.rows.size(), 2u);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.correct, r.total);
    EXPECT_EQ(r.percent, 100.0);
  }
}

TEST(EvaluateSplit, AddingTheTestImageToTheGalleryFixesIt) {
  ScratchDir dir("add");
  SyntheticSpec spec;
  spec.subjects = 6;
  spec.variants = 4;
  spec.image_noise = 0.2;
  const auto data = make_synthetic_dataset(dir.path(), spec);
  const DatasetSplit split = split_dataset(load_manifest(data.manifest), 1);
  ExperimentConfig config;
  config.modes = {MatchMode::pca_only};
  for (const auto& probe : split.test.entries) {
    DatasetManifest train = split.train, test;
    train.entries.push_back(probe);
    test.entries.push_back(probe);
    const AccuracyTable table = evaluate_split(train, test, config);
    EXPECT_EQ(table.rows.at(0).correct, 1u) << probe.image_path;
  }
}

TEST(EvaluateSplit, PcaOnlyNeverReadsLandmarks) {
  ScratchDir dir("nolm");
  SyntheticSpec spec;
  spec.subjects = 4;
  spec.variants = 3;
  const auto data = make_synthetic_dataset(dir.path(), spec);
  std::filesystem::remove_all(dir / "lm");
  ExperimentConfig config;
  config.manifest_path = data.manifest;
  config.train_variants = 2;
  config.modes = {MatchMode::pca_only};
  const AccuracyTable table = run_experiment(config);
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.rows[0].total, 4u);

  config.modes = {MatchMode::dt_pca};
  try {
    run_experiment(config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::data);
  }
}

TEST(EvaluateSplit, Errors) {
  ScratchDir dir("everr");
  SyntheticSpec spec;
  spec.subjects = 3;
  spec.variants = 3;
  const auto data = make_synthetic_dataset(dir.path(), spec);
  ExperimentConfig config;
  config.manifest_path = data.manifest;
  config.train_variants = 3;
  EXPECT_THROW(run_experiment(config), Error);
  config.train_variants = 2;
  config.k = 0;
  EXPECT_THROW(run_experiment(config), Error);
  config.k = 25;
  config.dt_divisor = 0.0;
  EXPECT_THROW(run_experiment(config), Error);
  config.dt_divisor = kDefaultDtDivisor;
  config.modes.clear();
  EXPECT_THROW(run_experiment(config), Error);

  // mismatched image sizes are a data error
  ImageVector odd;
  odd.width = 5;
  odd.height = 5;
  odd.values.assign(25, 0.5);
  write_pgm(odd, data.entries.back().image_path);
  config.modes = {MatchMode::pca_only};
  try {
    run_experiment(config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::data);
  }
}

TEST(RenderReport, ThreeSplitTextLayout) {
  AccuracyTable table;
  table.rows = {row(105, 30, MatchMode::pca_only, "", 26), row(105, 30, MatchMode::dt_pca, "68", 28),
                row(75, 60, MatchMode::pca_only, "", 51), row(75, 60, MatchMode::dt_pca, "68", 53),
                row(45, 90, MatchMode::pca_only, "", 74), row(45, 90, MatchMode::dt_pca, "68", 79)};
  const std::string expected =
      "                      | Traditional PCA | 68-L\n"
      "Train – 105 Test – 30 | 86.7 %          | 93.3 %\n"
      "Train – 75 Test – 60  | 85.0 %          | 88.3 %\n"
      "Train – 45 Test – 90  | 82.2 %          | 87.8 %\n";
  EXPECT_EQ(render_report(table, ReportFormat::text), expected);
}

TEST(RenderReport, SchemeColumnsInFirstSeenOrder) {
  AccuracyTable table;
  table.rows = {row(105, 30, MatchMode::pca_only, "", 26), row(105, 30, MatchMode::dt_pca, "68", 28),
                row(105, 30, MatchMode::dt_pca, "79", 27), row(105, 30, MatchMode::dt_pca, "194", 29)};
  const std::string text = render_report(table, ReportFormat::text);
  const std::string header = text.substr(0, text.find('\n'));
  EXPECT_EQ(header, "                      | Traditional PCA | 68-L   | 79-L   | 194-L");
  EXPECT_NE(text.find("Train – 105 Test – 30 | 86.7 %          | 93.3 % | 90.0 % | 96.7 %\n"), std::string::npos);
}

TEST(RenderReport, Csv) {
  AccuracyTable table;
  table.rows = {row(105, 30, MatchMode::pca_only, "", 26), row(105, 30, MatchMode::dt_pca, "68", 28)};
  EXPECT_EQ(render_report(table, ReportFormat::csv),
            "split,mode,scheme,correct,total,percent\n"
            "105/30,pca_only,none,26,30,86.7\n"
            "105/30,dt_pca,68,28,30,93.3\n");
  EXPECT_THROW(render_report(AccuracyTable{}, ReportFormat::csv), Error);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
  EXPECT_THROW(parse_report_format("html"), Error);
}

TEST(EmitReport, WritesFileAndFailsOnUnwritablePath) {
  ScratchDir dir("emit");
  AccuracyTable table;
  table.rows = {row(105, 30, MatchMode::pca_only, "", 30)};
  emit_report(table, ReportFormat::csv, dir / "r.csv");
  EXPECT_EQ(testing_support::read_text(dir / "r.csv"), render_csv(table));
  EXPECT_THROW(emit_report(table, ReportFormat::csv, dir / "missing" / "r.csv"), Error);
  EXPECT_FALSE(std::filesystem::exists(dir / "missing"));
}

TEST(RunExperiment, RepeatedRunsRenderIdenticalReports) {
  ScratchDir dir("det");
  SyntheticSpec spec;
  spec.subjects = 6;
  spec.variants = 5;
  const auto data = make_synthetic_dataset(dir.path(), spec);
  ExperimentConfig config;
  config.manifest_path = data.manifest;
  config.train_variants = 3;
  const std::string a = render_csv(run_experiment(config)) + render_text(run_experiment(config));
  const std::string b = render_csv(run_experiment(config)) + render_text(run_experiment(config));
  EXPECT_EQ(a, b);
}
