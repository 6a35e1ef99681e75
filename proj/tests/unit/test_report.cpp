#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "pimmmu/engine.hpp"
#include "pimmmu/report.hpp"

namespace pimmmu {
namespace {

nlohmann::json sample_document() {
  static const nlohmann::json doc =
      report_document("cpu_dpu", {run_scenario(testing::small_config())});
  return doc;
}

TEST(Report, DocumentCarriesSchemaAndConfig) {
  const auto doc = sample_document();
  EXPECT_EQ(doc["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(doc["kind"], "cpu_dpu");
  ASSERT_EQ(doc["reports"].size(), 1u);
  EXPECT_TRUE(doc["reports"][0].contains("config"));
}

TEST(Report, FlattenSkipsConfigAndTimelines) {
  const auto m = flatten_metrics(sample_document());
  EXPECT_FALSE(m.empty());
  for (const auto& [k, v] : m) {
    EXPECT_EQ(k.find("config"), std::string::npos) << k;
    EXPECT_EQ(k.find("timeline"), std::string::npos) << k;
  }
  EXPECT_TRUE(m.count("reports.0.throughput_gbps"));
}

TEST(Report, DiffAgainstItselfPasses) {
  const auto doc = sample_document();
  const DiffResult d = diff_report(doc, doc, 0.0);
  EXPECT_TRUE(d.ok);
  for (const auto& row : d.rows) EXPECT_EQ(row.rel_delta, 0.0);
}

TEST(Report, DoubledMetricBreachesTenPercent) {
  const auto a = sample_document();
  auto b = a;
  b["reports"][0]["throughput_gbps"] = 2 * a["reports"][0]["throughput_gbps"].get<double>();
  const DiffResult d = diff_report(a, b, 0.10);
  EXPECT_FALSE(d.ok);
  std::size_t failing = 0;
  for (const auto& row : d.rows) {
    if (row.pass) continue;
    ++failing;
    EXPECT_EQ(row.metric, "reports.0.throughput_gbps");
    EXPECT_DOUBLE_EQ(row.rel_delta, 1.0);
  }
  EXPECT_EQ(failing, 1u);
  EXPECT_TRUE(diff_report(a, b, 0.10, {{"reports.0.throughput_gbps", 1.0}}).ok);
}

TEST(Report, MissingMetricFails) {
  const auto a = sample_document();
  auto b = a;
  b["reports"][0].erase("elapsed_ns");
  EXPECT_FALSE(diff_report(a, b, 1.0).ok);
}

TEST(Report, SchemaMismatchThrows) {
  const auto a = sample_document();
  auto b = a;
  b["schema_version"] = kReportSchemaVersion + 1;
  EXPECT_THROW(diff_report(a, b, 0.1), std::runtime_error);
  b.erase("schema_version");
  EXPECT_THROW(diff_report(a, b, 0.1), std::runtime_error);
}

TEST(Report, CsvHasHeaderAndOneRowPerReport) {
  const SimReport r = run_scenario(testing::small_config());
  std::vector<SimReport> reports{r, r};
  reports[1].label = "second, quoted";
  std::istringstream in(to_csv(reports));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_NE(lines[0].find("throughput_gbps"), std::string::npos);
  EXPECT_NE(lines[2].find("\"second, quoted\""), std::string::npos);
  const auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(cols(lines[0]), cols(lines[1]));
}

}  // namespace
}  // namespace pimmmu
