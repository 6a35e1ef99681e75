#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pimmmu/config.hpp"
#include "pimmmu/engine.hpp"

namespace pimmmu {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string render(const std::string& name, unsigned jobs) {
  const SimConfig cfg = load_config(fs::path(PIMMMU_GOLDEN_DIR) / (name + ".config.json"));
  return run_config(cfg, jobs).dump(2) + "\n";
}

class Golden : public ::testing::TestWithParam<const char*> {};

TEST_P(Golden, ReportIsByteIdentical) {
  const std::string name = GetParam();
  const std::string want = slurp(fs::path(PIMMMU_GOLDEN_DIR) / (name + ".report.json"));
  ASSERT_FALSE(want.empty());
  EXPECT_EQ(render(name, 1), want);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Golden,
                         ::testing::Values("cpu_dpu_dce", "cpu_dpu_host", "memcpy", "ablation"));

TEST(GoldenJobs, AblationOutputDoesNotDependOnWorkerCount) {
  EXPECT_EQ(render("ablation", 1), render("ablation", 4));
}

}  // namespace
}  // namespace pimmmu
