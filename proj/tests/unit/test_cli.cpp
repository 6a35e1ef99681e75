#include <gtest/gtest.h>

#if PIMMMU_HAVE_CLI

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pimmmu_cli/cli.hpp"

namespace pimmmu {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pimmmu");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pimmmu_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::vector<std::string> small() const {
    return {"-s", "scenario.transfer.xfer_per_bank=256", "-s", "scenario.transfer.cores=16",
            "-o", dir_.string()};
  }
  fs::path dir_;
};

TEST_F(Cli, RunWritesReportsAndExitsZero) {
  auto args = small();
  args.insert(args.begin(), {"run", "--trace", "--dce-log"});
  const auto r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("data pass"), std::string::npos);
  for (const char* f : {"cpu_dpu.json", "cpu_dpu.csv", "trace_dram.txt", "trace_pim.txt",
                        "dce_events.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  EXPECT_GT(fs::file_size(dir_ / "trace_pim.txt"), 0u);
}

TEST_F(Cli, ValidationFailureExitsOne) {
  const auto r = invoke({"run", "-s", "dram.geometry.banks=3", "-o", dir_.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dram.geometry.banks"), std::string::npos);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"run", "--config", (dir_ / "missing.json").string()}).code, 1);
}

TEST_F(Cli, WatchdogAbortExitsTwo) {
  auto args = small();
  args.insert(args.begin(), {"run", "--watchdog", "5"});
  const auto r = invoke(args);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("simulation aborted"), std::string::npos);
}

TEST_F(Cli, CheckConfig) {
  EXPECT_EQ(invoke({"check-config", "-s", "scenario.kind=memcpy"}).code, 0);
  EXPECT_EQ(invoke({"check-config", "-s", "scenario.kind=nothing"}).code, 1);
}

TEST_F(Cli, DiffReportExitCodes) {
  auto args = small();
  args.insert(args.begin(), "run");
  ASSERT_EQ(invoke(args).code, 0);
  const std::string a = (dir_ / "cpu_dpu.json").string();
  const auto same = invoke({"diff-report", a, a});
  EXPECT_EQ(same.code, 0);
  EXPECT_NE(same.out.find("0 outside tolerance"), std::string::npos);

  std::ifstream in(a);
  std::stringstream text;
  text << in.rdbuf();
  std::string changed = text.str();
  const std::string key = "\"dram_cycles\": ";
  const auto pos = changed.find(key);
  ASSERT_NE(pos, std::string::npos);
  changed.insert(pos + key.size(), "9");
  const std::string b = (dir_ / "changed.json").string();
  std::ofstream(b) << changed;
  EXPECT_EQ(invoke({"diff-report", a, b, "-t", "0.1"}).code, 1);
  EXPECT_EQ(invoke({"diff-report", a, b, "-t", "0.1", "-m", "reports.0.dram_cycles=1e9"}).code, 0);
}

TEST_F(Cli, SweepTakesAxisAndValues) {
  const auto r = invoke({"sweep", "--axis", "ranks", "--values", "1", "2", "-s",
                         "scenario.memcpy.bytes=65536", "-o", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ranks=1"), std::string::npos);
  EXPECT_NE(r.out.find("ranks=2"), std::string::npos);
}

}  // namespace
}  // namespace pimmmu

#endif  // PIMMMU_HAVE_CLI
