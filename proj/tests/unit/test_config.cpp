#include <gtest/gtest.h>

#include <fstream>

#include "pimmmu/config.hpp"
#include "pimmmu/error.hpp"

namespace pimmmu {
namespace {

bool mentions(const ValidationError& e, const std::string& needle) {
  for (const auto& m : e.errors()) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(Config, DefaultsParse) {
  const SimConfig c = make_config();
  EXPECT_EQ(c.memory.dram.geometry.channels, 4u);
  EXPECT_EQ(c.memory.pim.geometry.total_banks(), 512u);
  EXPECT_EQ(c.memory.dram.mapping, MappingKind::MlpCentric);
  EXPECT_TRUE(c.memory.dram.bank_hash);
  EXPECT_EQ(c.kind, ScenarioKind::CpuDpu);
  EXPECT_EQ(c.document["schema_version"], kConfigSchemaVersion);
}

TEST(Config, OverridesParseJsonValues) {
  const SimConfig c = make_config({"dram.geometry.channels=2", "dce.scheduler=naive",
                                   "scenario.ablation.sizes_mib=[2,8]", "verify_data=false"});
  EXPECT_EQ(c.memory.dram.geometry.channels, 2u);
  EXPECT_EQ(c.dce.scheduler, SchedulerKind::Naive);
  EXPECT_EQ(c.ablation.sizes_mib, (std::vector<std::uint64_t>{2, 8}));
  EXPECT_FALSE(c.verify_data);
}

TEST(Config, UnknownKeysAreNamed) {
  try {
    resolve_config(nlohmann::json{{"dram", {{"geometry", {{"chanels", 2}}}}}, {"bogus", 1}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e, "dram.geometry.chanels: unknown field"));
    EXPECT_TRUE(mentions(e, "bogus: unknown field"));
  }
  EXPECT_THROW(make_config({"host.nothing=3"}), ValidationError);
}

TEST(Config, ReportsEveryFailingField) {
  try {
    make_config({"dram.geometry.banks=3", "host.cores=0", "dce.scheduler=fifo",
                 "pim.mapping=mlp", "controller.write_low=60"});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e, "dram.geometry.banks"));
    EXPECT_TRUE(mentions(e, "host.cores"));
    EXPECT_TRUE(mentions(e, "dce.scheduler"));
    EXPECT_TRUE(mentions(e, "pim.mapping"));
    EXPECT_TRUE(mentions(e, "controller.write_low"));
    EXPECT_GE(e.errors().size(), 5u);
  }
}

TEST(Config, MalformedOverrideIsRejected) {
  EXPECT_THROW(make_config({"seed"}), ValidationError);
  EXPECT_THROW(make_config({"seed=-4"}), ValidationError);
  EXPECT_THROW(make_config({"host.clock_ghz=fast"}), ValidationError);
}

TEST(Config, SchemaVersionMustMatch) {
  EXPECT_THROW(resolve_config(nlohmann::json{{"schema_version", 99}}), ValidationError);
  EXPECT_NO_THROW(resolve_config(nlohmann::json{{"schema_version", kConfigSchemaVersion}}));
  EXPECT_THROW(resolve_config(nlohmann::json::array()), ValidationError);
}

TEST(Config, LoadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "pimmmu_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"scenario": {"kind": "memcpy", "memcpy": {"bytes": 4096}}})";
  }
  const SimConfig c = load_config(path, {"scenario.memcpy.threads=2"});
  EXPECT_EQ(c.kind, ScenarioKind::Memcpy);
  EXPECT_EQ(c.memcpy.bytes, 4096u);
  EXPECT_EQ(c.memcpy.threads, 2u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), ValidationError);
}

}  // namespace
}  // namespace pimmmu
