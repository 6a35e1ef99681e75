#include <gtest/gtest.h>

#include <map>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "pimmmu/dce.hpp"
#include "pimmmu/engine.hpp"
#include "pimmmu/error.hpp"

namespace pimmmu {
namespace {

struct DceRun {
  DceStats stats;
  Simulation::Span span;
};

DceRun run_dce(Simulation& sim, const SimConfig& cfg, const TransferDescriptor& d,
               std::ostream* log = nullptr) {
  DataCopyEngine dce(sim.memory(), sim.image(), cfg.dce);
  dce.set_event_log(log);
  dce.start(d);
  const auto span = sim.run(dce, cfg.dce.clock_ghz);
  return {dce.stats(), span};
}

// Expected destination bytes from the source pattern, the bank arithmetic
// and the chip-lane transpose.
void expect_transposed_copy(const TransferDescriptor& d, const SimConfig& cfg,
                            Simulation& sim) {
  const HetMap& map = sim.memory().map();
  const Geometry& pim = cfg.memory.pim.geometry;
  std::vector<std::uint8_t> src(64), want(64), got(64);
  for (std::size_t i = 0; i < d.pim_core_ids.size(); ++i) {
    const PhysAddr bank = testing::bank_base_oracle(pim, map.pim_base(), d.pim_core_ids[i],
                                                    d.pim_heap_base);
    const PhysAddr from = d.direction == Direction::DramToPim ? d.dram_bases[i] : bank;
    const PhysAddr to = d.direction == Direction::DramToPim ? bank : d.dram_bases[i];
    for (std::uint64_t off = 0; off < d.xfer_per_bank; off += 64) {
      for (std::size_t b = 0; b < 64; ++b) src[b] = sim.image()->pattern_byte(from + off + b);
      testing::transpose_oracle(src.data(), want.data());
      sim.image()->read(to + off, got);
      ASSERT_EQ(got, want) << "core " << d.pim_core_ids[i] << " offset " << off;
    }
  }
}

TEST(Dce, ZeroLengthTransferFinishesImmediately) {
  const SimConfig cfg = testing::small_config({"scenario.transfer.xfer_per_bank=0"});
  Simulation sim(cfg.memory, cfg.seed, true);
  const auto r = run_dce(sim, cfg, make_descriptor(cfg, sim.memory().map()));
  EXPECT_EQ(r.stats.reads_issued, 0u);
  EXPECT_EQ(r.stats.writes_done, 0u);
  EXPECT_EQ(r.span.dram_cycles, 0u);
}

TEST(Dce, RejectsInvalidDescriptor) {
  const SimConfig cfg = testing::small_config();
  Simulation sim(cfg.memory, cfg.seed, true);
  DataCopyEngine dce(sim.memory(), sim.image(), cfg.dce);
  auto d = make_descriptor(cfg, sim.memory().map());
  d.xfer_per_bank = 100;
  EXPECT_THROW(dce.start(d), ValidationError);
}

TEST(Dce, ConservesLinesAndBytesBothDirections) {
  for (const char* dir : {"dram_to_pim", "pim_to_dram"}) {
    const SimConfig cfg =
        testing::small_config({std::string("scenario.transfer.direction=") + dir});
    Simulation sim(cfg.memory, cfg.seed, true);
    const auto d = make_descriptor(cfg, sim.memory().map());
    const auto r = run_dce(sim, cfg, d);
    const std::uint64_t lines = d.total_bytes() / 64;
    EXPECT_EQ(r.stats.reads_issued, lines);
    EXPECT_EQ(r.stats.reads_done, lines);
    EXPECT_EQ(r.stats.writes_issued, lines);
    EXPECT_EQ(r.stats.writes_done, lines);
    EXPECT_EQ(r.stats.bytes_read, d.total_bytes());
    EXPECT_EQ(r.stats.bytes_written, d.total_bytes());
    expect_transposed_copy(d, cfg, sim);
  }
}

TEST(Dce, SmallBuffersBoundOccupancyAndSplitWaves) {
  const SimConfig cfg = testing::small_config(
      {"dce.data_buffer_bytes=256", "dce.address_buffer_bytes=64", "scenario.transfer.cores=13"});
  Simulation sim(cfg.memory, cfg.seed, true);
  const auto d = make_descriptor(cfg, sim.memory().map());
  const auto r = run_dce(sim, cfg, d);
  EXPECT_LE(r.stats.max_buffer_lines, 4u);
  EXPECT_EQ(r.stats.max_address_entries, 4u);
  EXPECT_EQ(r.stats.waves, 4u);  // 13 entries, 4 per load
  EXPECT_EQ(r.stats.writes_done, d.total_bytes() / 64);
  expect_transposed_copy(d, cfg, sim);
}

TEST(Dce, NaiveSchedulerMovesTheSameData) {
  const SimConfig cfg = testing::small_config({"dce.scheduler=naive"});
  Simulation sim(cfg.memory, cfg.seed, true);
  const auto d = make_descriptor(cfg, sim.memory().map());
  run_dce(sim, cfg, d);
  expect_transposed_copy(d, cfg, sim);
}

TEST(Dce, RoundTripRestoresTheSource) {
  const SimConfig cfg = testing::small_config();
  Simulation sim(cfg.memory, cfg.seed, true);
  const auto to_pim = make_descriptor(cfg, sim.memory().map());
  run_dce(sim, cfg, to_pim);
  auto back = to_pim;
  back.direction = Direction::PimToDram;
  const PhysAddr shift = 1 << 20;
  for (auto& b : back.dram_bases) b += shift;
  run_dce(sim, cfg, back);
  std::vector<std::uint8_t> got(64);
  for (std::size_t i = 0; i < to_pim.dram_bases.size(); ++i) {
    for (std::uint64_t off = 0; off < to_pim.xfer_per_bank; off += 64) {
      sim.image()->read(back.dram_bases[i] + off, got);
      for (std::size_t b = 0; b < 64; ++b) {
        ASSERT_EQ(got[b], sim.image()->pattern_byte(to_pim.dram_bases[i] + off + b));
      }
    }
  }
}

TEST(Dce, EventLogHasOneOrderedRecordPerStage) {
  const SimConfig cfg = testing::small_config({"scenario.transfer.cores=3"});
  Simulation sim(cfg.memory, cfg.seed, true);
  const auto d = make_descriptor(cfg, sim.memory().map());
  std::ostringstream log;
  run_dce(sim, cfg, d, &log);
  const std::regex line_re(R"(^(\d+) (read_issue|read_done|transpose|write_issue) (\d+) (\d+)$)");
  const std::vector<std::string> stages{"read_issue", "read_done", "transpose", "write_issue"};
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::pair<std::string, std::uint64_t>>>
      by_line;
  std::istringstream in(log.str());
  std::string line;
  std::uint64_t last = 0;
  while (std::getline(in, line)) {
    std::smatch m;
    ASSERT_TRUE(std::regex_match(line, m, line_re)) << line;
    const std::uint64_t cycle = std::stoull(m[1]);
    EXPECT_GE(cycle, last);
    last = cycle;
    by_line[{std::stoull(m[3]), std::stoull(m[4])}].emplace_back(m[2], cycle);
  }
  ASSERT_EQ(by_line.size(), d.total_bytes() / 64);
  for (const auto& [key, events] : by_line) {
    ASSERT_EQ(events.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(events[i].first, stages[i]);
  }
}

TEST(Dce, FinishesNoLaterThanTheHostPath) {
  for (const char* dir : {"dram_to_pim", "pim_to_dram"}) {
    SimConfig dce = testing::small_config({std::string("scenario.transfer.direction=") + dir});
    SimConfig host = testing::small_config(
        {std::string("scenario.transfer.direction=") + dir, "scenario.transfer.engine=host"});
    const SimReport a = run_scenario(dce);
    const SimReport b = run_scenario(host);
    EXPECT_LE(a.elapsed_ns, b.elapsed_ns) << dir;
    EXPECT_EQ(a.data_check, "pass");
    EXPECT_EQ(b.data_check, "pass");
  }
}

}  // namespace
}  // namespace pimmmu
