#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pimmmu/config.hpp"
#include "pimmmu/frontend.hpp"
#include "pimmmu/memory_image.hpp"
#include "pimmmu/memory_system.hpp"
#include "pimmmu/report.hpp"

namespace pimmmu {

struct RunOptions {
  std::ostream* trace_dram = nullptr;  // `cycle kind ch ra bg bk row col`
  std::ostream* trace_pim = nullptr;
  std::ostream* dce_log = nullptr;     // `cycle event core offset`
  // Abort when no request completes for this many DRAM cycles.
  std::uint64_t stall_limit = 4'000'000;
};

// One memory system plus its data image on a femtosecond timeline. The
// memory clock and the frontend clock advance edge by edge; on a tie the
// memory edge goes first.
class Simulation {
 public:
  struct Span {
    std::uint64_t start_fs = 0, end_fs = 0;
    std::uint64_t dram_cycles = 0, frontend_cycles = 0;
    double elapsed_ns() const { return static_cast<double>(end_fs - start_fs) * 1e-6; }
  };

  Simulation(const MemorySystemConfig& cfg, std::uint64_t seed, bool track_data);

  MemorySystem& memory() { return *mem_; }
  MemoryImage* image() { return image_.get(); }

  // Runs until `fe` is done and the memory system is idle. Throws
  // SimulationAbort on a protocol violation or when progress stalls.
  Span run(Frontend& fe, double frontend_clock_ghz, std::uint64_t stall_limit = 4'000'000);

 private:
  std::unique_ptr<MemorySystem> mem_;
  std::unique_ptr<MemoryImage> image_;
  std::uint64_t dram_period_fs_;
  std::uint64_t now_fs_ = 0;
  std::uint64_t next_dram_fs_;
};

// Core i of the first `cores` global ids reads/writes [dram_base + i * xfer, ...).
TransferDescriptor make_descriptor(const SimConfig& cfg, const HetMap& map);

// True when every destination line holds the transposed source line.
bool verify_transfer(const TransferDescriptor& d, const HetMap& map, const MemoryImage& image);

// Runs a cpu_dpu or memcpy scenario.
SimReport run_scenario(const SimConfig& cfg, const RunOptions& opts = {});

// `base` with dotted-path overrides applied and revalidated.
SimConfig derive_config(const SimConfig& base, const std::vector<std::string>& overrides);

struct AblationVariant {
  const char* name;
  std::vector<std::string> overrides;
};

// Base, Base+D, Base+D+H, Base+D+H+P in that order.
const std::vector<AblationVariant>& ablation_variants();

// Every (direction, size, variant) point, direction-major then size then
// variant. Points run on `jobs` workers; output order does not depend on it.
std::vector<SimReport> ablation(const SimConfig& cfg, unsigned jobs = 1);

std::vector<SimReport> sweep(const SimConfig& cfg, unsigned jobs = 1);

// Throughput and energy of each point relative to Base at the same
// (direction, size).
nlohmann::json ablation_summary(const std::vector<SimReport>& reports);
std::string format_ablation_table(const std::vector<SimReport>& reports);

// Runs whatever `cfg.kind` names and returns the report document.
nlohmann::json run_config(const SimConfig& cfg, unsigned jobs = 1, const RunOptions& opts = {});

}  // namespace pimmmu
