#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pimmmu/dce.hpp"
#include "pimmmu/energy.hpp"
#include "pimmmu/hostmodel.hpp"
#include "pimmmu/memory_system.hpp"
#include "pimmmu/transfer.hpp"

namespace pimmmu {

inline constexpr int kConfigSchemaVersion = 1;

enum class ScenarioKind { CpuDpu, Memcpy, Ablation, Sweep };
enum class TransferEngine { Host, Dce };

const char* to_string(ScenarioKind k);
const char* to_string(TransferEngine e);

struct TransferScenario {
  TransferEngine engine = TransferEngine::Dce;
  Direction direction = Direction::DramToPim;
  std::uint32_t cores = 0;  // first N global core ids; 0 = every bank
  std::uint64_t xfer_per_bank = 64 * 1024;
  std::uint64_t heap_base = 0;
  PhysAddr dram_base = 0;   // core i uses [dram_base + i * xfer_per_bank, ...)
};

struct MemcpyScenario {
  std::uint64_t bytes = 0;
  std::uint32_t threads = 8;
};

struct AblationScenario {
  std::vector<std::uint64_t> sizes_mib;
  std::vector<Direction> directions;
};

enum class SweepAxis { Channels, Ranks };

struct SweepScenario {
  SweepAxis axis = SweepAxis::Channels;
  std::vector<std::uint32_t> values;
  ScenarioKind workload = ScenarioKind::Memcpy;
};

struct SimConfig {
  std::uint64_t seed = 1;
  bool verify_data = true;
  MemorySystemConfig memory;
  HostParams host;
  DceParams dce;
  EnergyModel energy;
  ScenarioKind kind = ScenarioKind::CpuDpu;
  TransferScenario transfer;
  MemcpyScenario memcpy;
  AblationScenario ablation;
  SweepScenario sweep;

  nlohmann::json document;  // the resolved JSON this was parsed from
};

// The built-in defaults; every accepted key appears here.
const nlohmann::json& default_config();

// Defaults merged with `user`, then `overrides` ("dotted.path=value") applied.
// Throws ValidationError listing unknown keys and malformed overrides.
nlohmann::json resolve_config(const nlohmann::json& user,
                              const std::vector<std::string>& overrides = {});

// Sets one dotted path; the value is parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Type and range checks over a resolved document. Throws ValidationError with
// every failing field.
SimConfig parse_config(const nlohmann::json& resolved);

// Reads a file, resolves and parses it.
SimConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

// Convenience for code and tests: defaults plus overrides.
SimConfig make_config(const std::vector<std::string>& overrides = {});

}  // namespace pimmmu
