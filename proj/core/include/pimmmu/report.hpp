#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pimmmu {

inline constexpr int kReportSchemaVersion = 1;

struct ChannelReport {
  std::uint64_t act = 0, pre = 0, rd = 0, wr = 0, ref = 0;
  std::uint64_t bytes_read = 0, bytes_written = 0;
  double bandwidth_gbps = 0.0;
  double utilization = 0.0;                 // of the channel peak over the run
  std::vector<double> timeline_utilization;  // per bin, each <= 1
};

struct RegionReport {
  std::vector<ChannelReport> channels;
  std::uint64_t act = 0, pre = 0, rd = 0, wr = 0, ref = 0;
  std::uint64_t bytes_read = 0, bytes_written = 0;
  std::uint32_t ranks = 0;  // summed over channels
  double peak_gbps = 0.0;   // all channels
  double read_gbps = 0.0, write_gbps = 0.0;
  double write_utilization = 0.0;  // write bandwidth / peak
  double utilization = 0.0;        // (read + write) bandwidth / peak
};

struct EnergyBreakdown {
  double act_pre_j = 0.0;
  double burst_j = 0.0;
  double io_j = 0.0;
  double cpu_j = 0.0;
  double dce_j = 0.0;
  double background_j = 0.0;

  double dynamic_j() const { return act_pre_j + burst_j + io_j; }
  double total_j() const { return dynamic_j() + cpu_j + dce_j + background_j; }
};

struct SimReport {
  std::string scenario;  // cpu_dpu | memcpy
  std::string label;     // ablation variant or sweep point; empty otherwise
  std::string engine;    // host | dce
  std::string scheduler;  // naive | pim_ms | none
  std::string direction;  // dram_to_pim | pim_to_dram | dram_to_dram
  std::string dram_mapping;
  std::uint64_t seed = 0;

  std::uint64_t transfer_bytes = 0;
  std::uint64_t bytes_read = 0, bytes_written = 0;  // as seen by the frontend
  std::uint64_t dram_cycles = 0;
  std::uint64_t frontend_cycles = 0;
  double elapsed_ns = 0.0;
  double throughput_gbps = 0.0;  // transfer_bytes / elapsed

  RegionReport dram, pim;

  bool checker_enabled = true;
  bool checker_clean = true;
  std::uint64_t commands_checked = 0;
  std::string data_check = "skipped";  // pass | fail | skipped

  // Host model.
  double cpu_active_ns = 0.0;  // summed over cores
  std::uint64_t threads = 0, dispatches = 0, preemptions = 0, dispatch_waves = 0;
  std::uint64_t max_active_dst_banks = 0;
  double thread_active_spread_ns = 0.0;  // max - min per-thread active time

  // DCE.
  bool dce_used = false;
  double dce_active_ns = 0.0;
  std::uint64_t dce_waves = 0, dce_max_buffer_lines = 0, dce_max_address_entries = 0;

  EnergyBreakdown energy;
  nlohmann::json config;  // resolved configuration echo
};

nlohmann::json to_json(const SimReport& r);

// {"schema_version", "kind", "reports": [...]} plus optional extras.
nlohmann::json report_document(const std::string& kind, const std::vector<SimReport>& reports);

// Numeric leaves of a report document keyed by dotted path. Timelines and the
// configuration echo are skipped.
std::map<std::string, double> flatten_metrics(const nlohmann::json& doc);

// One header row and one row per report; columns are the union of scalar metrics.
std::string to_csv(const std::vector<SimReport>& reports);

struct DiffRow {
  std::string metric;
  double a = 0.0, b = 0.0;
  double rel_delta = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct DiffResult {
  std::vector<DiffRow> rows;
  bool ok = true;
};

// Relative deltas |b - a| / max(|a|, tiny). A metric missing on one side fails.
// Throws std::runtime_error when schema versions differ or are missing.
DiffResult diff_report(const nlohmann::json& a, const nlohmann::json& b, double default_tolerance,
                       const std::map<std::string, double>& tolerances = {});

}  // namespace pimmmu
