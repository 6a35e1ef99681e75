#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pimmmu/addrmap.hpp"

namespace pimmmu {

// DDR4 timing in DRAM clocks. Defaults are a DDR4-2400R speed bin.
struct TimingParams {
  double tCK_ns = 0.833;
  std::uint32_t CL = 17;
  std::uint32_t CWL = 12;
  std::uint32_t tRCD = 17;
  std::uint32_t tRP = 17;
  std::uint32_t tRAS = 39;
  std::uint32_t tRC = 56;
  std::uint32_t tCCD_S = 4;
  std::uint32_t tCCD_L = 6;
  std::uint32_t tRRD_S = 4;
  std::uint32_t tRRD_L = 6;
  std::uint32_t tFAW = 26;
  std::uint32_t tWR = 18;
  std::uint32_t tWTR_S = 3;
  std::uint32_t tWTR_L = 9;
  std::uint32_t tRTP = 9;
  std::uint32_t burst_length = 8;

  // Refresh is off unless requested.
  bool refresh = false;
  std::uint32_t tREFI = 9363;
  std::uint32_t tRFC = 420;

  std::vector<std::string> validate() const;

  std::uint32_t burst_cycles() const { return burst_length / 2; }
  // Column-to-column on the shared data bus, read followed by write.
  std::uint32_t read_to_write() const { return CL + burst_cycles() + 2 - CWL; }
  std::uint32_t write_to_read(bool same_bankgroup) const {
    return CWL + burst_cycles() + (same_bankgroup ? tWTR_L : tWTR_S);
  }
  std::uint32_t write_to_precharge() const { return CWL + burst_cycles() + tWR; }
  std::uint32_t read_latency() const { return CL + burst_cycles(); }
  std::uint32_t write_latency() const { return CWL + burst_cycles(); }

  // Peak data rate of one 64-bit channel in bytes per nanosecond (GB/s).
  double channel_peak_gbps(std::uint32_t bus_bytes = 8) const {
    return 2.0 * bus_bytes / tCK_ns;
  }
};

enum class CommandKind : std::uint8_t { ACT, PRE, RD, WR, REF };

const char* to_string(CommandKind k);

struct Command {
  CommandKind kind = CommandKind::ACT;
  DramCoord coord;
  std::uint64_t cycle = 0;

  bool operator==(const Command&) const = default;
};

// `cycle kind ch ra bg bk row col`
std::string format_command(const Command& c);

}  // namespace pimmmu
