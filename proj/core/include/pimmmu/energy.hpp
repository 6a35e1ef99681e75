#pragma once

#include <string>
#include <vector>

#include "pimmmu/report.hpp"

namespace pimmmu {

struct EnergyModel {
  double act_pre_nj = 2.0;       // one ACT and its PRE
  double burst_nj = 1.5;         // one RD or WR burst
  double io_nj_per_64b = 0.5;
  double cpu_w_per_core = 5.0;   // while a core runs a transfer thread
  double dce_w = 0.5;            // while the DCE is busy
  double dram_background_w_per_device = 0.15;
  std::uint32_t devices_per_rank = 8;
  double dce_submit_uj = 50.0;   // CPU cost of handing a descriptor to the DCE

  std::vector<std::string> validate() const;
};

// Uses command counts, byte counts and the active-time fields of `r`.
EnergyBreakdown compute_energy(const SimReport& r, const EnergyModel& m);

}  // namespace pimmmu
