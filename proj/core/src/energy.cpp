#include "pimmmu/energy.hpp"

namespace pimmmu {

std::vector<std::string> EnergyModel::validate() const {
  std::vector<std::string> errors;
  auto nonneg = [&](const char* name, double v) {
    if (!(v >= 0.0)) errors.push_back(std::string(name) + ": must be >= 0");
  };
  nonneg("act_pre_nj", act_pre_nj);
  nonneg("burst_nj", burst_nj);
  nonneg("io_nj_per_64b", io_nj_per_64b);
  nonneg("cpu_w_per_core", cpu_w_per_core);
  nonneg("dce_w", dce_w);
  nonneg("dram_background_w_per_device", dram_background_w_per_device);
  nonneg("dce_submit_uj", dce_submit_uj);
  return errors;
}

EnergyBreakdown compute_energy(const SimReport& r, const EnergyModel& m) {
  EnergyBreakdown e;
  const double acts = static_cast<double>(r.dram.act + r.pim.act);
  const double bursts = static_cast<double>(r.dram.rd + r.dram.wr + r.pim.rd + r.pim.wr);
  const double bytes = static_cast<double>(r.dram.bytes_read + r.dram.bytes_written +
                                           r.pim.bytes_read + r.pim.bytes_written);
  e.act_pre_j = acts * m.act_pre_nj * 1e-9;
  e.burst_j = bursts * m.burst_nj * 1e-9;
  e.io_j = bytes / 64.0 * m.io_nj_per_64b * 1e-9;
  e.cpu_j = r.cpu_active_ns * 1e-9 * m.cpu_w_per_core;
  if (r.dce_used) {
    e.cpu_j += m.dce_submit_uj * 1e-6;
    e.dce_j = r.dce_active_ns * 1e-9 * m.dce_w;
  }
  const double devices = static_cast<double>(r.dram.ranks + r.pim.ranks) * m.devices_per_rank;
  e.background_j = devices * m.dram_background_w_per_device * r.elapsed_ns * 1e-9;
  return e;
}

}  // namespace pimmmu
