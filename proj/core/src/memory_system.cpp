#include "pimmmu/memory_system.hpp"

#include <ostream>

#include "pimmmu/error.hpp"

namespace pimmmu {

MappingFunction SubsystemConfig::mapping_function() const {
  return mapping == MappingKind::MlpCentric ? MappingFunction::mlp_centric(geometry, xor_masks, bank_hash)
                                            : MappingFunction::locality_centric(geometry);
}

MemorySystem::MemorySystem(const MemorySystemConfig& cfg)
    : cfg_(cfg),
      map_(cfg.dram.mapping_function(), cfg.pim.mapping_function()),
      dram_checker_(cfg.dram.timing),
      pim_checker_(cfg.pim.timing) {
  dram_.reserve(cfg.dram.geometry.channels);
  for (std::uint32_t c = 0; c < cfg.dram.geometry.channels; ++c) {
    dram_.emplace_back(c, cfg.dram.geometry, cfg.dram.timing, cfg.controller);
  }
  pim_.reserve(cfg.pim.geometry.channels);
  for (std::uint32_t c = 0; c < cfg.pim.geometry.channels; ++c) {
    pim_.emplace_back(c, cfg.pim.geometry, cfg.pim.timing, cfg.controller);
  }
}

void MemorySystem::set_completion_handler(Controller::CompletionHandler h) {
  for (auto& c : dram_) c.set_completion_handler(h);
  for (auto& c : pim_) c.set_completion_handler(h);
}

bool MemorySystem::try_enqueue(ReqKind kind, PhysAddr addr, std::uint64_t tag) {
  const RoutedAddress r = map_.route(addr);
  Controller& ctrl = ctrls(r.region)[r.coord.channel];
  MemRequest req;
  req.kind = kind;
  req.coord = r.coord;
  req.addr = addr;
  req.bytes = (r.region == Region::Dram ? cfg_.dram : cfg_.pim).geometry.line_bytes;
  req.tag = tag;
  return ctrl.enqueue(req, cycle_) == EnqueueResult::Accepted;
}

bool MemorySystem::can_accept(ReqKind kind, PhysAddr addr) const {
  const RoutedAddress r = map_.route(addr);
  return controllers(r.region)[r.coord.channel].can_accept(kind);
}

const Controller& MemorySystem::controller_for(PhysAddr addr) const {
  const RoutedAddress r = map_.route(addr);
  return controllers(r.region)[r.coord.channel];
}

void MemorySystem::tick() {
  ++cycle_;
  auto run = [&](Region region, std::vector<Controller>& ctrls, TraceChecker& checker,
                 std::ostream* trace) {
    for (auto& ctrl : ctrls) {
      auto cmd = ctrl.tick(cycle_);
      if (!cmd) continue;
      if (trace) *trace << format_command(*cmd) << '\n';
      if (observer_) observer_(region, *cmd);
      if (cfg_.check_protocol) {
        if (auto v = checker.feed(*cmd)) {
          throw SimulationAbort(std::string("protocol violation in ") + to_string(region) +
                                " subsystem: " + v->describe());
        }
      }
    }
  };
  run(Region::Dram, dram_, dram_checker_, trace_dram_);
  run(Region::Pim, pim_, pim_checker_, trace_pim_);
}

bool MemorySystem::idle() const {
  for (const auto& c : dram_) {
    if (!c.idle()) return false;
  }
  for (const auto& c : pim_) {
    if (!c.idle()) return false;
  }
  return true;
}

std::uint64_t MemorySystem::commands_checked() const {
  return dram_checker_.commands_checked() + pim_checker_.commands_checked();
}

}  // namespace pimmmu
