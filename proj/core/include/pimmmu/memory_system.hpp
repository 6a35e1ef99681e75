#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pimmmu/addrmap.hpp"
#include "pimmmu/controller.hpp"
#include "pimmmu/trace_checker.hpp"

namespace pimmmu {

struct SubsystemConfig {
  Geometry geometry;
  TimingParams timing;
  MappingKind mapping = MappingKind::LocalityCentric;
  std::vector<std::uint64_t> xor_masks;  // MLP-centric only; empty = defaults
  bool bank_hash = true;                 // MLP-centric only

  MappingFunction mapping_function() const;
};

struct MemorySystemConfig {
  SubsystemConfig dram;
  SubsystemConfig pim;
  ControllerParams controller;
  bool check_protocol = true;
};

// The DRAM and PIM channel controllers behind a HetMap, all clocked by the
// shared DRAM clock. Every emitted command is fed to a per-region protocol
// checker; a violation raises SimulationAbort.
class MemorySystem {
 public:
  using CommandObserver = std::function<void(Region, const Command&)>;

  explicit MemorySystem(const MemorySystemConfig& cfg);
  MemorySystem(const MemorySystem&) = delete;
  MemorySystem& operator=(const MemorySystem&) = delete;

  const HetMap& map() const { return map_; }
  const MemorySystemConfig& config() const { return cfg_; }

  // Routes `addr` and enqueues one line. Returns false on queue-full.
  bool try_enqueue(ReqKind kind, PhysAddr addr, std::uint64_t tag);
  bool can_accept(ReqKind kind, PhysAddr addr) const;
  const Controller& controller_for(PhysAddr addr) const;

  // Advances every controller by one DRAM clock.
  void tick();

  std::uint64_t cycle() const { return cycle_; }
  bool idle() const;

  void set_completion_handler(Controller::CompletionHandler h);
  void set_command_observer(CommandObserver obs) { observer_ = std::move(obs); }
  void set_trace_streams(std::ostream* dram, std::ostream* pim) {
    trace_dram_ = dram;
    trace_pim_ = pim;
  }

  const std::vector<Controller>& controllers(Region r) const {
    return r == Region::Dram ? dram_ : pim_;
  }
  std::uint64_t commands_checked() const;

 private:
  std::vector<Controller>& ctrls(Region r) { return r == Region::Dram ? dram_ : pim_; }

  MemorySystemConfig cfg_;
  HetMap map_;
  std::vector<Controller> dram_;
  std::vector<Controller> pim_;
  TraceChecker dram_checker_;
  TraceChecker pim_checker_;
  CommandObserver observer_;
  std::ostream* trace_dram_ = nullptr;
  std::ostream* trace_pim_ = nullptr;
  std::uint64_t cycle_ = 0;
};

}  // namespace pimmmu
