#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace pimmmu {

// Strict round-robin over a FIFO run queue with `cores` execution slots.
// A preempted thread rejoins the tail; a finished thread leaves the system.
class OsScheduler {
 public:
  OsScheduler(std::uint32_t cores, std::uint64_t quantum_cycles);

  void add_thread(std::uint32_t id);

  // Fills every empty slot from the head of the run queue.
  void dispatch(std::uint64_t now);

  std::optional<std::uint32_t> running(std::uint32_t slot) const { return slots_[slot].thread; }
  bool quantum_expired(std::uint32_t slot, std::uint64_t now) const {
    return slots_[slot].thread && now >= slots_[slot].quantum_end;
  }
  void release(std::uint32_t slot, bool finished, std::uint64_t now);

  std::uint32_t cores() const { return static_cast<std::uint32_t>(slots_.size()); }
  std::uint64_t quantum() const { return quantum_; }
  bool idle() const;

  std::uint64_t dispatches() const { return dispatches_; }
  std::uint64_t preemptions() const { return preemptions_; }
  // Cycles each thread has spent in a slot, indexed by thread id.
  const std::vector<std::uint64_t>& active_cycles() const { return active_; }
  // Sum over slots of occupied cycles.
  std::uint64_t busy_cycles() const { return busy_; }

 private:
  struct Slot {
    std::optional<std::uint32_t> thread;
    std::uint64_t since = 0;
    std::uint64_t quantum_end = 0;
  };

  std::vector<Slot> slots_;
  std::deque<std::uint32_t> run_queue_;
  std::uint64_t quantum_;
  std::uint64_t dispatches_ = 0, preemptions_ = 0, busy_ = 0;
  std::vector<std::uint64_t> active_;
};

}  // namespace pimmmu
