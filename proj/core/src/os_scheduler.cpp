#include "pimmmu/os_scheduler.hpp"

#include <stdexcept>

namespace pimmmu {

OsScheduler::OsScheduler(std::uint32_t cores, std::uint64_t quantum_cycles)
    : slots_(cores), quantum_(quantum_cycles) {
  if (cores == 0) throw std::invalid_argument("scheduler needs at least one core");
  if (quantum_cycles == 0) throw std::invalid_argument("quantum must be positive");
}

void OsScheduler::add_thread(std::uint32_t id) {
  if (id >= active_.size()) active_.resize(id + 1, 0);
  run_queue_.push_back(id);
}

void OsScheduler::dispatch(std::uint64_t now) {
  for (auto& s : slots_) {
    if (run_queue_.empty()) return;
    if (s.thread) continue;
    s.thread = run_queue_.front();
    run_queue_.pop_front();
    s.since = now;
    s.quantum_end = now + quantum_;
    ++dispatches_;
  }
}

void OsScheduler::release(std::uint32_t slot, bool finished, std::uint64_t now) {
  Slot& s = slots_.at(slot);
  if (!s.thread) throw std::logic_error("release of an empty slot");
  const std::uint64_t ran = now - s.since;
  active_[*s.thread] += ran;
  busy_ += ran;
  if (!finished) {
    run_queue_.push_back(*s.thread);
    ++preemptions_;
  }
  s.thread.reset();
}

bool OsScheduler::idle() const {
  if (!run_queue_.empty()) return false;
  for (const auto& s : slots_) {
    if (s.thread) return false;
  }
  return true;
}

}  // namespace pimmmu
