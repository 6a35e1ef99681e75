#pragma once

// Software transfer path: CPU threads issuing 64-byte non-cacheable reads and
// dependent writes, time-sliced by a round-robin OS scheduler.

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimmmu/frontend.hpp"
#include "pimmmu/memory_image.hpp"
#include "pimmmu/memory_system.hpp"
#include "pimmmu/os_scheduler.hpp"
#include "pimmmu/transfer.hpp"

namespace pimmmu {

struct HostParams {
  std::uint32_t cores = 8;
  double clock_ghz = 3.2;
  double quantum_ms = 1.5;
  std::uint32_t mshrs = 64;             // in-flight accesses per thread
  std::uint32_t issue_gap_cycles = 4;   // per 64-byte access
  std::uint32_t transpose_cycles = 8;   // extra per 64-byte write of a PIM transfer

  std::vector<std::string> validate() const;
  std::uint64_t quantum_cycles() const;
};

struct HostStats {
  std::uint64_t reads_issued = 0, reads_done = 0;
  std::uint64_t writes_issued = 0, writes_done = 0;
  std::uint64_t bytes_read = 0, bytes_written = 0;
  std::uint64_t threads = 0;
  std::uint64_t dispatches = 0, preemptions = 0;
  std::uint64_t busy_cycles = 0;         // summed over cores
  std::uint64_t max_active_dst_banks = 0;  // PIM banks with writes in flight
  std::uint64_t cycles = 0;
  std::vector<std::uint64_t> thread_active_cycles;
};

class HostModel : public Frontend {
 public:
  HostModel(MemorySystem& mem, MemoryImage* image, const HostParams& params);

  // One thread per participating core, in descriptor order.
  void start_transfer(const TransferDescriptor& d);

  // `threads` contiguous chunks of [src, src+bytes) copied to [dst, dst+bytes).
  // Throws ValidationError if the regions overlap or leave DRAM space.
  void start_memcpy(std::uint64_t bytes, std::uint32_t threads, PhysAddr src, PhysAddr dst);

  void tick(std::uint64_t cycle) override;
  void on_completion(const Completion& c) override;
  bool done() const override {
    return finished_threads_ == threads_.size() && sched_.idle();
  }

  const HostStats& stats();
  const OsScheduler& scheduler() const { return sched_; }

 private:
  struct Thread {
    PhysAddr src = 0, dst = 0;
    std::uint64_t lines = 0;
    std::uint64_t reads_issued = 0, writes_issued = 0, writes_done = 0;
    std::uint32_t in_flight = 0;
    std::deque<std::uint64_t> ready;  // lines whose read completed
    std::int64_t dst_bank = -1;       // global PIM bank, or -1
    bool transpose = false;
    bool finished = false;
    std::uint64_t next_issue = 0;
    // Set on a rejected enqueue; retrying is pointless until that queue drains.
    const Controller* blocked_on = nullptr;
    ReqKind blocked_kind = ReqKind::Read;
    std::uint64_t blocked_mark = 0;
  };

  void reset(std::size_t threads);
  void write_data(const Thread& t, std::uint64_t line);
  void bank_inflight(std::int64_t bank, int delta);
  bool try_issue(Thread& t, ReqKind kind, PhysAddr addr, std::uint64_t tag);

  MemorySystem& mem_;
  MemoryImage* image_;
  HostParams params_;
  OsScheduler sched_;
  std::uint32_t line_bytes_ = 64;
  std::vector<Thread> threads_;
  std::size_t finished_threads_ = 0;
  std::vector<bool> preempting_;
  std::unordered_map<std::int64_t, std::uint32_t> bank_writes_;
  std::uint64_t cycle_ = 0;
  HostStats stats_;
};

}  // namespace pimmmu
