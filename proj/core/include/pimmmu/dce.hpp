#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pimmmu/frontend.hpp"
#include "pimmmu/memory_image.hpp"
#include "pimmmu/memory_system.hpp"
#include "pimmmu/pim_ms.hpp"
#include "pimmmu/transfer.hpp"

namespace pimmmu {

struct DceParams {
  double clock_ghz = 3.2;
  std::uint32_t data_buffer_bytes = 16 * 1024;
  std::uint32_t address_buffer_bytes = 64 * 1024;
  SchedulerKind scheduler = SchedulerKind::PimMs;

  static constexpr std::uint32_t kEntryBytes = sizeof(AddressBufferEntry);

  std::vector<std::string> validate() const;
  std::uint32_t address_entries() const { return address_buffer_bytes / kEntryBytes; }
};

struct DceStats {
  std::uint64_t reads_issued = 0, reads_done = 0;
  std::uint64_t writes_issued = 0, writes_done = 0;
  std::uint64_t bytes_read = 0, bytes_written = 0;
  std::uint64_t max_buffer_lines = 0;
  std::uint64_t max_address_entries = 0;
  std::uint64_t waves = 0;
  std::uint64_t cycles = 0;
  std::uint64_t stall_buffer_full = 0;  // cycles a read waited for a data slot
};

// Per cycle, in order: at most one write leaves the data buffer, one filled
// slot is transposed, and one read is issued in scheduler order. A read needs
// a free data slot; a slot is released when its write is accepted.
class DataCopyEngine : public Frontend {
 public:
  DataCopyEngine(MemorySystem& mem, MemoryImage* image, const DceParams& params);

  // Throws ValidationError on an invalid descriptor.
  void start(const TransferDescriptor& d);

  void tick(std::uint64_t cycle) override;
  void on_completion(const Completion& c) override;
  bool done() const override { return stats_.writes_done == total_lines_; }

  const DceStats& stats() const { return stats_; }
  std::size_t buffer_occupancy() const { return slots_.size() - free_.size(); }

  // Lines of `cycle event core offset`.
  void set_event_log(std::ostream* os) { log_ = os; }

 private:
  struct Slot {
    PhysAddr src = 0, dst = 0;
    std::uint32_t core = 0, offset = 0;
    std::vector<std::uint8_t> data;
  };

  void load_wave();
  void log(std::uint64_t cycle, const char* event, const Slot& s) const;

  MemorySystem& mem_;
  MemoryImage* image_;
  DceParams params_;
  TransferDescriptor desc_;
  AguContext ctx_;
  std::uint32_t line_bytes_ = 64;
  std::uint64_t total_lines_ = 0;
  std::size_t next_entry_ = 0;

  std::vector<AddressBufferEntry> entries_;
  std::unique_ptr<AccessStreams> streams_;
  std::size_t read_rr_ = 0;

  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_;
  std::deque<std::uint32_t> filled_;                  // awaiting transpose
  std::vector<std::deque<std::uint32_t>> writable_;   // per destination channel
  std::size_t write_rr_ = 0;

  std::uint64_t cycle_ = 0;
  std::ostream* log_ = nullptr;
  DceStats stats_;
};

}  // namespace pimmmu
