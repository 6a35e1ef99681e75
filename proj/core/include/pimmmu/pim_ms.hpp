#pragma once

// Emission order for the DCE: PIM-MS (per-channel bank -> rank -> bankgroup
// nesting, repeated until every entry is exhausted) or the naive order (one
// stream, descriptor order, each core drained before the next).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pimmmu/transfer.hpp"

namespace pimmmu {

enum class SchedulerKind { PimMs, Naive };

const char* to_string(SchedulerKind k);

struct ScheduledAccess {
  std::uint32_t entry = 0;  // index into the address buffer
  std::uint32_t core = 0;   // global PIM core id
  AguResult addr;
};

class AccessStreams {
 public:
  // `entries` must outlive the streams; offsets are advanced in place.
  AccessStreams(SchedulerKind kind, std::span<AddressBufferEntry> entries,
                const AguContext& ctx);

  // One per PIM channel for PimMs, one in total for Naive.
  std::size_t stream_count() const { return streams_.size(); }

  // Next access of `stream` without consuming it.
  std::optional<ScheduledAccess> peek(std::size_t stream);
  ScheduledAccess pop(std::size_t stream);

  bool exhausted() const { return remaining_ == 0; }
  std::uint64_t remaining() const { return remaining_; }

 private:
  struct Stream {
    std::vector<std::uint32_t> order;  // entry indices in visiting order
    std::size_t cursor = 0;
    std::uint64_t remaining = 0;       // lines left in this stream
  };

  bool live(std::uint32_t entry) const { return entries_[entry].offset < ctx_.xfer_per_bank; }
  void settle(Stream& s);

  SchedulerKind kind_;
  std::span<AddressBufferEntry> entries_;
  AguContext ctx_;
  std::vector<Stream> streams_;
  std::uint64_t remaining_ = 0;
};

// The whole per-channel emission sequence for a descriptor processed as one
// address-buffer load. Index i holds PIM channel i (index 0 only for Naive).
std::vector<std::vector<ScheduledAccess>> schedule_order(SchedulerKind kind,
                                                         const TransferDescriptor& d,
                                                         const HetMap& map);

inline std::vector<std::vector<ScheduledAccess>> pim_ms_order(const TransferDescriptor& d,
                                                              const HetMap& map) {
  return schedule_order(SchedulerKind::PimMs, d, map);
}

}  // namespace pimmmu
