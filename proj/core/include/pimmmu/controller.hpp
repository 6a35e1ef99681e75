#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "pimmmu/addrmap.hpp"
#include "pimmmu/timing.hpp"

namespace pimmmu {

enum class ReqKind : std::uint8_t { Read, Write };

struct MemRequest {
  ReqKind kind = ReqKind::Read;
  DramCoord coord;
  PhysAddr addr = 0;
  std::uint32_t bytes = 0;
  std::uint64_t tag = 0;
  std::uint64_t enqueue_cycle = 0;
};

enum class EnqueueResult { Accepted, QueueFull };

struct ControllerParams {
  std::uint32_t read_queue = 64;
  std::uint32_t write_queue = 64;
  std::uint32_t write_high = 48;  // start draining writes at this occupancy
  std::uint32_t write_low = 16;   // stop draining once at or below, if reads wait
  std::uint64_t timeline_bin_cycles = 12000;

  std::vector<std::string> validate() const;
};

struct Completion {
  std::uint64_t tag = 0;
  ReqKind kind = ReqKind::Read;
  std::uint64_t cycle = 0;
};

struct ControllerStats {
  std::uint64_t act = 0, pre = 0, rd = 0, wr = 0, ref = 0;
  std::uint64_t bytes_read = 0, bytes_written = 0;
  std::uint64_t read_queue_full = 0, write_queue_full = 0;
  // Bytes moved per timeline bin, indexed by issue cycle / bin width.
  std::vector<std::uint64_t> timeline;
};

// One DDR4 channel: open-page, FR-FCFS over separate read and write queues
// with high/low watermark write draining.
class Controller {
 public:
  using CompletionHandler = std::function<void(const Completion&)>;

  Controller(std::uint32_t channel, const Geometry& geometry, const TimingParams& timing,
             const ControllerParams& params);

  // Throws std::logic_error if the request targets another channel or is not
  // exactly one line.
  EnqueueResult enqueue(const MemRequest& req, std::uint64_t now);

  // Advances to `cycle`: retires due completions, then issues at most one
  // command. Cycles must be strictly increasing across calls.
  std::optional<Command> tick(std::uint64_t cycle);

  void set_completion_handler(CompletionHandler h) { on_complete_ = std::move(h); }

  bool can_accept(ReqKind k) const {
    return k == ReqKind::Read ? reads_.size() < params_.read_queue
                              : writes_.size() < params_.write_queue;
  }
  // Requests of kind `k` that have left the queue so far.
  std::uint64_t departures(ReqKind k) const {
    return k == ReqKind::Read ? stats_.rd : stats_.wr;
  }
  std::size_t read_occupancy() const { return reads_.size(); }
  std::size_t write_occupancy() const { return writes_.size(); }
  bool idle() const {
    return reads_.empty() && writes_.empty() && pending_reads_.empty() &&
           pending_writes_.empty();
  }
  bool draining_writes() const { return write_mode_; }

  std::uint32_t channel() const { return channel_; }
  const ControllerStats& stats() const { return stats_; }

 private:
  struct Bank {
    std::int64_t open_row = -1;
    std::uint64_t next_act = 0, next_pre = 0, next_rd = 0, next_wr = 0;
    std::uint64_t hit_stamp = 0;
  };
  struct Group {
    std::uint64_t next_act = 0, next_rd = 0, next_wr = 0;
  };
  struct Rank {
    std::uint64_t next_act = 0, next_rd = 0, next_wr = 0;
    std::array<std::uint64_t, 4> faw{};
    unsigned faw_count = 0, faw_slot = 0;
    std::uint64_t refresh_due = 0;
    bool refresh_pending = false;
  };
  struct Entry {
    MemRequest req;
    std::uint32_t bank = 0;
    std::uint32_t group = 0;
  };
  struct Pending {
    std::uint64_t due;
    std::uint64_t tag;
  };

  std::uint64_t act_ready(const Entry& e) const;
  std::uint64_t column_ready(const Entry& e) const;
  std::optional<Command> issue_refresh(std::uint64_t now);
  Command apply(CommandKind kind, const DramCoord& coord, std::uint32_t bank_idx,
                std::uint64_t now);
  void retire(std::uint64_t now);
  void update_mode();

  std::uint32_t channel_;
  Geometry geometry_;
  TimingParams t_;
  ControllerParams params_;
  CompletionHandler on_complete_;

  std::vector<Bank> banks_;
  std::vector<Group> groups_;
  std::vector<Rank> ranks_;
  std::uint64_t chan_next_rd_ = 0, chan_next_wr_ = 0;

  std::vector<Entry> reads_, writes_;
  std::deque<Pending> pending_reads_, pending_writes_;
  bool write_mode_ = false;
  std::uint64_t wake_at_ = 0;
  std::uint64_t scan_epoch_ = 0;
  std::optional<std::uint64_t> last_cycle_;

  ControllerStats stats_;
};

}  // namespace pimmmu
