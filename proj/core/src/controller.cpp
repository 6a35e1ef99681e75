#include "pimmmu/controller.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pimmmu {

namespace {
constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
}

std::vector<std::string> ControllerParams::validate() const {
  std::vector<std::string> errors;
  if (read_queue == 0) errors.push_back("read_queue: must be >= 1");
  if (write_queue == 0) errors.push_back("write_queue: must be >= 1");
  if (write_high == 0 || write_high > write_queue) {
    errors.push_back("write_high: must be in [1, write_queue]");
  }
  if (write_low >= write_high) errors.push_back("write_low: must be < write_high");
  if (timeline_bin_cycles == 0) errors.push_back("timeline_bin_cycles: must be >= 1");
  return errors;
}

Controller::Controller(std::uint32_t channel, const Geometry& geometry,
                       const TimingParams& timing, const ControllerParams& params)
    : channel_(channel),
      geometry_(geometry),
      t_(timing),
      params_(params),
      banks_(geometry.banks_per_channel()),
      groups_(std::size_t{geometry.ranks} * geometry.bankgroups),
      ranks_(geometry.ranks) {
  if (channel >= geometry.channels) {
    throw std::invalid_argument("controller channel " + std::to_string(channel) +
                                " outside geometry");
  }
  reads_.reserve(params.read_queue);
  writes_.reserve(params.write_queue);
  for (std::uint32_t r = 0; r < ranks_.size(); ++r) {
    // Stagger ranks so their refreshes do not coincide.
    ranks_[r].refresh_due = t_.tREFI + std::uint64_t{r} * t_.tREFI / geometry.ranks;
  }
}

EnqueueResult Controller::enqueue(const MemRequest& req, std::uint64_t now) {
  if (req.coord.channel != channel_) {
    throw std::logic_error("request for channel " + std::to_string(req.coord.channel) +
                           " sent to controller " + std::to_string(channel_));
  }
  if (req.bytes != geometry_.line_bytes) {
    throw std::logic_error("request size " + std::to_string(req.bytes) +
                           " != line size " + std::to_string(geometry_.line_bytes));
  }
  auto& q = req.kind == ReqKind::Read ? reads_ : writes_;
  const std::uint32_t cap =
      req.kind == ReqKind::Read ? params_.read_queue : params_.write_queue;
  if (q.size() >= cap) {
    ++(req.kind == ReqKind::Read ? stats_.read_queue_full : stats_.write_queue_full);
    return EnqueueResult::QueueFull;
  }
  Entry e;
  e.req = req;
  e.req.enqueue_cycle = now;
  e.group = req.coord.rank * geometry_.bankgroups + req.coord.bankgroup;
  e.bank = e.group * geometry_.banks + req.coord.bank;
  q.push_back(e);
  wake_at_ = 0;
  return EnqueueResult::Accepted;
}

std::uint64_t Controller::act_ready(const Entry& e) const {
  const Rank& r = ranks_[e.req.coord.rank];
  std::uint64_t t = std::max({banks_[e.bank].next_act, groups_[e.group].next_act, r.next_act});
  if (r.faw_count >= 4) t = std::max(t, r.faw[r.faw_slot] + t_.tFAW);
  return t;
}

std::uint64_t Controller::column_ready(const Entry& e) const {
  const Bank& b = banks_[e.bank];
  const Group& g = groups_[e.group];
  const Rank& r = ranks_[e.req.coord.rank];
  if (e.req.kind == ReqKind::Read) {
    return std::max({b.next_rd, g.next_rd, r.next_rd, chan_next_rd_});
  }
  return std::max({b.next_wr, g.next_wr, r.next_wr, chan_next_wr_});
}

Command Controller::apply(CommandKind kind, const DramCoord& coord, std::uint32_t bank_idx,
                          std::uint64_t now) {
  Bank& b = banks_[bank_idx];
  Rank& r = ranks_[coord.rank];
  auto raise = [](std::uint64_t& slot, std::uint64_t v) { slot = std::max(slot, v); };

  switch (kind) {
    case CommandKind::ACT:
      b.open_row = static_cast<std::int64_t>(coord.row);
      raise(b.next_act, now + t_.tRC);
      raise(b.next_rd, now + t_.tRCD);
      raise(b.next_wr, now + t_.tRCD);
      raise(b.next_pre, now + t_.tRAS);
      for (std::uint32_t bg = 0; bg < geometry_.bankgroups; ++bg) {
        raise(groups_[coord.rank * geometry_.bankgroups + bg].next_act,
              now + (bg == coord.bankgroup ? t_.tRRD_L : t_.tRRD_S));
      }
      raise(r.next_act, now + t_.tRRD_S);
      r.faw[r.faw_slot] = now;
      r.faw_slot = (r.faw_slot + 1) % 4;
      r.faw_count = std::min(r.faw_count + 1, 4u);
      ++stats_.act;
      break;
    case CommandKind::PRE:
      b.open_row = -1;
      raise(b.next_act, now + t_.tRP);
      ++stats_.pre;
      break;
    case CommandKind::RD:
      raise(b.next_pre, now + t_.tRTP);
      for (std::uint32_t bg = 0; bg < geometry_.bankgroups; ++bg) {
        raise(groups_[coord.rank * geometry_.bankgroups + bg].next_rd,
              now + (bg == coord.bankgroup ? t_.tCCD_L : t_.tCCD_S));
      }
      raise(r.next_rd, now + t_.tCCD_S);
      raise(chan_next_rd_, now + t_.burst_cycles());
      raise(chan_next_wr_, now + t_.read_to_write());
      ++stats_.rd;
      break;
    case CommandKind::WR:
      raise(b.next_pre, now + t_.write_to_precharge());
      for (std::uint32_t bg = 0; bg < geometry_.bankgroups; ++bg) {
        const bool same = bg == coord.bankgroup;
        Group& gg = groups_[coord.rank * geometry_.bankgroups + bg];
        raise(gg.next_wr, now + (same ? t_.tCCD_L : t_.tCCD_S));
        raise(gg.next_rd, now + t_.write_to_read(same));
      }
      raise(r.next_wr, now + t_.tCCD_S);
      raise(r.next_rd, now + t_.write_to_read(false));
      raise(chan_next_wr_, now + t_.burst_cycles());
      raise(chan_next_rd_, now + t_.burst_cycles());
      ++stats_.wr;
      break;
    case CommandKind::REF: {
      const std::uint32_t first = coord.rank * geometry_.banks_per_rank();
      for (std::uint32_t i = 0; i < geometry_.banks_per_rank(); ++i) {
        raise(banks_[first + i].next_act, now + t_.tRFC);
      }
      ++stats_.ref;
      break;
    }
  }
  return Command{kind, coord, now};
}

std::optional<Command> Controller::issue_refresh(std::uint64_t now) {
  for (std::uint32_t ra = 0; ra < ranks_.size(); ++ra) {
    Rank& r = ranks_[ra];
    if (!r.refresh_pending) continue;
    const std::uint32_t first = ra * geometry_.banks_per_rank();
    std::uint64_t ref_ready = 0;
    bool any_open = false;
    for (std::uint32_t i = 0; i < geometry_.banks_per_rank(); ++i) {
      Bank& b = banks_[first + i];
      if (b.open_row >= 0) {
        any_open = true;
        if (b.next_pre <= now) {
          DramCoord c;
          c.channel = channel_;
          c.rank = ra;
          c.bankgroup = i / geometry_.banks;
          c.bank = i % geometry_.banks;
          c.row = static_cast<std::uint64_t>(b.open_row);
          return apply(CommandKind::PRE, c, first + i, now);
        }
        wake_at_ = std::min(wake_at_, b.next_pre);
      } else {
        ref_ready = std::max(ref_ready, b.next_act);
      }
    }
    if (any_open) continue;
    if (ref_ready <= now) {
      DramCoord c;
      c.channel = channel_;
      c.rank = ra;
      r.refresh_pending = false;
      r.refresh_due += t_.tREFI;
      return apply(CommandKind::REF, c, first, now);
    }
    wake_at_ = std::min(wake_at_, ref_ready);
  }
  return std::nullopt;
}

void Controller::retire(std::uint64_t now) {
  while (!pending_reads_.empty() && pending_reads_.front().due <= now) {
    const auto p = pending_reads_.front();
    pending_reads_.pop_front();
    if (on_complete_) on_complete_(Completion{p.tag, ReqKind::Read, p.due});
  }
  while (!pending_writes_.empty() && pending_writes_.front().due <= now) {
    const auto p = pending_writes_.front();
    pending_writes_.pop_front();
    if (on_complete_) on_complete_(Completion{p.tag, ReqKind::Write, p.due});
  }
}

void Controller::update_mode() {
  if (!write_mode_) {
    if (writes_.size() >= params_.write_high || (reads_.empty() && !writes_.empty())) {
      write_mode_ = true;
    }
  } else if (writes_.empty() || (writes_.size() <= params_.write_low && !reads_.empty())) {
    write_mode_ = false;
  }
}

std::optional<Command> Controller::tick(std::uint64_t now) {
  if (last_cycle_ && now <= *last_cycle_) {
    throw std::logic_error("controller ticked backwards");
  }
  last_cycle_ = now;
  retire(now);
  if (now < wake_at_) return std::nullopt;

  std::uint64_t wake = kNever;
  bool refresh_blocked = false;
  if (t_.refresh) {
    wake_at_ = kNever;
    for (auto& r : ranks_) {
      if (!r.refresh_pending && now >= r.refresh_due) r.refresh_pending = true;
      if (r.refresh_pending) refresh_blocked = true;
    }
    if (refresh_blocked) {
      if (auto c = issue_refresh(now)) {
        wake_at_ = 0;
        return c;
      }
      wake = wake_at_;
    }
    for (const auto& r : ranks_) {
      if (!r.refresh_pending) wake = std::min(wake, r.refresh_due);
    }
  }

  update_mode();
  auto& q = write_mode_ ? writes_ : reads_;
  const auto blocked = [&](const Entry& e) {
    return refresh_blocked && ranks_[e.req.coord.rank].refresh_pending;
  };

  // First ready: the oldest row hit whose column command can go now.
  ++scan_epoch_;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Entry& e = q[i];
    if (blocked(e)) continue;
    Bank& b = banks_[e.bank];
    if (b.open_row != static_cast<std::int64_t>(e.req.coord.row)) continue;
    b.hit_stamp = scan_epoch_;
    const std::uint64_t ready = column_ready(e);
    if (ready > now) {
      wake = std::min(wake, ready);
      continue;
    }
    const bool is_read = e.req.kind == ReqKind::Read;
    Command cmd =
        apply(is_read ? CommandKind::RD : CommandKind::WR, e.req.coord, e.bank, now);
    const std::uint64_t due = now + (is_read ? t_.read_latency() : t_.write_latency());
    (is_read ? pending_reads_ : pending_writes_).push_back(Pending{due, e.req.tag});
    (is_read ? stats_.bytes_read : stats_.bytes_written) += e.req.bytes;
    const std::size_t bin = now / params_.timeline_bin_cycles;
    if (stats_.timeline.size() <= bin) stats_.timeline.resize(bin + 1, 0);
    stats_.timeline[bin] += e.req.bytes;
    q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));
    wake_at_ = 0;
    return cmd;
  }

  // First come: the oldest request whose row command (ACT or PRE) can go now.
  // A bank is not precharged while queued requests still hit its open row.
  for (const Entry& e : q) {
    if (blocked(e)) continue;
    Bank& b = banks_[e.bank];
    if (b.open_row == static_cast<std::int64_t>(e.req.coord.row)) continue;
    if (b.open_row < 0) {
      const std::uint64_t ready = act_ready(e);
      if (ready <= now) {
        wake_at_ = 0;
        return apply(CommandKind::ACT, e.req.coord, e.bank, now);
      }
      wake = std::min(wake, ready);
    } else {
      if (b.hit_stamp == scan_epoch_) continue;
      if (b.next_pre <= now) {
        DramCoord c = e.req.coord;
        c.row = static_cast<std::uint64_t>(b.open_row);
        c.column = 0;
        c.byte_offset = 0;
        wake_at_ = 0;
        return apply(CommandKind::PRE, c, e.bank, now);
      }
      wake = std::min(wake, b.next_pre);
    }
  }
  wake_at_ = wake;
  return std::nullopt;
}

}  // namespace pimmmu
