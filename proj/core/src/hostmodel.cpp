#include "pimmmu/hostmodel.hpp"

#include <algorithm>
#include <cmath>

#include "pimmmu/error.hpp"

namespace pimmmu {

namespace {
// tag = thread << 33 | write flag << 32 | line
constexpr std::uint64_t kWriteBit = std::uint64_t{1} << 32;
std::uint64_t make_tag(std::size_t thread, bool write, std::uint64_t line) {
  return (std::uint64_t{thread} << 33) | (write ? kWriteBit : 0) | line;
}
}  // namespace

std::vector<std::string> HostParams::validate() const {
  std::vector<std::string> errors;
  if (cores == 0) errors.push_back("cores: must be >= 1");
  if (!(clock_ghz > 0.0)) errors.push_back("clock_ghz: must be > 0");
  if (!(quantum_ms > 0.0)) errors.push_back("quantum_ms: must be > 0");
  if (mshrs == 0) errors.push_back("mshrs: must be >= 1");
  if (issue_gap_cycles == 0) errors.push_back("issue_gap_cycles: must be >= 1");
  return errors;
}

std::uint64_t HostParams::quantum_cycles() const {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(quantum_ms * 1e6 * clock_ghz)));
}

HostModel::HostModel(MemorySystem& mem, MemoryImage* image, const HostParams& params)
    : mem_(mem), image_(image), params_(params), sched_(params.cores, params.quantum_cycles()) {}

void HostModel::reset(std::size_t threads) {
  sched_ = OsScheduler(params_.cores, params_.quantum_cycles());
  threads_.assign(threads, Thread{});
  preempting_.assign(params_.cores, false);
  finished_threads_ = 0;
  bank_writes_.clear();
  stats_ = HostStats{};
  stats_.threads = threads;
}

void HostModel::start_transfer(const TransferDescriptor& d) {
  auto errors = validate_descriptor(d, mem_.map());
  if (!errors.empty()) throw ValidationError(std::move(errors));
  line_bytes_ = mem_.map().pim_fn().geometry().line_bytes;
  reset(d.pim_core_ids.size());
  for (std::size_t i = 0; i < threads_.size(); ++i) {
    Thread& t = threads_[i];
    const PhysAddr pim = pim_core_base(d.pim_core_ids[i], d.pim_heap_base, mem_.map());
    t.src = d.direction == Direction::DramToPim ? d.dram_bases[i] : pim;
    t.dst = d.direction == Direction::DramToPim ? pim : d.dram_bases[i];
    t.lines = d.xfer_per_bank / line_bytes_;
    t.transpose = true;
    if (d.direction == Direction::DramToPim) t.dst_bank = d.pim_core_ids[i];
    if (t.lines == 0) {
      t.finished = true;
      ++finished_threads_;
    } else {
      sched_.add_thread(static_cast<std::uint32_t>(i));
    }
  }
}

void HostModel::start_memcpy(std::uint64_t bytes, std::uint32_t threads, PhysAddr src,
                             PhysAddr dst) {
  line_bytes_ = mem_.map().dram_fn().geometry().line_bytes;
  std::vector<std::string> errors;
  if (threads == 0) errors.push_back("threads: must be >= 1");
  if (bytes % line_bytes_ != 0) {
    errors.push_back("bytes: must be a multiple of " + std::to_string(line_bytes_));
  }
  if (src + bytes > mem_.map().dram_bytes() || dst + bytes > mem_.map().dram_bytes()) {
    errors.push_back("bytes: source and destination must both lie in DRAM space");
  }
  if (bytes > 0 && src < dst + bytes && dst < src + bytes) {
    errors.push_back("bytes: source and destination regions overlap");
  }
  if (src % line_bytes_ != 0 || dst % line_bytes_ != 0) {
    errors.push_back("base: source and destination must be line aligned");
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));

  const std::uint64_t lines = bytes / line_bytes_;
  reset(lines == 0 ? 0 : threads);
  std::uint64_t first = 0;
  for (std::size_t i = 0; i < threads_.size(); ++i) {
    // Spread the remainder over the first threads.
    const std::uint64_t n = lines / threads + (i < lines % threads ? 1 : 0);
    Thread& t = threads_[i];
    t.src = src + first * line_bytes_;
    t.dst = dst + first * line_bytes_;
    t.lines = n;
    first += n;
    if (n == 0) {
      t.finished = true;
      ++finished_threads_;
    } else {
      sched_.add_thread(static_cast<std::uint32_t>(i));
    }
  }
}

void HostModel::bank_inflight(std::int64_t bank, int delta) {
  if (bank < 0) return;
  auto& n = bank_writes_[bank];
  n = static_cast<std::uint32_t>(static_cast<int>(n) + delta);
  if (n == 0) bank_writes_.erase(bank);
  stats_.max_active_dst_banks =
      std::max<std::uint64_t>(stats_.max_active_dst_banks, bank_writes_.size());
}

void HostModel::write_data(const Thread& t, std::uint64_t line) {
  if (!image_) return;
  std::vector<std::uint8_t> buf(line_bytes_);
  image_->read(t.src + line * line_bytes_, buf);
  if (t.transpose) transpose_line(buf);
  image_->write(t.dst + line * line_bytes_, buf);
}

bool HostModel::try_issue(Thread& t, ReqKind kind, PhysAddr addr, std::uint64_t tag) {
  if (mem_.try_enqueue(kind, addr, tag)) {
    t.blocked_on = nullptr;
    return true;
  }
  t.blocked_on = &mem_.controller_for(addr);
  t.blocked_kind = kind;
  t.blocked_mark = t.blocked_on->departures(kind);
  return false;
}

void HostModel::tick(std::uint64_t cycle) {
  cycle_ = cycle;
  if (done()) return;
  ++stats_.cycles;
  sched_.dispatch(cycle);
  for (std::uint32_t slot = 0; slot < sched_.cores(); ++slot) {
    auto id = sched_.running(slot);
    if (!id) continue;
    Thread& t = threads_[*id];
    if (t.finished) {
      sched_.release(slot, true, cycle);
      preempting_[slot] = false;
      continue;
    }
    if (!preempting_[slot] && sched_.quantum_expired(slot, cycle)) preempting_[slot] = true;
    if (preempting_[slot]) {
      // A switched-out thread leaves once its outstanding accesses drain.
      if (t.in_flight == 0) {
        sched_.release(slot, false, cycle);
        preempting_[slot] = false;
      }
      continue;
    }
    if (cycle < t.next_issue || t.in_flight >= params_.mshrs) continue;
    if (t.blocked_on && t.blocked_on->departures(t.blocked_kind) == t.blocked_mark) continue;
    const std::size_t tid = *id;
    if (!t.ready.empty()) {
      const std::uint64_t line = t.ready.front();
      if (try_issue(t, ReqKind::Write, t.dst + line * line_bytes_, make_tag(tid, true, line))) {
        t.ready.pop_front();
        write_data(t, line);
        ++t.writes_issued;
        ++t.in_flight;
        ++stats_.writes_issued;
        bank_inflight(t.dst_bank, +1);
        t.next_issue = cycle + params_.issue_gap_cycles + (t.transpose ? params_.transpose_cycles : 0);
      }
      continue;
    }
    if (t.reads_issued < t.lines) {
      const std::uint64_t line = t.reads_issued;
      if (try_issue(t, ReqKind::Read, t.src + line * line_bytes_, make_tag(tid, false, line))) {
        ++t.reads_issued;
        ++t.in_flight;
        ++stats_.reads_issued;
        t.next_issue = cycle + params_.issue_gap_cycles;
      }
    }
  }
  sched_.dispatch(cycle);
}

void HostModel::on_completion(const Completion& c) {
  Thread& t = threads_[c.tag >> 33];
  --t.in_flight;
  t.blocked_on = nullptr;
  if (c.tag & kWriteBit) {
    ++t.writes_done;
    ++stats_.writes_done;
    stats_.bytes_written += line_bytes_;
    bank_inflight(t.dst_bank, -1);
    if (t.writes_done == t.lines) {
      t.finished = true;
      ++finished_threads_;
    }
  } else {
    t.ready.push_back(c.tag & (kWriteBit - 1));
    ++stats_.reads_done;
    stats_.bytes_read += line_bytes_;
  }
}

const HostStats& HostModel::stats() {
  stats_.dispatches = sched_.dispatches();
  stats_.preemptions = sched_.preemptions();
  stats_.busy_cycles = sched_.busy_cycles();
  stats_.thread_active_cycles = sched_.active_cycles();
  return stats_;
}

}  // namespace pimmmu
