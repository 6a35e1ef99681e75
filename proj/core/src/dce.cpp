#include "pimmmu/dce.hpp"

#include <algorithm>
#include <ostream>

#include "pimmmu/error.hpp"

namespace pimmmu {

namespace {
constexpr std::uint64_t kWriteTag = std::uint64_t{1} << 63;
}

std::vector<std::string> DceParams::validate() const {
  std::vector<std::string> errors;
  if (!(clock_ghz > 0.0)) errors.push_back("clock_ghz: must be > 0");
  if (data_buffer_bytes < 64) errors.push_back("data_buffer_bytes: must hold at least one line");
  if (address_buffer_bytes < kEntryBytes) {
    errors.push_back("address_buffer_bytes: must hold at least one " +
                     std::to_string(kEntryBytes) + "-byte entry");
  }
  return errors;
}

DataCopyEngine::DataCopyEngine(MemorySystem& mem, MemoryImage* image, const DceParams& params)
    : mem_(mem), image_(image), params_(params) {}

void DataCopyEngine::start(const TransferDescriptor& d) {
  auto errors = validate_descriptor(d, mem_.map());
  if (!errors.empty()) throw ValidationError(std::move(errors));
  desc_ = d;
  line_bytes_ = mem_.map().pim_fn().geometry().line_bytes;
  ctx_.map = &mem_.map();
  ctx_.direction = d.direction;
  ctx_.xfer_per_bank = d.xfer_per_bank;
  ctx_.heap_base = d.pim_heap_base;
  ctx_.line_bytes = line_bytes_;
  total_lines_ = d.total_bytes() / line_bytes_;
  next_entry_ = 0;
  stats_ = DceStats{};

  const std::uint32_t n_slots = std::max<std::uint32_t>(1, params_.data_buffer_bytes / line_bytes_);
  slots_.assign(n_slots, Slot{});
  free_.clear();
  for (std::uint32_t i = n_slots; i-- > 0;) free_.push_back(i);
  filled_.clear();
  const Region dst_region = d.direction == Direction::DramToPim ? Region::Pim : Region::Dram;
  writable_.assign(mem_.controllers(dst_region).size(), {});
  read_rr_ = write_rr_ = 0;
  streams_.reset();
  if (total_lines_ > 0) load_wave();
}

void DataCopyEngine::load_wave() {
  const std::size_t n =
      std::min<std::size_t>(params_.address_entries(), desc_.pim_core_ids.size() - next_entry_);
  entries_.assign(n, AddressBufferEntry{});
  for (std::size_t i = 0; i < n; ++i) {
    entries_[i].dram_base = desc_.dram_bases[next_entry_ + i];
    entries_[i].pim_core_id = desc_.pim_core_ids[next_entry_ + i];
  }
  next_entry_ += n;
  streams_ = std::make_unique<AccessStreams>(params_.scheduler, entries_, ctx_);
  read_rr_ = 0;
  ++stats_.waves;
  stats_.max_address_entries = std::max<std::uint64_t>(stats_.max_address_entries, n);
}

void DataCopyEngine::log(std::uint64_t cycle, const char* event, const Slot& s) const {
  if (log_) *log_ << cycle << ' ' << event << ' ' << s.core << ' ' << s.offset << '\n';
}

void DataCopyEngine::tick(std::uint64_t cycle) {
  cycle_ = cycle;
  if (done()) return;
  ++stats_.cycles;

  // Write: the oldest transposed line of the first destination channel that accepts.
  for (std::size_t k = 0; k < writable_.size(); ++k) {
    const std::size_t ch = (write_rr_ + k) % writable_.size();
    auto& q = writable_[ch];
    if (q.empty()) continue;
    const std::uint32_t id = q.front();
    Slot& s = slots_[id];
    if (!mem_.try_enqueue(ReqKind::Write, s.dst, kWriteTag | id)) continue;
    if (image_) image_->write(s.dst, s.data);
    log(cycle, "write_issue", s);
    q.pop_front();
    free_.push_back(id);
    ++stats_.writes_issued;
    write_rr_ = ch + 1;
    break;
  }

  // Transpose one filled line; it becomes writable from the next cycle.
  if (!filled_.empty()) {
    const std::uint32_t id = filled_.front();
    filled_.pop_front();
    Slot& s = slots_[id];
    if (image_) transpose_line(s.data);
    const RoutedAddress r = mem_.map().route(s.dst);
    writable_[r.coord.channel].push_back(id);
    log(cycle, "transpose", s);
  }

  // Read: next access of the first stream whose target controller has room.
  if (streams_ && streams_->exhausted() && next_entry_ < desc_.pim_core_ids.size()) {
    load_wave();
  }
  if (streams_ && !streams_->exhausted()) {
    if (free_.empty()) {
      ++stats_.stall_buffer_full;
    } else {
      const std::size_t n = streams_->stream_count();
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t st = (read_rr_ + k) % n;
        auto next = streams_->peek(st);
        if (!next || !mem_.can_accept(ReqKind::Read, next->addr.src)) continue;
        const ScheduledAccess a = streams_->pop(st);
        const std::uint32_t id = free_.back();
        free_.pop_back();
        Slot& s = slots_[id];
        s.src = a.addr.src;
        s.dst = a.addr.dst;
        s.core = a.core;
        s.offset = a.addr.offset;
        mem_.try_enqueue(ReqKind::Read, s.src, id);
        log(cycle, "read_issue", s);
        ++stats_.reads_issued;
        read_rr_ = st + 1;
        break;
      }
    }
  }
  stats_.max_buffer_lines = std::max<std::uint64_t>(stats_.max_buffer_lines, buffer_occupancy());
}

void DataCopyEngine::on_completion(const Completion& c) {
  if (c.tag & kWriteTag) {
    ++stats_.writes_done;
    stats_.bytes_written += line_bytes_;
    return;
  }
  const auto id = static_cast<std::uint32_t>(c.tag);
  Slot& s = slots_[id];
  if (image_) {
    s.data.resize(line_bytes_);
    image_->read(s.src, s.data);
  }
  filled_.push_back(id);
  ++stats_.reads_done;
  stats_.bytes_read += line_bytes_;
  log(cycle_, "read_done", s);
}

}  // namespace pimmmu
