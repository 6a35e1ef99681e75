#include "pimmmu/pim_ms.hpp"

#include <stdexcept>

#include "pimmmu/error.hpp"

namespace pimmmu {

const char* to_string(SchedulerKind k) { return k == SchedulerKind::PimMs ? "pim_ms" : "naive"; }

AccessStreams::AccessStreams(SchedulerKind kind, std::span<AddressBufferEntry> entries,
                             const AguContext& ctx)
    : kind_(kind), entries_(entries), ctx_(ctx) {
  const std::uint64_t lines = ctx.xfer_per_bank / ctx.line_bytes;
  if (kind == SchedulerKind::Naive) {
    Stream s;
    for (std::uint32_t i = 0; i < entries.size(); ++i) s.order.push_back(i);
    streams_.push_back(std::move(s));
  } else {
    const Geometry& g = ctx.map->pim_fn().geometry();
    // Entry index by global core id; absent cores are skipped.
    std::vector<std::int64_t> by_core(g.total_banks(), -1);
    for (std::uint32_t i = 0; i < entries.size(); ++i) by_core[entries[i].pim_core_id] = i;
    streams_.resize(g.channels);
    for (std::uint32_t ch = 0; ch < g.channels; ++ch) {
      for (std::uint32_t bk = 0; bk < g.banks; ++bk) {
        for (std::uint32_t ra = 0; ra < g.ranks; ++ra) {
          for (std::uint32_t bg = 0; bg < g.bankgroups; ++bg) {
            const std::uint32_t id = global_core_id(ch, get_pim_core_id(ra, bg, bk, g), g);
            if (by_core[id] >= 0) streams_[ch].order.push_back(static_cast<std::uint32_t>(by_core[id]));
          }
        }
      }
    }
  }
  for (auto& s : streams_) {
    for (std::uint32_t e : s.order) {
      const std::uint64_t done = entries_[e].offset / ctx.line_bytes;
      s.remaining += done < lines ? lines - done : 0;
    }
    remaining_ += s.remaining;
  }
}

void AccessStreams::settle(Stream& s) {
  if (s.remaining == 0) return;
  while (!live(s.order[s.cursor])) s.cursor = (s.cursor + 1) % s.order.size();
}

std::optional<ScheduledAccess> AccessStreams::peek(std::size_t stream) {
  Stream& s = streams_.at(stream);
  if (s.remaining == 0) return std::nullopt;
  settle(s);
  AddressBufferEntry copy = entries_[s.order[s.cursor]];
  ScheduledAccess a;
  a.entry = s.order[s.cursor];
  a.core = copy.pim_core_id;
  a.addr = *agu_next(copy, ctx_);
  return a;
}

ScheduledAccess AccessStreams::pop(std::size_t stream) {
  Stream& s = streams_.at(stream);
  if (s.remaining == 0) throw std::logic_error("pop on an exhausted stream");
  settle(s);
  ScheduledAccess a;
  a.entry = s.order[s.cursor];
  a.core = entries_[a.entry].pim_core_id;
  a.addr = *agu_next(entries_[a.entry], ctx_);
  --s.remaining;
  --remaining_;
  // Naive drains one entry before moving on; PIM-MS visits the next core.
  if (kind_ == SchedulerKind::PimMs || !live(a.entry)) {
    s.cursor = (s.cursor + 1) % s.order.size();
  }
  return a;
}

std::vector<std::vector<ScheduledAccess>> schedule_order(SchedulerKind kind,
                                                         const TransferDescriptor& d,
                                                         const HetMap& map) {
  auto errors = validate_descriptor(d, map);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  std::vector<AddressBufferEntry> entries(d.pim_core_ids.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].dram_base = d.dram_bases[i];
    entries[i].pim_core_id = d.pim_core_ids[i];
  }
  AguContext ctx;
  ctx.map = &map;
  ctx.direction = d.direction;
  ctx.xfer_per_bank = d.xfer_per_bank;
  ctx.heap_base = d.pim_heap_base;
  ctx.line_bytes = map.pim_fn().geometry().line_bytes;
  AccessStreams streams(kind, entries, ctx);
  std::vector<std::vector<ScheduledAccess>> out(streams.stream_count());
  for (std::size_t s = 0; s < streams.stream_count(); ++s) {
    while (streams.peek(s)) out[s].push_back(streams.pop(s));
  }
  return out;
}

}  // namespace pimmmu
