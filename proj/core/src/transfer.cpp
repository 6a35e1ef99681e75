#include "pimmmu/transfer.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace pimmmu {

const char* to_string(Direction d) {
  return d == Direction::DramToPim ? "dram_to_pim" : "pim_to_dram";
}

std::uint32_t get_pim_core_id(std::uint32_t ra, std::uint32_t bg, std::uint32_t bk,
                              const Geometry& g) {
  if (ra >= g.ranks) throw std::out_of_range("rank " + std::to_string(ra) + " out of range");
  if (bg >= g.bankgroups) {
    throw std::out_of_range("bankgroup " + std::to_string(bg) + " out of range");
  }
  if (bk >= g.banks) throw std::out_of_range("bank " + std::to_string(bk) + " out of range");
  return ra * g.banks * g.bankgroups + bg * g.banks + bk;
}

std::uint32_t global_core_id(std::uint32_t channel, std::uint32_t local_id, const Geometry& g) {
  if (channel >= g.channels || local_id >= g.banks_per_channel()) {
    throw std::out_of_range("core (channel " + std::to_string(channel) + ", local " +
                            std::to_string(local_id) + ") out of range");
  }
  return channel * g.banks_per_channel() + local_id;
}

CoreLocation locate_core(std::uint32_t global_id, const Geometry& g) {
  if (global_id >= g.total_banks()) {
    throw std::out_of_range("PIM core id " + std::to_string(global_id) + " out of range (" +
                            std::to_string(g.total_banks()) + " cores)");
  }
  CoreLocation loc;
  loc.channel = global_id / g.banks_per_channel();
  std::uint32_t local = global_id % g.banks_per_channel();
  loc.rank = local / (g.banks * g.bankgroups);
  local %= g.banks * g.bankgroups;
  loc.bankgroup = local / g.banks;
  loc.bank = local % g.banks;
  return loc;
}

PhysAddr pim_core_base(std::uint32_t global_id, std::uint64_t heap_base, const HetMap& map) {
  const CoreLocation loc = locate_core(global_id, map.pim_fn().geometry());
  DramCoord c;
  c.channel = loc.channel;
  c.rank = loc.rank;
  c.bankgroup = loc.bankgroup;
  c.bank = loc.bank;
  return map.pim_base() + map.pim_fn().encode(c) + heap_base;
}

std::vector<std::string> validate_descriptor(const TransferDescriptor& d, const HetMap& map) {
  std::vector<std::string> errors;
  const Geometry& pg = map.pim_fn().geometry();
  const std::uint32_t line = pg.line_bytes;
  if (d.dram_bases.size() != d.pim_core_ids.size()) {
    errors.push_back("dram_bases: length " + std::to_string(d.dram_bases.size()) +
                     " != pim_core_ids length " + std::to_string(d.pim_core_ids.size()));
  }
  if (line % 64 != 0) errors.push_back("line_bytes: transfers need a multiple of 64");
  if (d.xfer_per_bank % line != 0) {
    errors.push_back("xfer_per_bank: must be a multiple of " + std::to_string(line));
  }
  if (d.xfer_per_bank > 0xffffffffULL) errors.push_back("xfer_per_bank: must fit in 32 bits");
  if (d.pim_heap_base % line != 0) {
    errors.push_back("pim_heap_base: must be a multiple of " + std::to_string(line));
  }
  if (d.pim_heap_base + d.xfer_per_bank > pg.bank_bytes()) {
    errors.push_back("pim_heap_base: heap region exceeds the bank (" +
                     std::to_string(pg.bank_bytes()) + " bytes)");
  }
  std::unordered_set<std::uint32_t> seen;
  for (std::uint32_t id : d.pim_core_ids) {
    if (id >= pg.total_banks()) {
      errors.push_back("pim_core_ids: id " + std::to_string(id) + " >= " +
                       std::to_string(pg.total_banks()));
    } else if (!seen.insert(id).second) {
      errors.push_back("pim_core_ids: duplicate id " + std::to_string(id));
    }
  }
  for (std::size_t i = 0; i < d.dram_bases.size(); ++i) {
    const PhysAddr b = d.dram_bases[i];
    if (b % line != 0) {
      errors.push_back("dram_bases[" + std::to_string(i) + "]: not line aligned");
    }
    if (b + d.xfer_per_bank > map.dram_bytes() || b + d.xfer_per_bank < b) {
      errors.push_back("dram_bases[" + std::to_string(i) + "]: region leaves DRAM space");
    }
  }
  if (d.direction == Direction::PimToDram && d.xfer_per_bank > 0) {
    std::vector<PhysAddr> sorted = d.dram_bases;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] < sorted[i - 1] + d.xfer_per_bank) {
        errors.push_back("dram_bases: destination regions overlap");
        break;
      }
    }
  }
  return errors;
}

TransposeBlock transpose(const TransposeBlock& in) {
  TransposeBlock out;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) out[i * 8 + j] = in[j * 8 + i];
  }
  return out;
}

void transpose_line(std::span<std::uint8_t> line) {
  if (line.size() % 64 != 0) throw std::invalid_argument("line size not a multiple of 64");
  for (std::size_t b = 0; b < line.size(); b += 64) {
    TransposeBlock blk;
    std::copy_n(line.begin() + static_cast<std::ptrdiff_t>(b), 64, blk.begin());
    blk = transpose(blk);
    std::copy(blk.begin(), blk.end(), line.begin() + static_cast<std::ptrdiff_t>(b));
  }
}

std::optional<AguResult> agu_next(AddressBufferEntry& e, const AguContext& ctx) {
  if (e.offset >= ctx.xfer_per_bank) return std::nullopt;
  const PhysAddr pim = pim_core_base(e.pim_core_id, ctx.heap_base, *ctx.map) + e.offset;
  const PhysAddr dram = e.dram_base + e.offset;
  AguResult r;
  r.offset = e.offset;
  if (ctx.direction == Direction::DramToPim) {
    r.src = dram;
    r.dst = pim;
  } else {
    r.src = pim;
    r.dst = dram;
  }
  e.offset += ctx.line_bytes;
  return r;
}

}  // namespace pimmmu
