#pragma once

// DRAM<->PIM transfer descriptors and the address arithmetic shared by the
// DCE and the host model.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pimmmu/addrmap.hpp"

namespace pimmmu {

enum class Direction { DramToPim, PimToDram };

const char* to_string(Direction d);

struct TransferDescriptor {
  Direction direction = Direction::DramToPim;
  std::uint64_t xfer_per_bank = 0;        // bytes per participating core
  std::vector<PhysAddr> dram_bases;       // one DRAM array per core
  std::vector<std::uint32_t> pim_core_ids;  // global ids, same length
  std::uint64_t pim_heap_base = 0;        // byte offset inside each core's bank

  std::uint64_t total_bytes() const { return xfer_per_bank * pim_core_ids.size(); }
};

// Every failing rule, one message each.
std::vector<std::string> validate_descriptor(const TransferDescriptor& d, const HetMap& map);

// Channel-local core id; throws std::out_of_range on an index outside geometry.
std::uint32_t get_pim_core_id(std::uint32_t ra, std::uint32_t bg, std::uint32_t bk,
                              const Geometry& g);

struct CoreLocation {
  std::uint32_t channel = 0, rank = 0, bankgroup = 0, bank = 0;
};

// Global id = channel * banks_per_channel + channel-local id.
std::uint32_t global_core_id(std::uint32_t channel, std::uint32_t local_id, const Geometry& g);
CoreLocation locate_core(std::uint32_t global_id, const Geometry& g);

// Physical address of byte `heap_base` inside the bank that hosts `global_id`.
PhysAddr pim_core_base(std::uint32_t global_id, std::uint64_t heap_base, const HetMap& map);

// 8x8 byte matrix, row-major.
using TransposeBlock = std::array<std::uint8_t, 64>;

TransposeBlock transpose(const TransposeBlock& in);

// Transposes every 64-byte block of `line` in place. Size must be a multiple of 64.
void transpose_line(std::span<std::uint8_t> line);

struct AddressBufferEntry {
  std::uint64_t dram_base = 0;
  std::uint32_t pim_core_id = 0;
  std::uint32_t offset = 0;
};
static_assert(sizeof(AddressBufferEntry) == 16);

struct AguContext {
  const HetMap* map = nullptr;
  Direction direction = Direction::DramToPim;
  std::uint64_t xfer_per_bank = 0;
  std::uint64_t heap_base = 0;
  std::uint32_t line_bytes = 64;
};

struct AguResult {
  PhysAddr src = 0;
  PhysAddr dst = 0;
  std::uint32_t offset = 0;
};

// (src, dst) for the entry's current offset, then advances the offset by one
// line. nullopt once the entry is exhausted.
std::optional<AguResult> agu_next(AddressBufferEntry& e, const AguContext& ctx);

}  // namespace pimmmu
