#pragma once

// Physical address <-> DRAM coordinate mapping.
//
// Two layouts are provided. The locality-centric layout slices the address
// MSB->LSB as channel, rank, bankgroup, bank, row, column, byte offset
// ("ChRaBgBkRoCo"), so a whole bank occupies one contiguous physical range.
// The MLP-centric layout puts the channel bits directly above the byte
// offset (LSB->MSB: offset, channel, bankgroup, bank, column, rank, row) and
// folds an XOR parity of selected upper bits into each channel bit. Optionally
// each bankgroup and bank bit is also XORed with one row bit.
//
// HetMap routes the low part of the physical space (DRAM) through one mapping
// and the high part (PIM) through another.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pimmmu {

using PhysAddr = std::uint64_t;

struct Geometry {
  std::uint32_t channels = 1;
  std::uint32_t ranks = 1;          // per channel
  std::uint32_t bankgroups = 1;     // per rank
  std::uint32_t banks = 1;          // per bankgroup
  std::uint64_t rows = 1;           // per bank
  std::uint32_t columns = 1;        // lines per row
  std::uint32_t line_bytes = 64;

  // Returns one message per offending field; empty when valid.
  std::vector<std::string> validate() const;

  std::uint64_t row_bytes() const { return std::uint64_t{columns} * line_bytes; }
  std::uint64_t bank_bytes() const { return rows * row_bytes(); }
  std::uint64_t capacity() const;
  std::uint32_t banks_per_rank() const { return bankgroups * banks; }
  std::uint32_t banks_per_channel() const { return ranks * bankgroups * banks; }
  std::uint32_t total_banks() const { return channels * banks_per_channel(); }
  unsigned address_bits() const;

  bool operator==(const Geometry&) const = default;
};

struct DramCoord {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bankgroup = 0;
  std::uint32_t bank = 0;
  std::uint64_t row = 0;
  std::uint32_t column = 0;
  std::uint32_t byte_offset = 0;

  auto operator<=>(const DramCoord&) const = default;
};

std::string to_string(const DramCoord& c);

enum class MappingKind { MlpCentric, LocalityCentric };

const char* to_string(MappingKind k);

class MappingFunction {
 public:
  static MappingFunction locality_centric(const Geometry& g);

  // An empty mask list selects default_xor_masks(g). With `hash_banks`, bank
  // and bankgroup bit k are XORed with row bit (channel bits + k).
  static MappingFunction mlp_centric(const Geometry& g,
                                     std::vector<std::uint64_t> xor_masks = {},
                                     bool hash_banks = true);

  // Throws std::out_of_range naming the capacity.
  DramCoord decode(PhysAddr addr) const;
  // Throws std::out_of_range naming the offending field.
  PhysAddr encode(const DramCoord& coord) const;

  std::uint32_t channel_of(PhysAddr addr) const;

  MappingKind kind() const { return kind_; }
  const Geometry& geometry() const { return geometry_; }
  const std::vector<std::uint64_t>& xor_masks() const { return xor_masks_; }
  bool hashes_banks() const { return hash_banks_; }
  std::uint64_t capacity() const { return capacity_; }

  // Bit position of the lowest channel bit in the raw (unhashed) layout.
  unsigned channel_lsb() const { return channel_.lsb; }

 private:
  struct Field {
    unsigned lsb = 0;
    unsigned width = 0;

    std::uint64_t extract(std::uint64_t a) const {
      return width == 0 ? 0 : (a >> lsb) & ((std::uint64_t{1} << width) - 1);
    }
    std::uint64_t place(std::uint64_t v) const { return width == 0 ? 0 : v << lsb; }
    std::uint64_t mask() const {
      return width == 0 ? 0 : ((std::uint64_t{1} << width) - 1) << lsb;
    }
  };

  MappingFunction(MappingKind kind, const Geometry& g);
  std::uint64_t channel_hash(PhysAddr addr) const;
  // Row bit folded into bit `k` of the combined (bankgroup, bank) index.
  std::uint64_t bank_hash(std::uint64_t row) const;

  MappingKind kind_;
  Geometry geometry_;
  std::uint64_t capacity_ = 0;
  std::vector<std::uint64_t> xor_masks_;
  bool hash_banks_ = false;
  Field offset_, channel_, rank_, bankgroup_, bank_, row_, column_;
};

// One mask per channel bit: channel bit i XORs row bit i and one bank-field
// bit (bankgroup bit when the bank field is empty).
std::vector<std::uint64_t> default_xor_masks(const Geometry& g);

enum class Region { Dram, Pim };

const char* to_string(Region r);

struct RoutedAddress {
  Region region;
  DramCoord coord;
};

class HetMap {
 public:
  HetMap(MappingFunction dram_fn, MappingFunction pim_fn);

  RoutedAddress route(PhysAddr addr) const;

  PhysAddr pim_base() const { return dram_bytes_; }
  std::uint64_t dram_bytes() const { return dram_bytes_; }
  std::uint64_t total_bytes() const { return dram_bytes_ + pim_fn_.capacity(); }
  const MappingFunction& dram_fn() const { return dram_fn_; }
  const MappingFunction& pim_fn() const { return pim_fn_; }

 private:
  MappingFunction dram_fn_;
  MappingFunction pim_fn_;
  std::uint64_t dram_bytes_;
};

std::vector<std::uint64_t> channel_balance(std::span<const PhysAddr> addrs,
                                           const MappingFunction& fn);

}  // namespace pimmmu
