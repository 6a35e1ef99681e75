#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>

#include "pimmmu/addrmap.hpp"

namespace pimmmu {

// Sparse byte store over the whole physical space. Bytes never written read
// back as a fixed function of (seed, address), so source data needs no storage.
class MemoryImage {
 public:
  static constexpr std::uint64_t kPageBytes = 4096;

  explicit MemoryImage(std::uint64_t seed = 0) : seed_(seed) {}

  void read(PhysAddr addr, std::span<std::uint8_t> out) const;
  void write(PhysAddr addr, std::span<const std::uint8_t> in);

  // Content of an address that was never written.
  std::uint8_t pattern_byte(PhysAddr addr) const;

  std::uint64_t seed() const { return seed_; }
  std::size_t resident_pages() const { return pages_.size(); }

 private:
  struct Page {
    std::unique_ptr<std::uint8_t[]> bytes;
  };

  void fill_pattern(PhysAddr addr, std::uint8_t* out, std::size_t n) const;

  std::uint64_t seed_;
  std::unordered_map<std::uint64_t, Page> pages_;
};

}  // namespace pimmmu
