#include "pimmmu/memory_image.hpp"

#include <algorithm>
#include <cstring>

namespace pimmmu {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void MemoryImage::fill_pattern(PhysAddr addr, std::uint8_t* out, std::size_t n) const {
  std::size_t i = 0;
  while (i < n) {
    const PhysAddr a = addr + i;
    const std::uint64_t word = splitmix64(seed_ ^ splitmix64(a >> 3));
    for (unsigned b = static_cast<unsigned>(a & 7); b < 8 && i < n; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word >> (8 * b));
    }
  }
}

std::uint8_t MemoryImage::pattern_byte(PhysAddr addr) const {
  const std::uint64_t word = splitmix64(seed_ ^ splitmix64(addr >> 3));
  return static_cast<std::uint8_t>(word >> (8 * (addr & 7)));
}

void MemoryImage::read(PhysAddr addr, std::span<std::uint8_t> out) const {
  std::size_t done = 0;
  while (done < out.size()) {
    const PhysAddr a = addr + done;
    const std::uint64_t page = a / kPageBytes;
    const std::uint64_t in_page = a % kPageBytes;
    const std::size_t n = std::min<std::size_t>(out.size() - done, kPageBytes - in_page);
    auto it = pages_.find(page);
    if (it != pages_.end()) {
      std::memcpy(out.data() + done, it->second.bytes.get() + in_page, n);
    } else {
      fill_pattern(a, out.data() + done, n);
    }
    done += n;
  }
}

void MemoryImage::write(PhysAddr addr, std::span<const std::uint8_t> in) {
  std::size_t done = 0;
  while (done < in.size()) {
    const PhysAddr a = addr + done;
    const std::uint64_t page = a / kPageBytes;
    const std::uint64_t in_page = a % kPageBytes;
    const std::size_t n = std::min<std::size_t>(in.size() - done, kPageBytes - in_page);
    auto [it, inserted] = pages_.try_emplace(page);
    if (inserted) {
      it->second.bytes = std::make_unique<std::uint8_t[]>(kPageBytes);
      fill_pattern(page * kPageBytes, it->second.bytes.get(), kPageBytes);
    }
    std::memcpy(it->second.bytes.get() + in_page, in.data() + done, n);
    done += n;
  }
}

}  // namespace pimmmu
