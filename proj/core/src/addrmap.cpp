#include "pimmmu/addrmap.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace pimmmu {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

unsigned log2u(std::uint64_t v) { return static_cast<unsigned>(std::countr_zero(v)); }

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

std::vector<std::string> Geometry::validate() const {
  std::vector<std::string> errors;
  auto check = [&](const char* name, std::uint64_t v) {
    if (!is_pow2(v)) {
      errors.push_back(std::string(name) + ": must be a power of two >= 1 (got " +
                       std::to_string(v) + ")");
    }
  };
  check("channels", channels);
  check("ranks", ranks);
  check("bankgroups", bankgroups);
  check("banks", banks);
  check("rows", rows);
  check("columns", columns);
  if (!is_pow2(line_bytes) || line_bytes < 8) {
    errors.push_back("line_bytes: must be a power of two >= 8 (got " +
                     std::to_string(line_bytes) + ")");
  }
  if (errors.empty() && address_bits() > 63) {
    errors.push_back("geometry: total capacity does not fit in a 64-bit physical address");
  }
  return errors;
}

unsigned Geometry::address_bits() const {
  return log2u(channels) + log2u(ranks) + log2u(bankgroups) + log2u(banks) + log2u(rows) +
         log2u(columns) + log2u(line_bytes);
}

std::uint64_t Geometry::capacity() const { return std::uint64_t{1} << address_bits(); }

std::string to_string(const DramCoord& c) {
  std::ostringstream os;
  os << "(ch" << c.channel << ", ra" << c.rank << ", bg" << c.bankgroup << ", bk" << c.bank
     << ", row" << c.row << ", col" << c.column << ", off" << c.byte_offset << ")";
  return os.str();
}

const char* to_string(MappingKind k) {
  return k == MappingKind::MlpCentric ? "mlp" : "locality";
}

const char* to_string(Region r) { return r == Region::Dram ? "dram" : "pim"; }

MappingFunction::MappingFunction(MappingKind kind, const Geometry& g)
    : kind_(kind), geometry_(g) {
  if (auto errors = g.validate(); !errors.empty()) {
    throw std::invalid_argument("invalid geometry: " + errors.front());
  }
  capacity_ = g.capacity();

  unsigned pos = 0;
  auto take = [&pos](Field& f, std::uint64_t count) {
    f.lsb = pos;
    f.width = log2u(count);
    pos += f.width;
  };

  take(offset_, g.line_bytes);
  if (kind == MappingKind::LocalityCentric) {
    take(column_, g.columns);
    take(row_, g.rows);
    take(bank_, g.banks);
    take(bankgroup_, g.bankgroups);
    take(rank_, g.ranks);
    take(channel_, g.channels);
  } else {
    take(channel_, g.channels);
    take(bankgroup_, g.bankgroups);
    take(bank_, g.banks);
    take(column_, g.columns);
    take(rank_, g.ranks);
    take(row_, g.rows);
  }
}

MappingFunction MappingFunction::locality_centric(const Geometry& g) {
  return MappingFunction(MappingKind::LocalityCentric, g);
}

MappingFunction MappingFunction::mlp_centric(const Geometry& g,
                                             std::vector<std::uint64_t> xor_masks,
                                             bool hash_banks) {
  MappingFunction fn(MappingKind::MlpCentric, g);
  fn.hash_banks_ = hash_banks && fn.row_.width > 0;
  if (xor_masks.empty()) xor_masks = default_xor_masks(g);

  if (xor_masks.size() != fn.channel_.width) {
    throw std::invalid_argument("xor_masks: expected " + std::to_string(fn.channel_.width) +
                                " masks (one per channel bit), got " +
                                std::to_string(xor_masks.size()));
  }
  const unsigned upper_lsb = fn.channel_.lsb + fn.channel_.width;
  const std::uint64_t addr_mask = fn.capacity_ - 1;
  const std::uint64_t upper = addr_mask & ~((std::uint64_t{1} << upper_lsb) - 1);
  for (std::size_t i = 0; i < xor_masks.size(); ++i) {
    const std::uint64_t m = xor_masks[i];
    if ((m & ~upper) != 0) {
      throw std::invalid_argument("xor_masks[" + std::to_string(i) + "] = " + hex(m) +
                                  ": bits must lie above the channel field and inside the "
                                  "address space");
    }
    if (m == 0 && upper != 0) {
      throw std::invalid_argument("xor_masks[" + std::to_string(i) + "]: must select at "
                                  "least one address bit");
    }
  }
  fn.xor_masks_ = std::move(xor_masks);
  return fn;
}

std::vector<std::uint64_t> default_xor_masks(const Geometry& g) {
  // Field positions of the MLP-centric layout, recomputed locally.
  const unsigned off = log2u(g.line_bytes);
  const unsigned ch = log2u(g.channels);
  const unsigned bg = log2u(g.bankgroups);
  const unsigned bk = log2u(g.banks);
  const unsigned col = log2u(g.columns);
  const unsigned ra = log2u(g.ranks);
  const unsigned ro = log2u(g.rows);

  const unsigned bg_lsb = off + ch;
  const unsigned bk_lsb = bg_lsb + bg;
  const unsigned col_lsb = bk_lsb + bk;
  const unsigned row_lsb = col_lsb + col + ra;

  std::vector<std::uint64_t> masks(ch, 0);
  for (unsigned i = 0; i < ch; ++i) {
    std::uint64_t m = 0;
    if (ro > 0) m |= std::uint64_t{1} << (row_lsb + i % ro);
    if (bk > 0) {
      m |= std::uint64_t{1} << (bk_lsb + i % bk);
    } else if (bg > 0) {
      m |= std::uint64_t{1} << (bg_lsb + i % bg);
    }
    if (m == 0 && col > 0) m |= std::uint64_t{1} << (col_lsb + i % col);
    masks[i] = m;
  }
  return masks;
}

std::uint64_t MappingFunction::channel_hash(PhysAddr addr) const {
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < xor_masks_.size(); ++i) {
    h |= static_cast<std::uint64_t>(std::popcount(addr & xor_masks_[i]) & 1) << i;
  }
  return h;
}

std::uint64_t MappingFunction::bank_hash(std::uint64_t row) const {
  // Bits [0, bank.width) hash the bank field, the rest the bankgroup field.
  const unsigned bits = bank_.width + bankgroup_.width;
  std::uint64_t h = 0;
  for (unsigned k = 0; k < bits; ++k) {
    h |= ((row >> ((channel_.width + k) % row_.width)) & 1) << k;
  }
  return h;
}

DramCoord MappingFunction::decode(PhysAddr addr) const {
  if (addr >= capacity_) {
    throw std::out_of_range("address " + hex(addr) + " out of range (capacity " +
                            hex(capacity_) + ")");
  }
  DramCoord c;
  c.byte_offset = static_cast<std::uint32_t>(offset_.extract(addr));
  c.column = static_cast<std::uint32_t>(column_.extract(addr));
  c.row = row_.extract(addr);
  c.bank = static_cast<std::uint32_t>(bank_.extract(addr));
  c.bankgroup = static_cast<std::uint32_t>(bankgroup_.extract(addr));
  c.rank = static_cast<std::uint32_t>(rank_.extract(addr));
  if (hash_banks_) {
    const std::uint64_t h = bank_hash(c.row);
    c.bank ^= static_cast<std::uint32_t>(h & ((std::uint64_t{1} << bank_.width) - 1));
    c.bankgroup ^= static_cast<std::uint32_t>(h >> bank_.width);
  }
  std::uint64_t ch = channel_.extract(addr);
  if (kind_ == MappingKind::MlpCentric) ch ^= channel_hash(addr);
  c.channel = static_cast<std::uint32_t>(ch);
  return c;
}

std::uint32_t MappingFunction::channel_of(PhysAddr addr) const { return decode(addr).channel; }

PhysAddr MappingFunction::encode(const DramCoord& c) const {
  auto bound = [](const char* name, std::uint64_t v, std::uint64_t limit) {
    if (v >= limit) {
      throw std::out_of_range(std::string("coordinate field '") + name + "' = " +
                              std::to_string(v) + " out of range (limit " +
                              std::to_string(limit) + ")");
    }
  };
  bound("channel", c.channel, geometry_.channels);
  bound("rank", c.rank, geometry_.ranks);
  bound("bankgroup", c.bankgroup, geometry_.bankgroups);
  bound("bank", c.bank, geometry_.banks);
  bound("row", c.row, geometry_.rows);
  bound("column", c.column, geometry_.columns);
  bound("byte_offset", c.byte_offset, geometry_.line_bytes);

  std::uint64_t bank = c.bank, bankgroup = c.bankgroup;
  if (hash_banks_) {
    const std::uint64_t h = bank_hash(c.row);
    bank ^= h & ((std::uint64_t{1} << bank_.width) - 1);
    bankgroup ^= h >> bank_.width;
  }
  PhysAddr a = offset_.place(c.byte_offset) | column_.place(c.column) | row_.place(c.row) |
               bank_.place(bank) | bankgroup_.place(bankgroup) | rank_.place(c.rank);
  std::uint64_t ch = c.channel;
  // Masks never cover the channel field, so the hash of the partial address
  // equals the hash of the final one.
  if (kind_ == MappingKind::MlpCentric) ch ^= channel_hash(a);
  return a | channel_.place(ch);
}

HetMap::HetMap(MappingFunction dram_fn, MappingFunction pim_fn)
    : dram_fn_(std::move(dram_fn)),
      pim_fn_(std::move(pim_fn)),
      dram_bytes_(dram_fn_.capacity()) {
  if (dram_bytes_ > ~std::uint64_t{0} - pim_fn_.capacity()) {
    throw std::invalid_argument("HetMap: DRAM + PIM capacity overflows the physical space");
  }
}

RoutedAddress HetMap::route(PhysAddr addr) const {
  if (addr < dram_bytes_) return {Region::Dram, dram_fn_.decode(addr)};
  if (addr - dram_bytes_ >= pim_fn_.capacity()) {
    throw std::out_of_range("address " + hex(addr) + " out of range (capacity " +
                            hex(total_bytes()) + ")");
  }
  return {Region::Pim, pim_fn_.decode(addr - dram_bytes_)};
}

std::vector<std::uint64_t> channel_balance(std::span<const PhysAddr> addrs,
                                           const MappingFunction& fn) {
  std::vector<std::uint64_t> hist(fn.geometry().channels, 0);
  for (PhysAddr a : addrs) ++hist[fn.channel_of(a)];
  return hist;
}

}  // namespace pimmmu
