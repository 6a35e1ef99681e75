#include "oracles.hpp"

#include <algorithm>
#include <numeric>

namespace pimmmu::testing {

std::vector<std::vector<OracleAccess>> alg1_reference(const TransferDescriptor& d,
                                                      const Geometry& pim, PhysAddr pim_base) {
  const std::uint32_t num_ranks = pim.ranks;
  const std::uint32_t num_bankgroups = pim.bankgroups;
  const std::uint32_t num_banks = pim.banks;
  const std::uint32_t per_channel = num_ranks * num_bankgroups * num_banks;
  auto get_pim_core_id = [&](std::uint32_t ra, std::uint32_t bg, std::uint32_t bk) {
    return ra * num_banks * num_bankgroups + bg * num_banks + bk;
  };

  // base_addrs[id] per channel; absent cores are skipped.
  struct Core {
    bool present = false;
    PhysAddr src_base = 0, dst_base = 0;
    std::uint64_t offset = 0;
  };
  std::vector<std::vector<OracleAccess>> addrs(pim.channels);
  for (std::uint32_t ch = 0; ch < pim.channels; ++ch) {
    std::vector<Core> pim_cores(per_channel);
    for (std::size_t i = 0; i < d.pim_core_ids.size(); ++i) {
      const std::uint32_t g = d.pim_core_ids[i];
      if (g / per_channel != ch) continue;
      Core& c = pim_cores[g % per_channel];
      const PhysAddr bank = bank_base_oracle(pim, pim_base, g, d.pim_heap_base);
      c.present = true;
      c.src_base = d.direction == Direction::DramToPim ? d.dram_bases[i] : bank;
      c.dst_base = d.direction == Direction::DramToPim ? bank : d.dram_bases[i];
    }
    auto agu = [&](std::uint32_t id) {
      Core& c = pim_cores[id];
      OracleAccess a{ch * per_channel + id, c.offset, c.src_base + c.offset, c.dst_base + c.offset};
      c.offset += pim.line_bytes;
      return a;
    };
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::uint32_t bk = 0; bk < num_banks; ++bk) {
        for (std::uint32_t ra = 0; ra < num_ranks; ++ra) {
          for (std::uint32_t bg = 0; bg < num_bankgroups; ++bg) {
            const std::uint32_t id = get_pim_core_id(ra, bg, bk);
            if (!pim_cores[id].present || pim_cores[id].offset >= d.xfer_per_bank) continue;
            addrs[ch].push_back(agu(id));
            progress = true;
          }
        }
      }
    }
  }
  return addrs;
}

PhysAddr bank_base_oracle(const Geometry& pim, PhysAddr pim_base, std::uint32_t global_id,
                          std::uint64_t heap) {
  const std::uint64_t per_channel = std::uint64_t{pim.ranks} * pim.bankgroups * pim.banks;
  const std::uint64_t ch = global_id / per_channel;
  const std::uint64_t local = global_id % per_channel;
  const std::uint64_t ra = local / (std::uint64_t{pim.bankgroups} * pim.banks);
  const std::uint64_t bg = (local / pim.banks) % pim.bankgroups;
  const std::uint64_t bk = local % pim.banks;
  const std::uint64_t ordinal = ((ch * pim.ranks + ra) * pim.bankgroups + bg) * pim.banks + bk;
  const std::uint64_t bank_bytes = pim.rows * pim.columns * pim.line_bytes;
  return pim_base + ordinal * bank_bytes + heap;
}

void transpose_oracle(const std::uint8_t* in, std::uint8_t* out) {
  std::uint64_t words[8] = {};
  for (int w = 0; w < 8; ++w) {
    for (int b = 0; b < 8; ++b) words[w] |= std::uint64_t{in[w * 8 + b]} << (8 * b);
  }
  for (int i = 0; i < 8; ++i) {
    std::uint64_t gathered = 0;
    for (int j = 0; j < 8; ++j) gathered |= ((words[j] >> (8 * i)) & 0xff) << (8 * j);
    for (int b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<std::uint8_t>(gathered >> (8 * b));
  }
}

std::uint64_t bank_ordinal_oracle(const Geometry& g, PhysAddr addr) {
  return addr / (g.rows * g.columns * g.line_bytes);
}

Geometry random_geometry(std::mt19937_64& rng, std::uint32_t max_channels) {
  auto pick = [&](std::initializer_list<std::uint32_t> v) {
    std::vector<std::uint32_t> c(v);
    return c[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)];
  };
  Geometry g;
  do {
    g.channels = pick({1, 2, 4});
  } while (g.channels > max_channels);
  g.ranks = pick({1, 2});
  g.bankgroups = pick({1, 2, 4});
  g.banks = pick({1, 2, 4, 8});
  g.rows = pick({4, 8, 16});
  g.columns = pick({4, 8, 16});
  g.line_bytes = 64;
  return g;
}

RandomCase random_case(std::mt19937_64& rng, Direction dir) {
  RandomCase rc;
  rc.pim = random_geometry(rng, 4);
  rc.dram.channels = 2;
  rc.dram.ranks = 1;
  rc.dram.bankgroups = 2;
  rc.dram.banks = 2;
  rc.dram.rows = 256;
  rc.dram.columns = 16;
  rc.dram.line_bytes = 64;

  const std::uint32_t total = rc.pim.total_banks();
  std::vector<std::uint32_t> ids(total);
  std::iota(ids.begin(), ids.end(), 0u);
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(1, total)(rng);
  ids.resize(n);

  const std::uint64_t bank_lines = rc.pim.rows * rc.pim.columns;
  const std::uint64_t lines =
      std::uniform_int_distribution<std::uint64_t>(1, std::min<std::uint64_t>(bank_lines, 8))(rng);
  const std::uint64_t heap_lines =
      std::uniform_int_distribution<std::uint64_t>(0, bank_lines - lines)(rng);

  TransferDescriptor& d = rc.desc;
  d.direction = dir;
  d.xfer_per_bank = lines * 64;
  d.pim_heap_base = heap_lines * 64;
  d.pim_core_ids = ids;
  // Disjoint DRAM arrays at random line-aligned slots.
  const std::uint64_t slots = rc.dram.capacity() / d.xfer_per_bank;
  std::vector<std::uint64_t> slot(slots);
  std::iota(slot.begin(), slot.end(), std::uint64_t{0});
  std::shuffle(slot.begin(), slot.end(), rng);
  for (std::uint32_t i = 0; i < n; ++i) d.dram_bases.push_back(slot[i] * d.xfer_per_bank);
  return rc;
}

}  // namespace pimmmu::testing

namespace pimmmu::testing {

SimConfig small_config(const std::vector<std::string>& extra) {
  std::vector<std::string> o{
      "dram.geometry.channels=2", "dram.geometry.ranks=1",  "dram.geometry.bankgroups=2",
      "dram.geometry.banks=2",    "dram.geometry.rows=256", "dram.geometry.columns=16",
      "pim.geometry.channels=2",  "pim.geometry.ranks=2",   "pim.geometry.bankgroups=2",
      "pim.geometry.banks=4",     "pim.geometry.rows=64",   "pim.geometry.columns=16",
      "scenario.transfer.xfer_per_bank=1024"};
  o.insert(o.end(), extra.begin(), extra.end());
  return make_config(o);
}

}  // namespace pimmmu::testing
