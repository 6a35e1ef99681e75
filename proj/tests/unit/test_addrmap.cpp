#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>
#include <tuple>

#include "oracles.hpp"
#include "pimmmu/addrmap.hpp"

namespace pimmmu {
namespace {

Geometry table_dram() {
  Geometry g;
  g.channels = 4;
  g.ranks = 2;
  g.bankgroups = 4;
  g.banks = 4;
  g.rows = 4096;
  g.columns = 128;
  return g;
}

Geometry small(std::uint32_t ch, std::uint32_t ra, std::uint32_t bg, std::uint32_t bk,
               std::uint64_t rows, std::uint32_t cols) {
  Geometry g;
  g.channels = ch;
  g.ranks = ra;
  g.bankgroups = bg;
  g.banks = bk;
  g.rows = rows;
  g.columns = cols;
  return g;
}

void expect_bijective(const MappingFunction& fn) {
  const std::uint64_t line = fn.geometry().line_bytes;
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t, std::uint64_t,
                      std::uint32_t>>
      seen;
  for (PhysAddr a = 0; a < fn.capacity(); a += line) {
    const DramCoord c = fn.decode(a + 5);
    ASSERT_EQ(c.byte_offset, 5u);
    ASSERT_EQ(fn.encode(c), a + 5) << to_string(c);
    seen.emplace(c.channel, c.rank, c.bankgroup, c.bank, c.row, c.column);
  }
  EXPECT_EQ(seen.size(), fn.capacity() / line);
}

TEST(Geometry, RejectsNonPowerOfTwoNamingTheField) {
  Geometry g = table_dram();
  g.banks = 3;
  g.rows = 1000;
  const auto errors = g.validate();
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_NE(errors[0].find("banks"), std::string::npos);
  EXPECT_NE(errors[1].find("rows"), std::string::npos);
}

TEST(Geometry, CapacityIsProductOfFields) {
  const Geometry g = table_dram();
  EXPECT_EQ(g.capacity(), 4ull * 2 * 4 * 4 * 4096 * 128 * 64);
  EXPECT_EQ(g.total_banks(), 128u);
}

TEST(LocalityCentric, DecodeIsPlainSlicing) {
  const Geometry g = small(2, 2, 2, 4, 8, 16);
  const auto fn = MappingFunction::locality_centric(g);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const PhysAddr a = rng() % g.capacity();
    std::uint64_t v = a;
    DramCoord want;
    want.byte_offset = static_cast<std::uint32_t>(v % 64); v /= 64;
    want.column = static_cast<std::uint32_t>(v % 16); v /= 16;
    want.row = v % 8; v /= 8;
    want.bank = static_cast<std::uint32_t>(v % 4); v /= 4;
    want.bankgroup = static_cast<std::uint32_t>(v % 2); v /= 2;
    want.rank = static_cast<std::uint32_t>(v % 2); v /= 2;
    want.channel = static_cast<std::uint32_t>(v);
    EXPECT_EQ(fn.decode(a), want);
  }
}

TEST(LocalityCentric, WholeBankIsOneContiguousRange) {
  const Geometry g = small(2, 2, 2, 2, 8, 8);
  const auto fn = MappingFunction::locality_centric(g);
  for (PhysAddr a = 0; a < g.capacity(); a += 64) {
    const DramCoord c = fn.decode(a);
    const std::uint64_t ordinal =
        ((std::uint64_t{c.channel} * g.ranks + c.rank) * g.bankgroups + c.bankgroup) * g.banks +
        c.bank;
    EXPECT_EQ(ordinal, testing::bank_ordinal_oracle(g, a));
  }
}

TEST(MlpCentric, ChannelParityExample) {
  // Channel bit at position 6, mask selecting bits 9 and 12.
  const Geometry g = small(2, 1, 2, 2, 16, 8);
  const auto fn = MappingFunction::mlp_centric(g, {(1u << 9) | (1u << 12)}, false);
  EXPECT_EQ(fn.channel_lsb(), 6u);
  EXPECT_EQ(fn.decode(0x0040).channel, 1u);
  EXPECT_EQ(fn.decode(0x0240).channel, 0u);
}

TEST(MlpCentric, RejectsMaskTouchingTheChannelField) {
  const Geometry g = small(2, 1, 2, 2, 16, 8);
  EXPECT_THROW(MappingFunction::mlp_centric(g, {1u << 6}), std::invalid_argument);
  EXPECT_THROW(MappingFunction::mlp_centric(g, {1u << 9, 1u << 10}), std::invalid_argument);
}

TEST(MlpCentric, AlignedLineWindowsCoverEveryChannel) {
  // Hash inputs sit above the channel field, so they are constant across a
  // channel-aligned window.
  const Geometry g = table_dram();
  const auto fn = MappingFunction::mlp_centric(g);
  std::mt19937_64 rng(3);
  const std::uint64_t window = std::uint64_t{g.channels} * 64;
  for (int i = 0; i < 2000; ++i) {
    const PhysAddr start = (rng() % (g.capacity() / window)) * window;
    std::set<std::uint32_t> chans;
    for (std::uint32_t k = 0; k < g.channels; ++k) chans.insert(fn.channel_of(start + k * 64));
    EXPECT_EQ(chans.size(), g.channels) << "window at " << start;
  }
}

TEST(MlpCentric, SequentialStreamIsChannelBalanced) {
  const Geometry g = table_dram();
  const auto fn = MappingFunction::mlp_centric(g);
  std::vector<PhysAddr> addrs;
  for (PhysAddr a = 0; a < (8u << 20); a += 64) addrs.push_back(a);
  const auto counts = channel_balance(addrs, fn);
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  ASSERT_GT(*lo, 0u);
  EXPECT_LE(static_cast<double>(*hi) / static_cast<double>(*lo), 1.01);
}

TEST(MlpCentric, BankHashSpreadsPowerOfTwoStrides) {
  const Geometry g = table_dram();
  const auto hashed = MappingFunction::mlp_centric(g, {}, true);
  const auto plain = MappingFunction::mlp_centric(g, {}, false);
  auto banks_touched = [&](const MappingFunction& fn) {
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t>> banks;
    for (std::uint64_t i = 0; i < 64; ++i) {
      const DramCoord c = fn.decode(i << 19);
      banks.emplace(c.channel, c.rank, c.bankgroup, c.bank);
    }
    return banks.size();
  };
  EXPECT_EQ(banks_touched(hashed), 64u);
  EXPECT_LT(banks_touched(plain), 16u);
}

TEST(MappingRoundTrip, ExhaustiveOnSmallGeometries) {
  for (const Geometry& g : {small(1, 1, 1, 1, 1, 1), small(2, 1, 1, 1, 4, 4),
                            small(4, 2, 2, 2, 8, 8), small(2, 2, 4, 4, 16, 4),
                            small(1, 2, 1, 8, 2, 32)}) {
    expect_bijective(MappingFunction::locality_centric(g));
    expect_bijective(MappingFunction::mlp_centric(g, {}, false));
    expect_bijective(MappingFunction::mlp_centric(g, {}, true));
  }
}

TEST(MappingRoundTrip, RandomMasksStayInvertible) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Geometry g = testing::random_geometry(rng, 4);
    const auto probe = MappingFunction::mlp_centric(g, {}, false);
    const unsigned upper = probe.channel_lsb() + static_cast<unsigned>(std::countr_zero(g.channels));
    const unsigned bits = g.address_bits();
    std::vector<std::uint64_t> masks;
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(std::countr_zero(g.channels)); ++i) {
      std::uint64_t m = 0;
      while (m == 0 && upper < bits) {
        m = rng() & (((std::uint64_t{1} << bits) - 1) & ~((std::uint64_t{1} << upper) - 1));
      }
      masks.push_back(m);
    }
    if (upper >= bits && !masks.empty()) continue;
    expect_bijective(MappingFunction::mlp_centric(g, masks, trial % 2 == 0));
  }
}

TEST(MappingErrors, OutOfRangeNamesTheProblem) {
  const auto fn = MappingFunction::locality_centric(small(2, 1, 1, 2, 4, 4));
  EXPECT_THROW(fn.decode(fn.capacity()), std::out_of_range);
  DramCoord c;
  c.bank = 2;
  try {
    fn.encode(c);
    FAIL() << "expected out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("bank"), std::string::npos);
  }
}

TEST(HetMap, RoutesByPartitionBoundary) {
  const Geometry dram = small(2, 1, 2, 2, 8, 8);
  const Geometry pim = small(2, 1, 2, 4, 8, 8);
  const HetMap map(MappingFunction::mlp_centric(dram), MappingFunction::locality_centric(pim));
  EXPECT_EQ(map.pim_base(), dram.capacity());
  EXPECT_EQ(map.total_bytes(), dram.capacity() + pim.capacity());
  for (PhysAddr a = 0; a < map.total_bytes(); a += 64) {
    const RoutedAddress r = map.route(a);
    if (a < map.pim_base()) {
      ASSERT_EQ(r.region, Region::Dram);
      ASSERT_EQ(r.coord, map.dram_fn().decode(a));
    } else {
      ASSERT_EQ(r.region, Region::Pim);
      ASSERT_EQ(r.coord, map.pim_fn().decode(a - map.pim_base()));
    }
  }
  EXPECT_THROW(map.route(map.total_bytes()), std::out_of_range);
}

}  // namespace
}  // namespace pimmmu
