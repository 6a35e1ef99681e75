#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pimmmu/addrmap.hpp"
#include "pimmmu/transfer.hpp"

namespace {

using namespace pimmmu;

Geometry dram_geometry() {
  Geometry g;
  g.channels = 4;
  g.ranks = 2;
  g.bankgroups = 4;
  g.banks = 4;
  g.rows = 4096;
  g.columns = 128;
  return g;
}

std::vector<PhysAddr> random_lines(std::uint64_t capacity, std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<PhysAddr> out(n);
  for (auto& a : out) a = (rng() % (capacity / 64)) * 64;
  return out;
}

void BM_DecodeLocality(benchmark::State& state) {
  const auto fn = MappingFunction::locality_centric(dram_geometry());
  const auto addrs = random_lines(fn.capacity(), 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn.decode(addrs[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecodeLocality);

void BM_DecodeMlp(benchmark::State& state) {
  const auto fn = MappingFunction::mlp_centric(dram_geometry(), {}, state.range(0) != 0);
  const auto addrs = random_lines(fn.capacity(), 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn.decode(addrs[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecodeMlp)->Arg(0)->Arg(1);

void BM_EncodeMlp(benchmark::State& state) {
  const auto fn = MappingFunction::mlp_centric(dram_geometry());
  std::vector<DramCoord> coords;
  for (PhysAddr a : random_lines(fn.capacity(), 4096)) coords.push_back(fn.decode(a));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn.encode(coords[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EncodeMlp);

void BM_Transpose(benchmark::State& state) {
  TransposeBlock b;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<std::uint8_t>(i * 13);
  for (auto _ : state) {
    b = transpose(b);
    benchmark::DoNotOptimize(b);
  }
  state.SetBytesProcessed(state.iterations() * 64);
}
BENCHMARK(BM_Transpose);

}  // namespace
