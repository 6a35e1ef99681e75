#include <benchmark/benchmark.h>

#include <random>

#include "pimmmu/controller.hpp"

namespace {

using namespace pimmmu;

Geometry channel_geometry() {
  Geometry g;
  g.channels = 1;
  g.ranks = 2;
  g.bankgroups = 4;
  g.banks = 4;
  g.rows = 4096;
  g.columns = 128;
  return g;
}

// Keeps the queues full of reads (range 0) or a 2:1 read/write mix and ticks
// until `lines` requests completed. Row locality: range 1 lines per row visit.
void BM_ControllerStream(benchmark::State& state) {
  const Geometry g = channel_geometry();
  const bool mixed = state.range(0) != 0;
  const std::uint32_t run = static_cast<std::uint32_t>(state.range(1));
  constexpr std::uint64_t lines = 20000;
  std::uint64_t cycles = 0;
  for (auto _ : state) {
    Controller ctl(0, g, TimingParams{}, ControllerParams{});
    std::uint64_t done = 0;
    ctl.set_completion_handler([&](const Completion&) { ++done; });
    std::mt19937_64 rng(5);
    std::uint64_t issued = 0, now = 0;
    MemRequest next;
    auto refill = [&] {
      next.kind = mixed && issued % 3 == 2 ? ReqKind::Write : ReqKind::Read;
      next.bytes = 64;
      next.tag = issued;
      if (issued % run == 0) {
        next.coord.rank = static_cast<std::uint32_t>(rng() % g.ranks);
        next.coord.bankgroup = static_cast<std::uint32_t>(rng() % g.bankgroups);
        next.coord.bank = static_cast<std::uint32_t>(rng() % g.banks);
        next.coord.row = rng() % g.rows;
        next.coord.column = 0;
      } else {
        next.coord.column = (next.coord.column + 1) % g.columns;
      }
    };
    refill();
    while (done < lines) {
      while (issued < lines && ctl.can_accept(next.kind)) {
        ctl.enqueue(next, now);
        ++issued;
        refill();
      }
      ctl.tick(now++);
    }
    cycles += now;
  }
  state.SetItemsProcessed(state.iterations() * lines);
  state.counters["dram_cycles/line"] =
      benchmark::Counter(static_cast<double>(cycles) / static_cast<double>(state.iterations() * lines));
}
BENCHMARK(BM_ControllerStream)
    ->ArgsProduct({{0, 1}, {1, 16}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
