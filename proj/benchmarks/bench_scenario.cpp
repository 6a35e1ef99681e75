#include <benchmark/benchmark.h>

#include "pimmmu/config.hpp"
#include "pimmmu/engine.hpp"

namespace {

using namespace pimmmu;

// A full transfer through the DCE or the host model on the default geometry.
void BM_Transfer(benchmark::State& state) {
  const bool dce = state.range(0) != 0;
  const std::uint64_t xfer = static_cast<std::uint64_t>(state.range(1));
  const SimConfig cfg = make_config({
      "verify_data=false",
      "scenario.kind=cpu_dpu",
      std::string("scenario.transfer.engine=") + (dce ? "dce" : "host"),
      "scenario.transfer.xfer_per_bank=" + std::to_string(xfer),
  });
  double ns = 0;
  for (auto _ : state) {
    const SimReport r = run_scenario(cfg);
    ns = r.elapsed_ns;
    benchmark::DoNotOptimize(r);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(xfer) * 512);
  state.counters["simulated_ns"] = ns;
}
BENCHMARK(BM_Transfer)
    ->ArgsProduct({{0, 1}, {2048, 16384}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
