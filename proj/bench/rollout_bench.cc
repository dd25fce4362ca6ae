// Frozen-policy evaluation: serial reference vs the OpenMP kernel.
// Both produce identical records; only wall time differs.

#include <benchmark/benchmark.h>

#include "edge_forge/config.h"
#include "edge_forge/rollout.h"

namespace {

using namespace edge_forge;

template <auto Evaluate>
void BM_Evaluate(benchmark::State& state) {
  const ExperimentConfig config;
  const ReferenceCas sut(config.sut);
  const Mlp net = mlp_init(config.neural.layer_dims, 1);
  const int episodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto records = Evaluate(net, config, sut, episodes, 999);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(state.iterations() * episodes);
}

BENCHMARK(BM_Evaluate<evaluate_policy_serial>)
    ->Name("evaluate/serial")
    ->Arg(16)->Arg(128)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Evaluate<evaluate_policy_parallel>)
    ->Name("evaluate/openmp")
    ->Arg(16)->Arg(128)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
