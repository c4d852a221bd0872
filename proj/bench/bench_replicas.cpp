#include <benchmark/benchmark.h>

#include "loopfield/coupling.hpp"
#include "loopfield/interlacement.hpp"
#include "loopfield/replicas.hpp"

using namespace loopfield;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) ? Execution::parallel : Execution::serial;
}

void BM_CoupledField(benchmark::State& state) {
  const Network net = build_box_network(2, 2, 1.0, 0.0, BoundaryMode::absorbing);
  const LoopSampler sampler(net);
  for (auto _ : state) {
    double sum = 0.0;
    run_replicas(
        4096, 1,
        [&](std::uint64_t, RandomStream& rng) {
          return couple(net, sampler.sample(0.5, rng), rng).field.values[0];
        },
        [&](std::uint64_t, double v) { sum += v; }, mode(state));
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}

void BM_StarExcursions(benchmark::State& state) {
  const StarGraph star = build_star_graph(2, 5);
  for (auto _ : state) {
    double sum = 0.0;
    run_replicas(
        1024, 2,
        [&](std::uint64_t, RandomStream& rng) {
          return sample_star_excursions(star, 1.0, rng).occupation[0];
        },
        [&](std::uint64_t, double v) { sum += v; }, mode(state));
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}

void BM_FieldSamples(benchmark::State& state) {
  const GreenOperator gop(build_box_network(2, 8, 1.0, 0.0, BoundaryMode::absorbing));
  for (auto _ : state) {
    double sum = 0.0;
    run_replicas(
        2048, 3, [&](std::uint64_t, RandomStream& rng) { return sample_gff(gop, rng).values[0]; },
        [&](std::uint64_t, double v) { sum += v; }, mode(state));
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 2048);
}

}  // namespace

BENCHMARK(BM_CoupledField)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StarExcursions)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldSamples)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
