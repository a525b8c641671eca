// Parallel record batch vs the serial reference, and heap vs naive trace
// construction. Thread count follows HARDSHIFT_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "hardshift/batch.hpp"
#include "hardshift/transform.hpp"

using namespace hardshift;

namespace {

struct Fixture {
  ModelParams params;
  std::vector<Configuration> samples;
};

const Fixture& fixture(int n) {
  static std::vector<std::pair<int, Fixture>> cache;
  for (const auto& [k, f] : cache) {
    if (k == n) return f;
  }
  Fixture f;
  f.params = derive_params(n, 0.5, 0.5);
  f.samples = sample(f.params, boundary_triangular(n, 1.1), {150, 32, 2}, 7);
  cache.emplace_back(n, std::move(f));
  return cache.back().second;
}

RecordOptions options(const ModelParams& p) {
  RecordOptions ro;
  ro.functions = default_test_functions(p);
  return ro;
}

void BM_RecordBatchParallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const RecordOptions ro = options(f.params);
  for (auto _ : state) benchmark::DoNotOptimize(record_batch(f.samples, f.params, ro));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
  state.counters["threads"] = worker_threads();
}

void BM_RecordBatchSerial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const RecordOptions ro = options(f.params);
  for (auto _ : state) benchmark::DoNotOptimize(record_batch_serial(f.samples, f.params, ro));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

void BM_BuildHeap(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (const auto& c : f.samples) benchmark::DoNotOptimize(build_forward(c, f.params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

void BM_BuildNaive(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (const auto& c : f.samples) benchmark::DoNotOptimize(build_forward_naive(c, f.params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.samples.size()));
}

void BM_Sweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GibbsChain chain(n, 0.5, boundary_triangular(n, 1.1), 3);
  for (int i = 0; i < 150; ++i) chain.sweep();
  chain.freeze_sweep_length();
  for (auto _ : state) chain.sweep();
  state.counters["particles"] = static_cast<double>(chain.count());
}

}  // namespace

BENCHMARK(BM_RecordBatchParallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RecordBatchSerial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BuildHeap)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildNaive)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
