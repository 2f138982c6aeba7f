#include <benchmark/benchmark.h>

#include "hubergd/data.hpp"
#include "hubergd/model.hpp"
#include "hubergd/oracles.hpp"
#include "hubergd/rng.hpp"
#include "hubergd/verify.hpp"

namespace {

using namespace hubergd;

oracles::Instance make(std::size_t p, std::size_t d, std::size_t n) {
  Rng rng(7);
  return oracles::random_instance(rng, p, d, n, 1.0 / std::sqrt(static_cast<double>(p)));
}

void BM_Evaluate(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto inst = make(p, 11, 128);
  const Activation act = Activation::huberized(1.0 / static_cast<double>(p));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(inst.V, inst.data, act));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * p * 128));
}
BENCHMARK(BM_Evaluate)->RangeMultiplier(4)->Range(64, 16384);

void BM_EvaluateReference(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto inst = make(p, 11, 128);
  const Activation act = Activation::huberized(1.0 / static_cast<double>(p));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::loss(inst.V, inst.data, act));
    benchmark::DoNotOptimize(reference::grad(inst.V, inst.data, act));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * p * 128));
}
BENCHMARK(BM_EvaluateReference)->RangeMultiplier(4)->Range(64, 16384);

void BM_Hvp(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto inst = make(p, 11, 128);
  const Activation act = Activation::huberized(1.0 / static_cast<double>(p));
  const ParamMatrix w = inst.V;
  for (auto _ : state) benchmark::DoNotOptimize(hvp(inst.V, inst.data, w, act));
}
BENCHMARK(BM_Hvp)->RangeMultiplier(4)->Range(64, 16384);

void BM_CaptureSets(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto inst = make(p, 11, 128);
  for (auto _ : state) benchmark::DoNotOptimize(capture_sets(inst.V, inst.data, 1.0 / p, 0.01));
}
BENCHMARK(BM_CaptureSets)->RangeMultiplier(4)->Range(64, 16384);

}  // namespace

BENCHMARK_MAIN();
