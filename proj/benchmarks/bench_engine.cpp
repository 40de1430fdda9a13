#include <benchmark/benchmark.h>

#include "gzi/engine.hpp"

using namespace gzi;

namespace {

ModelSpec gzi_spec(int n) {
  GziParams g;
  g.theta = 1.0;
  g.kappa = 0.79;
  g.rho = 1.13;
  g.lambda = 0.17;
  g.varrho = 0.01;
  g.eta = 0.44;
  g.gamma = 0.58;
  g.alpha = 0.976;
  return ModelSpec::gzi_model(n, g);
}

void BM_SimulatorStep(benchmark::State& state) {
  Simulator sim(gzi_spec(static_cast<int>(state.range(0))), 1);
  for (int i = 0; i < 100000; ++i) sim.step();
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorStep)->Arg(50)->Arg(200)->Arg(1000);

void BM_SmithStep(benchmark::State& state) {
  Simulator sim(ModelSpec::smith_bounded(static_cast<int>(state.range(0)), 1.0, 0.5, 0.2), 1);
  for (int i = 0; i < 100000; ++i) sim.step();
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SmithStep)->Arg(50)->Arg(1000);

// The O(n) reference stepper, for comparison.
void BM_ReferenceStep(benchmark::State& state) {
  const ModelSpec spec = gzi_spec(static_cast<int>(state.range(0)));
  Simulator warm(spec, 1);
  for (int i = 0; i < 100000; ++i) warm.step();
  BookState s = warm.state();
  Rng rng(2);
  for (auto _ : state) {
    auto r = step(s, spec, rng);
    s = r->state;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ReferenceStep)->Arg(50)->Arg(200);

void BM_SimulateTrace(benchmark::State& state) {
  const ModelSpec spec = gzi_spec(200);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, StopRule{1000000, 0.0}, 3));
  state.SetItemsProcessed(state.iterations() * 1000000);
}
BENCHMARK(BM_SimulateTrace)->Unit(benchmark::kMillisecond);

}  // namespace
