#include <benchmark/benchmark.h>

#include "gzi/estimator.hpp"
#include "gzi/oracle.hpp"

using namespace gzi;

namespace {

const Theta kXom{0.79, 0.58, 0.17, 0.024, 0.44, 1.13};

void BM_Varpi(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(varpi(200.0, t, kXom));
    t += 1e-9;
  }
}
BENCHMARK(BM_Varpi);

void BM_Sse(benchmark::State& state) {
  const SampleSet s = synthetic_samples(kXom, static_cast<std::size_t>(state.range(0)), {}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sse(s, kXom));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sse)->Arg(100000);

void BM_SseDerivatives(benchmark::State& state) {
  const SampleSet s = synthetic_samples(kXom, static_cast<std::size_t>(state.range(0)), {}, 1);
  const Upsilon u = theta_to_upsilon(kXom);
  for (auto _ : state) benchmark::DoNotOptimize(sse_derivatives(s, u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SseDerivatives)->Arg(100000);

void BM_Fit(benchmark::State& state) {
  const SampleSet s = synthetic_samples(kXom, static_cast<std::size_t>(state.range(0)), {}, 1);
  FitOptions o;
  o.starts = 4;
  for (auto _ : state) benchmark::DoNotOptimize(fit(s, o));
}
BENCHMARK(BM_Fit)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Covariance(benchmark::State& state) {
  const SampleSet s = synthetic_samples(kXom, 100000, {}, 1);
  const Upsilon u = theta_to_upsilon(kXom);
  for (auto _ : state) benchmark::DoNotOptimize(covariance(s, u));
}
BENCHMARK(BM_Covariance)->Unit(benchmark::kMillisecond);

}  // namespace
