#include <benchmark/benchmark.h>

#include "brwre/experiments.hpp"
#include "brwre/parallel.hpp"
#include "brwre/particles.hpp"
#include "brwre/polymer.hpp"

using namespace brwre;

namespace {

const EnvironmentLaw& law() {
  static const auto l = EnvironmentLaw::from_raw({{0.5, {0.0, 0.0, 1.0}}, {0.5, {0.5, 0.5}}});
  return l;
}

// A populated field to step from: 30 generations of the process.
Configuration warm_field(const QuenchedEnvironment& env) {
  Configuration f = Configuration::single(Site{}, 20);
  for (std::uint32_t t = 0; t < 30; ++t) f = step(env, t, f, TruncationBox::none(), 1, 1u << 12);
  return f;
}

void BM_StepFast(benchmark::State& state) {
  parallel::set_threads(static_cast<int>(state.range(0)));
  const QuenchedEnvironment env(law(), 3, 2);
  const auto field = warm_field(env);
  for (auto _ : state) benchmark::DoNotOptimize(step(env, 30, field, TruncationBox::none(), 7));
  state.counters["particles"] = static_cast<double>(field.total());
  parallel::set_threads(0);
}
BENCHMARK(BM_StepFast)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_StepReference(benchmark::State& state) {
  const QuenchedEnvironment env(law(), 3, 2);
  const auto field = warm_field(env);
  for (auto _ : state) benchmark::DoNotOptimize(reference::step(env, 30, field, TruncationBox::none(), 7));
  state.counters["particles"] = static_cast<double>(field.total());
}
BENCHMARK(BM_StepReference)->Unit(benchmark::kMillisecond);

void BM_PolymerDense(benchmark::State& state) {
  parallel::set_threads(static_cast<int>(state.range(1)));
  const QuenchedEnvironment env(law(), 5, 2);
  const auto t = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(partition_function(env, t).log_z);
  parallel::set_threads(0);
}
BENCHMARK(BM_PolymerDense)->Args({100, 1})->Args({100, 4})->Args({200, 1})->Unit(benchmark::kMillisecond);

void BM_PolymerSparse(benchmark::State& state) {
  const QuenchedEnvironment env(law(), 5, 2);
  const auto t = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::partition_function(env, t).log_z);
}
BENCHMARK(BM_PolymerSparse)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SurvivalReplicas(benchmark::State& state) {
  parallel::set_threads(static_cast<int>(state.range(0)));
  SurvivalOptions opt;
  opt.replicas = 200;
  opt.horizon = 100;
  opt.cap = 10000;
  for (auto _ : state)
    benchmark::DoNotOptimize(survival_probability(law(), Configuration::single(Site{}), 1, opt, 1).estimate.mean);
  parallel::set_threads(0);
}
BENCHMARK(BM_SurvivalReplicas)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
