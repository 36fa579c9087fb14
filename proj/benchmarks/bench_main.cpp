#include <benchmark/benchmark.h>

#include <pathprob/pathprob.hpp>

using namespace pathprob;

namespace {

const BandLimitedPotential weak = BandLimitedPotential::cosine(0.1, 1.0);
const BandLimitedPotential three = BandLimitedPotential::from_lines({{2.0, 0.3, 0.4}, {1.3, 0.5, -1.0}, {0.7, 0.2, 2.0}});

void BM_StepM(benchmark::State& state) {
  double z = 0.3, acc = 0;
  for (auto _ : state) {
    acc += step_m(three, z, 0.7, 0.1);
    z += 1e-3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_StepM);

void BM_StepQExponential(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(step_q_exponential(weak, 0.3, 0.7, eps, 0.1));
}
BENCHMARK(BM_StepQExponential)->Arg(25)->Arg(200);

void BM_PathLogWeight(benchmark::State& state) {
  LatticeConfig c{0, 1, static_cast<int>(state.range(0)), 0.1, 0, 0};
  SplitMix64 rng(1);
  Path p = straight_path(c);
  for (int j = 1; j < c.n; ++j) p.z[j] += rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(path_log_weight(three, p.z, c));
  state.SetItemsProcessed(state.iterations() * (c.n - 1));
}
BENCHMARK(BM_PathLogWeight)->Arg(16)->Arg(1024);

void BM_Quadrature(benchmark::State& state) {
  LatticeConfig c{0, 1, static_cast<int>(state.range(0)), 0.1, 0, 0};
  for (auto _ : state)
    benchmark::DoNotOptimize(transition_probability_quadrature(weak, c, default_window(c), 65).value);
}
BENCHMARK(BM_Quadrature)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  LatticeConfig c{0, 1, static_cast<int>(state.range(0)), 0.1, 0, 0};
  SamplerConfig sc;
  sc.samples = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_transition_mc(weak, c, sc).estimate.value);
  state.SetItemsProcessed(state.iterations() * sc.samples);
}
BENCHMARK(BM_MonteCarlo)->Arg(4)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  auto g0 = gaussian_state(30, static_cast<std::size_t>(state.range(0)), 0.0, 0.5);
  const double dt = max_stable_dt(g0, weak);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(g0, weak, 0.1, dt).psi[0]);
}
BENCHMARK(BM_Propagate)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
