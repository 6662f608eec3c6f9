// Microbenchmarks for the hot paths: rollout, residual evaluation, the two
// identification stages, the exhaustive threshold search, and KDE.

#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "cogrel/continuous_id.hpp"
#include "cogrel/kde.hpp"
#include "cogrel/model.hpp"
#include "cogrel/rng.hpp"
#include "cogrel/synth.hpp"
#include "cogrel/threshold_id.hpp"

namespace {

cogrel::SynthSpec bench_spec() {
  cogrel::SynthSpec spec;
  spec.horizon = 400;
  spec.report_period = 10;
  for (int s = 40; s <= 400; s += 40) spec.complexity_switches.push_back(s);
  spec.initial = {0.55, 0.45, 0.3};
  spec.initial_q = 0;
  spec.model.trust = {0.90, -0.04, 0.05};
  spec.model.risk = {0.85, 0.06, 0.06};
  spec.model.workload = {0.80, 0.15, 0.05};
  spec.model.thresholds = {0.55, 0.25, 0.6};
  return spec;
}

const cogrel::Trajectory& bench_trajectory() {
  static const cogrel::Trajectory traj =
      cogrel::synthesize(bench_spec()).first;
  return traj;
}

void BM_simulate(benchmark::State& state) {
  const auto spec = bench_spec();
  const auto& traj = bench_trajectory();
  for (auto _ : state) {
    auto sim = cogrel::simulate(spec.initial, spec.initial_q, traj.complexity,
                                spec.model);
    benchmark::DoNotOptimize(sim.states.data());
  }
}
BENCHMARK(BM_simulate);

void BM_error_trace(benchmark::State& state) {
  const auto& traj = bench_trajectory();
  const cogrel::AffineParams p{0.9, -0.04, 0.05};
  for (auto _ : state) {
    auto trace = cogrel::error_trace(cogrel::Channel::trust, traj, p);
    benchmark::DoNotOptimize(trace.norm());
  }
}
BENCHMARK(BM_error_trace);

void BM_fit_channel(benchmark::State& state) {
  const auto& traj = bench_trajectory();
  for (auto _ : state) {
    auto fit = cogrel::fit_channel(cogrel::Channel::trust, traj);
    benchmark::DoNotOptimize(fit.cost);
  }
}
BENCHMARK(BM_fit_channel)->Unit(benchmark::kMillisecond);

void BM_fit_thresholds(benchmark::State& state) {
  const auto spec = bench_spec();
  const auto& traj = bench_trajectory();
  const std::array<cogrel::AffineParams, 3> channels{
      spec.model.trust, spec.model.risk, spec.model.workload};
  for (auto _ : state) {
    auto fit = cogrel::fit_thresholds(traj, channels);
    benchmark::DoNotOptimize(fit.accuracy);
  }
}
BENCHMARK(BM_fit_thresholds)->Unit(benchmark::kMillisecond);

void BM_grid_oracle(benchmark::State& state) {
  const auto spec = bench_spec();
  const auto& traj = bench_trajectory();
  const std::array<cogrel::AffineParams, 3> channels{
      spec.model.trust, spec.model.risk, spec.model.workload};
  for (auto _ : state) {
    auto fit = cogrel::grid_oracle(traj, channels, 0.02);
    benchmark::DoNotOptimize(fit.accuracy);
  }
}
BENCHMARK(BM_grid_oracle)->Unit(benchmark::kMillisecond);

void BM_kde(benchmark::State& state) {
  cogrel::Rng rng(7);
  std::vector<double> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(rng.normal(0.8, 0.1));
  const auto grid = cogrel::auto_grid(samples);
  for (auto _ : state) {
    auto curve = cogrel::kde(samples, grid);
    benchmark::DoNotOptimize(curve.density.data());
  }
}
BENCHMARK(BM_kde);

}  // namespace

BENCHMARK_MAIN();
