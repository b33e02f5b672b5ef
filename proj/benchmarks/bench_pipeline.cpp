#include <benchmark/benchmark.h>

#include "balloonscope/control/executor.hpp"
#include "balloonscope/estimation/calibration.hpp"
#include "balloonscope/harness/experiments.hpp"
#include "balloonscope/imaging/scene.hpp"
#include "balloonscope/imaging/sensing.hpp"

namespace bs = balloonscope;

namespace {

bs::imaging::SceneModel noisy_scene() {
  bs::imaging::SceneModel s;
  s.noise_amplitude = 1.0;
  s.jitter_px = 0.25;
  return s;
}

void BM_Render(benchmark::State& state) {
  const auto scene = noisy_scene();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bs::imaging::render_frame(60.0, scene, ++seed));
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

void BM_Sense(benchmark::State& state) {
  const auto frame = bs::imaging::render_frame(static_cast<double>(state.range(0)), noisy_scene(), 1);
  const bs::imaging::SensingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(bs::imaging::sense(frame, cfg));
}
BENCHMARK(BM_Sense)->Arg(0)->Arg(60)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  std::vector<bs::estimation::CalibrationSample> samples;
  for (int a = 0; a <= 100; a += 5) samples.push_back({double(a), 0.03 + 0.00114 * a + 1.0e-5 * a * a});
  for (auto _ : state) benchmark::DoNotOptimize(bs::estimation::fit_calibration(samples, 4));
}
BENCHMARK(BM_Fit);

void BM_EstimateAngle(benchmark::State& state) {
  const auto cal = bs::harness::obtain_calibration(bs::harness::Scenario{});
  double p = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bs::estimation::estimate_angle(cal, p));
    p = p > 0.24 ? 0.05 : p + 0.001;
  }
}
BENCHMARK(BM_EstimateAngle);

// One simulated second of the closed loop: 30 render/sense ticks, 1000 plant steps.
void BM_ClosedLoopSecond(benchmark::State& state) {
  const auto cfg = bs::harness::default_config();
  const auto setup = bs::harness::noisy_setup(cfg);
  const auto cal = bs::harness::obtain_calibration(bs::harness::Scenario{});
  const auto start = bs::plant::initial_state(setup.plant, 0.8);
  const std::vector<bs::control::ControlCommand> script{bs::control::ControlCommand::set_angle(0.0, 60.0)};
  for (auto _ : state) benchmark::DoNotOptimize(bs::control::run_closed_loop(setup, cal, start, script, 1.0, 1));
}
BENCHMARK(BM_ClosedLoopSecond)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
