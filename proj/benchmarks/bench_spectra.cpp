#include <benchmark/benchmark.h>

#include <qnoise/qnoise.hpp>

using namespace qnoise;

namespace {

HybridParams stable_hybrid() {
  const double xi_m = impedance_match(0.04, 0.5, 0.0);
  return HybridParams::from_cooperativities(0.04, 0.5, xi_m, 0.0, 10.0, 1.0, 1.0);
}

void BM_LtiSpectrum6x6(benchmark::State& state) {
  const auto sys = build_drift(stable_hybrid());
  const auto grid = linspace(-3.0, 3.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lti_spectrum(sys, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LtiSpectrum6x6)->Arg(100)->Arg(1000);

void BM_ParametricClosedElements(benchmark::State& state) {
  const auto p = stable_hybrid();
  double w = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(response_and_noise(w, p));
    w += 1e-3;
  }
}
BENCHMARK(BM_ParametricClosedElements);

void BM_CqncExactAssembly(benchmark::State& state) {
  CqncParams p;
  p.omega_m = 1.0;
  p.gamma_m = 0.05;
  p.kappa = 4.0;
  p.g = p.G = 0.4;
  p.Gamma = 0.05;
  const auto sq = SqueezedInput::pure(10.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(force_noise_exact(1.01, p, sq));
}
BENCHMARK(BM_CqncExactAssembly);

void BM_QndPumpMinimization(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(minimize_n_add_over_pump(1.0, 0.5, 5e-4, 1e-3));
}
BENCHMARK(BM_QndPumpMinimization);

void BM_OracleSimulateOu(benchmark::State& state) {
  LinearSystem s;
  s.drift = RMatrix::Constant(1, 1, -0.5);
  s.noise_in = RMatrix::Constant(1, 1, 1.0);
  s.corr = CMatrix::Constant(1, 1, 0.5);
  SdeRun run;
  run.system = s;
  run.dt = 0.05;
  run.duration = 400;
  run.n_trajectories = 8;
  run.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(run));
  state.SetItemsProcessed(state.iterations() * 8 * 8000);
}
BENCHMARK(BM_OracleSimulateOu);

}  // namespace

BENCHMARK_MAIN();
