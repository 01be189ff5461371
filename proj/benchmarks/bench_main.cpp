#include <benchmark/benchmark.h>

#include <random>

#include "ionpulse/chain_model.hpp"
#include "ionpulse/cost.hpp"
#include "ionpulse/dynamics_oracle.hpp"
#include "ionpulse/noise_sweep.hpp"
#include "ionpulse/optimizer.hpp"

using namespace ionpulse;

namespace {

struct Default {
  ChainModel chain = build_chain(TrapConfig{});
  DriveConfig drive{to_angular(3.15e6), 0.0};
  PulseLayout layout = PulseLayout::standard(4, 100e-6, to_angular(2e6), {0, 2});
  ParamVector x = initial_point(layout, OptimizerConfig{}, 0);
  PulseSchedule pulse = build_schedule(x, layout);
};

const Default& fixture() {
  static const Default d;
  return d;
}

void BM_BuildChain(benchmark::State& state) {
  TrapConfig t;
  t.ion_count = static_cast<int>(state.range(0));
  t.transverse_freq_hz = 20e6;
  for (auto _ : state) benchmark::DoNotOptimize(build_chain(t));
}
BENCHMARK(BM_BuildChain)->Arg(4)->Arg(16);

void BM_EvaluateCouplings(benchmark::State& state) {
  const Default& d = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_couplings(d.pulse, d.chain, d.drive));
}
BENCHMARK(BM_EvaluateCouplings);

void BM_KernelEvaluate(benchmark::State& state) {
  const Default& d = fixture();
  const CouplingKernel k(d.chain, d.drive, 20, 100e-6, {0, 2});
  const auto w = CouplingKernel::weights_of(d.pulse);
  for (auto _ : state) benchmark::DoNotOptimize(k.evaluate(w));
}
BENCHMARK(BM_KernelEvaluate);

void BM_CostGradient(benchmark::State& state) {
  const Default& d = fixture();
  const CostFunction cost(d.layout, d.chain, d.drive, CostSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(cost.gradient(d.x.values));
}
BENCHMARK(BM_CostGradient);

void BM_Residuals(benchmark::State& state) {
  const Default& d = fixture();
  const CostFunction cost(d.layout, d.chain, d.drive, CostSpec{});
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  for (auto _ : state) {
    cost.residuals(d.x.values, r, &j);
    benchmark::DoNotOptimize(j.data());
  }
}
BENCHMARK(BM_Residuals);

void BM_OptimizeOneRestart(benchmark::State& state) {
  const Default& d = fixture();
  OptimizerConfig cfg;
  cfg.restarts = 1;
  cfg.threads = 1;
  cfg.max_iterations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(d.layout, d.chain, d.drive, CostSpec{}, cfg));
  }
}
BENCHMARK(BM_OptimizeOneRestart)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DriftSweep(benchmark::State& state) {
  const Default& d = fixture();
  const ThermalEnv env = make_thermal_env(d.chain.mode_freqs, 1e-6);
  SweepSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sweep(d.pulse, d.chain, d.drive, env, spec, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_DriftSweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_OraclePropagate(benchmark::State& state) {
  const Default& d = fixture();
  OracleConfig cfg;
  cfg.modes = {0, 1};
  cfg.fock_cutoff = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(d.pulse, d.chain, d.drive, cfg));
}
BENCHMARK(BM_OraclePropagate)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
