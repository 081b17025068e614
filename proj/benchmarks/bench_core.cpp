#include <benchmark/benchmark.h>

#include <vector>

#include "qpd/dynamics.hpp"
#include "qpd/entanglement.hpp"
#include "qpd/evolution.hpp"
#include "qpd/physics.hpp"

using namespace qpd;

namespace {

SystemConfig config(double omega_r) {
  SystemConfig cfg;
  cfg.r = omega_r / cfg.omega0;
  return cfg;
}

void BM_ComputeRates(benchmark::State& state) {
  const SystemConfig cfg = config(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(compute_rates(cfg));
}
BENCHMARK(BM_ComputeRates)->Arg(2)->Arg(10)->Arg(200);

void BM_KappaQuadrature(benchmark::State& state) {
  const SystemConfig cfg = config(1.0);
  const RateSet r = compute_rates(cfg);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kappa_quadrature(cfg, r, t));
}
BENCHMARK(BM_KappaQuadrature)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_MuFunctions(benchmark::State& state) {
  const SystemConfig cfg = config(1.0);
  const RateSet r = compute_rates(cfg);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mu_fns(cfg, r, t));
}
BENCHMARK(BM_MuFunctions)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Concurrence(benchmark::State& state) {
  const RateSet r = compute_rates(config(1.0));
  const TwoQubitState rho = class_a_closed_form(0.8, r, 1.0, 0.5 / r.gamma0);
  for (auto _ : state) benchmark::DoNotOptimize(concurrence(rho));
}
BENCHMARK(BM_Concurrence);

void BM_SimulateClosedForm(benchmark::State& state) {
  const SystemConfig cfg = config(1.0);
  const RateSet r = compute_rates(cfg);
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(10.0 * i / 2000 / r.gamma0);
  SimulationRequest req;
  req.p = 0.8;
  req.compare_markov = true;
  req.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, r, req, grid));
}
BENCHMARK(BM_SimulateClosedForm)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
