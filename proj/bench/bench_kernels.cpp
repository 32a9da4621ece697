// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include <cmath>

#include "tsh/calculus.hpp"
#include "tsh/catalog.hpp"
#include "tsh/dynamics.hpp"
#include "tsh/helmholtz.hpp"
#include "tsh/variational.hpp"

using namespace tsh;

namespace {

Execution exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Execution::serial : Execution::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "parallel"); }

void BM_DeltaDerivative(benchmark::State& s) {
  const TimeScale ts({{0.0, 5.0}, {5.5, 5.5}, {6.0, 10.0}}, 1e-5);
  const GridFunction f = GridFunction::sample(ts, 4, [](double t, std::span<double> out) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::sin(t + static_cast<double>(c));
  });
  for (auto _ : s) benchmark::DoNotOptimize(delta_derivative_all(f, exec_of(s)));
  label(s);
}

void BM_CheckConditions(benchmark::State& s) {
  CheckOptions o;
  o.samples = 4096;
  o.exec = exec_of(s);
  const VectorField& x = catalog_entry("coupled").field;
  for (auto _ : s) benchmark::DoNotOptimize(check_conditions(x, o));
  label(s);
}

void BM_Roundtrip(benchmark::State& s) {
  const VectorField& x = catalog_entry("pendulum").field;
  const ReconstructedHamiltonian h = reconstruct(x);
  for (auto _ : s) benchmark::DoNotOptimize(roundtrip_residual(x, h, {}, 4096, 0, exec_of(s)));
  label(s);
}

void BM_SelfAdjointness(benchmark::State& s) {
  const TimeScale ts({{0.0, 0.5}, {0.6, 0.6}, {0.7, 0.7}, {0.8, 0.8}, {0.9, 0.9}, {1.0, 1.0}}, 1e-3);
  const CatalogEntry& e = catalog_entry("pendulum");
  const PhasePath path = reference_path(ts, 1);
  for (auto _ : s) benchmark::DoNotOptimize(selfadjointness_residual(e.field, path, 32, 0, exec_of(s)));
  label(s);
}

void BM_SolveSweep(benchmark::State& s) {
  const TimeScale ts({{0.0, 0.0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}, {0.4, 0.4}, {0.5, 1.0}}, 1e-4);
  const Hamiltonian& h = *catalog_entry("pendulum").h;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> init;
  for (int k = 0; k < 64; ++k) init.push_back({{0.02 * k}, {0.5 - 0.01 * k}});
  for (auto _ : s) benchmark::DoNotOptimize(solve_sweep(h, ts, init, {}, exec_of(s)));
  label(s);
}

}  // namespace

BENCHMARK(BM_DeltaDerivative)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CheckConditions)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Roundtrip)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SelfAdjointness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
