// Serial reference vs OpenMP for the Monte Carlo kernels. Both variants use
// the same per-path streams, so they produce identical numbers.

#include "levylab/convergence.hpp"
#include "levylab/krylov.hpp"
#include "levylab/sampler.hpp"
#include "levylab/sde.hpp"

#include <benchmark/benchmark.h>

using namespace levylab;

namespace {

Exec exec_of(const benchmark::State &state) { return state.range(0) ? Exec::parallel : Exec::serial; }

const IncrementSampler &stable_sampler() {
  static const IncrementSampler s(LevyModel::symmetric_stable(1.5));
  return s;
}

void BM_TerminalValues(benchmark::State &state) {
  for (auto _ : state) {
    auto v = sample_terminal_values(stable_sampler(), 1.0, 100, 20000, 1, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * 20000 * 100);
}

void BM_EulerTerminal(benchmark::State &state) {
  const SolveConfig cfg{0.0, 1.0, 1e-3, 2000, 1};
  const auto a = DriftSpec::sign_x(1.0);
  for (auto _ : state) {
    auto v = euler_terminal_values(stable_sampler(), a, cfg, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * 2000 * 1000);
}

void BM_DiscountedOccupation(benchmark::State &state) {
  McConfig cfg;
  cfg.n_paths = 1000;
  cfg.exec = exec_of(state);
  const auto probes = builtin_sweep();
  const std::vector<double> horizons(probes.size(), 2.0);
  const auto a = DriftSpec::sign_x(1.0);
  for (auto _ : state) {
    auto occ = discounted_occupation(stable_sampler(), a, probes, 1.2, horizons, cfg);
    benchmark::DoNotOptimize(occ.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000 * 2000);
}

void BM_MollificationLadder(benchmark::State &state) {
  LadderConfig cfg;
  cfg.n_paths = 200;
  cfg.exec = exec_of(state);
  const auto model = LevyModel::symmetric_stable(1.5);
  const auto a = DriftSpec::sign_x(1.0);
  for (auto _ : state) {
    auto rep = mollification_ladder(model, a, cfg);
    benchmark::DoNotOptimize(rep.terminal.data());
  }
  state.SetItemsProcessed(state.iterations() * 200 * 1000 * 4);
}

} // namespace

// Argument 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_TerminalValues)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EulerTerminal)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiscountedOccupation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MollificationLadder)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
