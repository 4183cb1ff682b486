// Serial reference against the OpenMP paths: the mass-action derivative of the
// largest module and a small T-sweep.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "bfcnn/harness.hpp"

using namespace bfcnn;

namespace {

const Crn& gradient_crn() {
  static const Crn crn = build_learning({4, 4}, 0.5)[0].crn;
  return crn;
}

std::vector<double> some_state(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.1 + 0.8 * static_cast<double>((i * 37) % 101) / 101.0;
  return x;
}

void BM_DerivativeSerial(benchmark::State& st) {
  const auto& crn = gradient_crn();
  auto x = some_state(crn.size());
  std::vector<double> out(crn.size());
  for (auto _ : st) {
    derivative_into(crn, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["reactions"] = static_cast<double>(crn.reaction_count());
}

void BM_DerivativeParallel(benchmark::State& st) {
  omp_set_num_threads(static_cast<int>(st.range(0)));
  const auto& crn = gradient_crn();
  ParallelDerivative par(crn);
  auto x = some_state(crn.size());
  std::vector<double> out(crn.size());
  for (auto _ : st) {
    par(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Sweep(benchmark::State& st) {
  RunConfig cfg;
  cfg.T_grid = {20, 25, 30, 35, 40, 45, 50, 55};
  cfg.max_iterations = 2;
  cfg.parallelism = static_cast<int>(st.range(0));
  auto bp = blueprint_for(cfg, load_dataset("OR"));
  for (auto _ : st) benchmark::DoNotOptimize(run_sweep_points(bp, cfg, cfg.parallelism > 1));
}

}  // namespace

BENCHMARK(BM_DerivativeSerial);
BENCHMARK(BM_DerivativeParallel)->Arg(1)->Arg(2)->Arg(4);
BENCHMARK(BM_Sweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
