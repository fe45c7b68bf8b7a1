#include <benchmark/benchmark.h>

#include "sphwave/builder.hpp"
#include "sphwave/hugoniot.hpp"
#include "sphwave/verify.hpp"

using namespace sphwave;

namespace {

void BM_SolveConvexInflow(benchmark::State& st) {
  auto e = builtin::convex_power();
  for (auto _ : st) benchmark::DoNotOptimize(solve(e, -1.0, 1.0));
}
BENCHMARK(BM_SolveConvexInflow);

void BM_SolveInflectedWindow(benchmark::State& st) {
  auto e = builtin::inflected_vdw();
  for (auto _ : st) benchmark::DoNotOptimize(solve(e, 0.0130966066499, 1 / 4.04797793012));
}
BENCHMARK(BM_SolveInflectedWindow);

void BM_SolveTwoShocks(benchmark::State& st) {
  auto e = builtin::plateau_vdw();
  for (auto _ : st) benchmark::DoNotOptimize(solve(e, -0.332, 1.0 / 300));
}
BENCHMARK(BM_SolveTwoShocks);

void BM_BackState(benchmark::State& st) {
  auto e = builtin::inflected_vdw();
  State f{0.05, 1.0 / 9};
  double sigma = shock_speed(e, f, 3.0);
  for (auto _ : st) benchmark::DoNotOptimize(back_state(e, f, sigma));
}
BENCHMARK(BM_BackState);

void BM_AuditAll(benchmark::State& st) {
  auto sol = solve(builtin::plateau_vdw(), -0.332, 1.0 / 300);
  for (auto _ : st) benchmark::DoNotOptimize(audit_all(sol));
}
BENCHMARK(BM_AuditAll);

}  // namespace
BENCHMARK_MAIN();
