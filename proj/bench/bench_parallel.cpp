// Serial references against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "ira/analytics.hpp"
#include "ira/dispatch.hpp"
#include "ira/solver/brute_force.hpp"
#include "ira/study.hpp"
#include "ira/synthetic.hpp"

namespace {

ira::StudyData week(std::size_t days) {
  ira::SyntheticOptions o;
  o.days = days;
  return ira::study_data_from(ira::make_synthetic(o));
}

ira::solver::MilpProblem oracle_problem(std::size_t steps) {
  const auto d = week(1).slice(8, steps);
  ira::StudySettings s;
  return ira::scenario_problem(d, s, ira::Scenario::C2).milp;
}

void BM_brute_force_serial(benchmark::State& state) {
  const auto p = oracle_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ira::solver::brute_force_serial(p));
}

void BM_brute_force_parallel(benchmark::State& state) {
  const auto p = oracle_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ira::solver::brute_force(p));
}

ira::DispatchCase dispatch_days(std::size_t days) {
  ira::SyntheticOptions o;
  o.days = days;
  const auto d = ira::make_synthetic(o);
  return ira::build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, d.wind);
}

void BM_dispatch_serial(benchmark::State& state) {
  const auto c = dispatch_days(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ira::clear_market_serial(c));
}

void BM_dispatch_parallel(benchmark::State& state) {
  const auto c = dispatch_days(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ira::clear_market(c));
}

void rent_sweep(benchmark::State& state, ira::Execution exec) {
  const auto d = week(static_cast<std::size_t>(state.range(0)));
  std::vector<double> rents;
  for (int r = 0; r <= 10; ++r) rents.push_back(3.0 * r);
  for (auto _ : state) benchmark::DoNotOptimize(ira::sweep_rent(d, ira::StudySettings{}, rents, exec));
}

void BM_rent_sweep_serial(benchmark::State& state) { rent_sweep(state, ira::Execution::Serial); }
void BM_rent_sweep_parallel(benchmark::State& state) { rent_sweep(state, ira::Execution::Parallel); }

}  // namespace

BENCHMARK(BM_brute_force_serial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_brute_force_parallel)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_dispatch_serial)->Arg(7)->Arg(28)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_dispatch_parallel)->Arg(7)->Arg(28)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rent_sweep_serial)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rent_sweep_parallel)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
