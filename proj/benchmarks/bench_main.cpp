#include <benchmark/benchmark.h>

#include "fairq/metrics.hpp"
#include "fairq/scenarios.hpp"

namespace {

using namespace fairq;

void BM_Decompose(benchmark::State& state) {
  GridSettings gs;
  gs.n_cells = static_cast<std::size_t>(state.range(0));
  const auto grids = discretize(scenario_s1(), gs);
  for (auto _ : state) benchmark::DoNotOptimize(jordan_decompose(grids.group1, grids.group2));
}
BENCHMARK(BM_Decompose)->Arg(4096)->Arg(16384);

void BM_BuildQStar(benchmark::State& state) {
  const auto sc = scenario_s1();
  const auto grids = discretize(sc);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  for (auto _ : state) benchmark::DoNotOptimize(build_unaware(sc.f_star, jd, QStar{}));
}
BENCHMARK(BM_BuildQStar);

void BM_Wasserstein(benchmark::State& state) {
  const auto sc = scenario_s1();
  const auto grids = discretize(sc);
  const auto jd = jordan_decompose(grids.group1, grids.group2);
  const auto pushes = signed_pushforwards(sc.f_star, jd);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein2_sq(pushes.plus, pushes.minus));
}
BENCHMARK(BM_Wasserstein);

void BM_PredictDraws(benchmark::State& state) {
  const auto sc = scenario_s1();
  const AnyPredictor p = build_scenario_unaware(sc, QStar{});
  const auto draws = draw_groups(sc, {static_cast<std::size_t>(state.range(0)), 1});
  for (auto _ : state) benchmark::DoNotOptimize(predict_draws(p, draws));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_PredictDraws)->Arg(100000);

void BM_QuadratureReport(benchmark::State& state) {
  const auto sc = scenario_s1();
  const AnyPredictor p = build_scenario_unaware(sc, QStar{});
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_report(p, sc, "f_q:qstar"));
}
BENCHMARK(BM_QuadratureReport)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
