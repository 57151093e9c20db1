#include <benchmark/benchmark.h>

#include "ccm/control_path.hpp"
#include "ccm/cycle_decomp.hpp"
#include "ccm/random.hpp"
#include "ccm/stockyard.hpp"

namespace {

void BM_CircleTwistQuadratic(benchmark::State& state) {
  const auto q = ccm::PotentialField::quadratic();
  const auto u = ccm::circle_control(static_cast<int>(state.range(0)), ccm::Orientation::Clockwise);
  for (auto _ : state) benchmark::DoNotOptimize(ccm::twist(q, 0, 6.28, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CircleTwistQuadratic)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_CircleTwistDiscs(benchmark::State& state) {
  const auto f = ccm::PotentialField::disc_array({-30, -30, 30, 30});
  const auto u = ccm::circle_control(static_cast<int>(state.range(0)), ccm::Orientation::Clockwise);
  for (auto _ : state) benchmark::DoNotOptimize(ccm::twist(f, {1, 1}, 20.0, u));
}
BENCHMARK(BM_CircleTwistDiscs)->Arg(64)->Arg(512);

void BM_Decompose(benchmark::State& state) {
  ccm::Rng rng(3);
  ccm::Polygon v;
  for (int i = 0; i < state.range(0); ++i) v.push_back({rng.uniform(), rng.uniform()});
  const ccm::PolyLoop loop(v);
  for (auto _ : state) benchmark::DoNotOptimize(ccm::decompose(ccm::refine_intersections(loop)));
}
BENCHMARK(BM_Decompose)->Arg(20)->Arg(80)->Arg(320);

void BM_LambdaEstimate(benchmark::State& state) {
  const auto f = state.range(0) == 0 ? ccm::PotentialField::quadratic()
                                     : ccm::PotentialField::disc_array({-30, -30, 30, 30});
  const double delta = state.range(0) == 0 ? 10.0 : 120.0;
  for (auto _ : state) benchmark::DoNotOptimize(ccm::lambda_estimate(f, {3, 4}, delta));
}
BENCHMARK(BM_LambdaEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
