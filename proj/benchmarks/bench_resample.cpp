#include <benchmark/benchmark.h>

#include "gxt/fixtures.hpp"
#include "gxt/surface_ops.hpp"

namespace {

void BM_ResampleMap(benchmark::State& state) {
  const auto src = gxt::make_icosphere_k(57);
  const auto dst = gxt::make_icosphere_k(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gxt::build_resample_map(src, dst));
}
BENCHMARK(BM_ResampleMap)->Arg(10)->Arg(35)->Arg(57)->Unit(benchmark::kMillisecond);

void BM_ResampleValues(benchmark::State& state) {
  const auto src = gxt::make_icosphere_k(57), dst = gxt::make_icosphere_k(35);
  const auto map = gxt::build_resample_map(src, dst);
  gxt::Rng rng(2);
  Eigen::MatrixXd x(src.surface.vertex_count(), state.range(0));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(gxt::resample_values(map, x, gxt::ResampleKind::metric));
}
BENCHMARK(BM_ResampleValues)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Icosphere(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gxt::make_icosphere_k(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Icosphere)->Arg(16)->Arg(57)->Unit(benchmark::kMillisecond);

}  // namespace
