#include <benchmark/benchmark.h>

#include "gxt/fixtures.hpp"
#include "gxt/smoothing.hpp"
#include "gxt/surface_ops.hpp"

namespace {

gxt::Surface sphere(int k) {
  gxt::Surface s = gxt::make_icosphere_k(k).surface;
  s.vertices *= 100.0;
  return s;
}

void BM_SurfaceKernel(benchmark::State& state) {
  const auto s = sphere(static_cast<int>(state.range(0)));
  const gxt::Mask roi(static_cast<std::size_t>(s.vertex_count()), true);
  for (auto _ : state) benchmark::DoNotOptimize(gxt::build_surface_kernel(s, roi, 5.0));
  state.counters["vertices"] = static_cast<double>(s.vertex_count());
}
BENCHMARK(BM_SurfaceKernel)->Arg(20)->Arg(40)->Arg(57)->Unit(benchmark::kMillisecond);

void BM_SmoothSurface(benchmark::State& state) {
  const auto s = sphere(57);
  const gxt::Mask roi(static_cast<std::size_t>(s.vertex_count()), true);
  gxt::Rng rng(1);
  Eigen::MatrixXd x(s.vertex_count(), state.range(0));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(gxt::smooth_surface_metric(s, x, roi, 5.0));
}
BENCHMARK(BM_SmoothSurface)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SmoothVolume(benchmark::State& state) {
  const auto g = gxt::standard_layout_gray(state.range(0), true);
  for (auto _ : state) benchmark::DoNotOptimize(gxt::smooth_volume(*g.data.subcort, *g.meta.subcort, 5.0));
}
BENCHMARK(BM_SmoothVolume)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
