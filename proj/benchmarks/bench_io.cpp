#include <benchmark/benchmark.h>

#include <filesystem>
#include <unistd.h>

#include "gxt/fixtures.hpp"
#include "gxt/gray_io.hpp"

namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gxt_bench_" + std::to_string(::getpid()) + "_" + name);
}

void BM_WriteCifti(benchmark::State& state) {
  const auto g = gxt::standard_layout_gray(state.range(0), true);
  const auto path = scratch("w.dtseries.nii");
  for (auto _ : state) gxt::write_grayordinates(g, path);
  state.SetBytesProcessed(state.iterations() * 91282 * state.range(0) * 4);
  std::filesystem::remove(path);
}
BENCHMARK(BM_WriteCifti)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ReadCifti(benchmark::State& state) {
  const auto path = scratch("r.dtseries.nii");
  gxt::write_grayordinates(gxt::standard_layout_gray(state.range(0), true), path);
  for (auto _ : state) benchmark::DoNotOptimize(gxt::read_all_structures(path));
  state.SetBytesProcessed(state.iterations() * 91282 * state.range(0) * 4);
  std::filesystem::remove(path);
}
BENCHMARK(BM_ReadCifti)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Info(benchmark::State& state) {
  const auto path = scratch("i.dtseries.nii");
  gxt::write_grayordinates(gxt::standard_layout_gray(100, true), path);
  for (auto _ : state) benchmark::DoNotOptimize(gxt::info(path));
  std::filesystem::remove(path);
}
BENCHMARK(BM_Info)->Unit(benchmark::kMillisecond);

}  // namespace
