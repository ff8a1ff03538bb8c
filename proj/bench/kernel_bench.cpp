#include <benchmark/benchmark.h>

#include <vector>

#include "specclip/kernels.hpp"
#include "specclip/linalg.hpp"
#include "specclip/noise.hpp"

namespace {

using namespace specclip;

std::vector<double> data(std::size_t n) {
  const Matrix m = sample_gaussian(1, n, 3.0, SeedSpec{7, 1});
  return {m.values().begin(), m.values().end()};
}

template <void (*Clip)(const double*, double*, std::size_t, double)>
void BM_hard_clip(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = data(n);
  std::vector<double> y(n);
  for (auto _ : state) {
    Clip(x.data(), y.data(), n, 1.0);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <void (*Shrink)(const double*, double*, std::size_t, double, double)>
void BM_smooth_shrink(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = data(n);
  std::vector<double> y(n);
  for (auto _ : state) {
    Shrink(x.data(), y.data(), n, 1.0, 1.0);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <double (*Reduce)(const double*, std::size_t)>
void BM_sum_squares(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = data(n);
  for (auto _ : state) benchmark::DoNotOptimize(Reduce(x.data(), n));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <void (*Gemm)(std::size_t, std::size_t, std::size_t, const double*, const double*, double*)>
void BM_gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = data(n * n);
  const auto b = data(n * n);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Gemm(n, n, n, a.data(), b.data(), c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * n));
}

void BM_full_svd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = sample_gaussian(n, n, 1.0, SeedSpec{3, 3});
  for (auto _ : state) benchmark::DoNotOptimize(full_svd(a));
}

void BM_msign(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = sample_gaussian(n, n / 2, 1.0, SeedSpec{3, 4});
  MsignOptions opt;
  opt.method = state.range(1) ? MsignMethod::NewtonSchulz : MsignMethod::ExactSvd;
  opt.ns_check = false;
  for (auto _ : state) benchmark::DoNotOptimize(msign(a, opt));
}

}  // namespace

BENCHMARK(BM_hard_clip<kernels::serial::hard_clip>)->Name("hard_clip/serial")->Range(1 << 10, 1 << 22);
BENCHMARK(BM_hard_clip<kernels::omp::hard_clip>)->Name("hard_clip/omp")->Range(1 << 10, 1 << 22);
BENCHMARK(BM_smooth_shrink<kernels::serial::smooth_shrink>)->Name("smooth_shrink/serial")->Range(1 << 10, 1 << 22);
BENCHMARK(BM_smooth_shrink<kernels::omp::smooth_shrink>)->Name("smooth_shrink/omp")->Range(1 << 10, 1 << 22);
BENCHMARK(BM_sum_squares<kernels::serial::sum_squares>)->Name("sum_squares/serial")->Range(1 << 10, 1 << 22);
BENCHMARK(BM_sum_squares<kernels::omp::sum_squares>)->Name("sum_squares/omp")->Range(1 << 10, 1 << 22);
BENCHMARK(BM_gemm<kernels::serial::gemm>)->Name("gemm/serial")->RangeMultiplier(2)->Range(32, 512);
BENCHMARK(BM_gemm<kernels::omp::gemm>)->Name("gemm/omp")->RangeMultiplier(2)->Range(32, 512);
BENCHMARK(BM_full_svd)->Name("full_svd")->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(BM_msign)->Name("msign")->ArgsProduct({{32, 64, 128}, {0, 1}});

BENCHMARK_MAIN();
