#include <benchmark/benchmark.h>

#include <random>

#include "latentkit/align.hpp"
#include "latentkit/geometry.hpp"
#include "latentkit/graphs.hpp"
#include "latentkit/hungarian.hpp"
#include "latentkit/whiten.hpp"

using namespace latentkit;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = nd(rng);
  return x;
}

PairedClouds pair_of(Eigen::Index n, Eigen::Index d) {
  const Matrix a = gaussian(n, d, 1);
  const Matrix b = a * gaussian(d, d, 2) + 0.1 * gaussian(n, d, 3);
  return {PointCloud::from_matrix(a), PointCloud::from_matrix(b)};
}

void BM_FitWhitener(benchmark::State& state) {
  const Matrix x = gaussian(state.range(0), state.range(1), 4);
  for (auto _ : state) benchmark::DoNotOptimize(fit_whitener(x));
}
BENCHMARK(BM_FitWhitener)->Args({2000, 64})->Args({10000, 256});

void BM_FitLinear(benchmark::State& state) {
  const auto p = pair_of(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fit_linear(p));
}
BENCHMARK(BM_FitLinear)->Args({2000, 64})->Args({10000, 256});

void BM_TruncateLinear(benchmark::State& state) {
  const auto full = fit_linear(pair_of(2000, 128));
  for (auto _ : state) benchmark::DoNotOptimize(truncate_linear(full, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TruncateLinear)->Arg(8)->Arg(64);

void BM_FitPpfe(benchmark::State& state) {
  const auto p = pair_of(4000, 64);
  PpfeOptions opts;
  opts.rho = 16;
  for (auto _ : state) benchmark::DoNotOptimize(fit_ppfe(p, static_cast<int>(state.range(0)), opts));
}
BENCHMARK(BM_FitPpfe)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_KnnGraph(benchmark::State& state) {
  const Matrix x = gaussian(state.range(0), 64, 5);
  for (auto _ : state) benchmark::DoNotOptimize(knn_graph(x, 10));
}
BENCHMARK(BM_KnnGraph)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GraphSignatures(benchmark::State& state) {
  const auto g = knn_graph(gaussian(state.range(0), 32, 6), 10);
  for (auto _ : state) benchmark::DoNotOptimize(graph_signatures(g, 0));
}
BENCHMARK(BM_GraphSignatures)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Hungarian(benchmark::State& state) {
  const Matrix c = gaussian(state.range(0), state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(c));
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(64)->Arg(256);

void BM_GeometryMetrics(benchmark::State& state) {
  const Matrix x = gaussian(state.range(0), state.range(1), 8);
  for (auto _ : state) benchmark::DoNotOptimize(geometry_metrics(x));
}
BENCHMARK(BM_GeometryMetrics)->Args({2000, 64})->Args({10000, 256});

}  // namespace

BENCHMARK_MAIN();
