#include <benchmark/benchmark.h>

#include <random>

#include "neutroseg/filters.hpp"
#include "neutroseg/graph_segment.hpp"
#include "neutroseg/neutrosophic.hpp"
#include "neutroseg/phantom.hpp"
#include "neutroseg/pipeline.hpp"

using namespace neutroseg;

namespace {

const Phantom& phantom() {
  static const Phantom p = make_phantom(random_phantom_spec(42, true));
  return p;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi) {
  std::mt19937_64 rng(rows * 131 + cols);
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

void BM_Neutrosophic(benchmark::State& state) {
  const GrayImage& img = phantom().image;
  for (auto _ : state) benchmark::DoNotOptimize(to_neutrosophic(img));
}
BENCHMARK(BM_Neutrosophic)->Unit(benchmark::kMillisecond);

void BM_Homomorphic(benchmark::State& state) {
  const Matrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 768, 0.0, 255.0);
  for (auto _ : state) benchmark::DoNotOptimize(homomorphic_filter(m));
}
BENCHMARK(BM_Homomorphic)->Arg(128)->Arg(496)->Unit(benchmark::kMillisecond);

void BM_ShortestPath(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const Matrix score = random_matrix(rows, 768, -510.0, 510.0);
  const Matrix image = random_matrix(rows, 768, 0.0, 255.0);
  const WeightConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(shortest_path(score, image, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * 768));
}
BENCHMARK(BM_ShortestPath)->Arg(64)->Arg(496)->Unit(benchmark::kMillisecond);

void BM_SegmentPhantom(benchmark::State& state) {
  const GrayImage& img = phantom().image;
  for (auto _ : state) benchmark::DoNotOptimize(segment(img));
}
BENCHMARK(BM_SegmentPhantom)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
