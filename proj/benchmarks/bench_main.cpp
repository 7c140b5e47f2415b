#include "prunadag/baselines.hpp"
#include "prunadag/optimizer.hpp"
#include "prunadag/problems.hpp"
#include "prunadag/theory.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

namespace {

using namespace prunadag;

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

void BM_SelectRelevant(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const Vector g = random_vector(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_relevant(g, n / 10));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SelectRelevant)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_PrunAdagStep(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const Vector g = random_vector(n, 2);
  PrunAdagState s(random_vector(n, 3), n / 10, 0.01, {Version::V3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(prunadag_step(s, g));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_PrunAdagStep)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_AdagradStep(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const Vector x = random_vector(n, 4);
  const Vector g = random_vector(n, 5);
  const Vector w = Vector::Constant(n, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(adagrad_step(x, g, w));
  }
}
BENCHMARK(BM_AdagradStep)->RangeMultiplier(4)->Range(256, 65536);

void BM_PrunAdagIterateLeastSquares(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  const auto problem = gen_least_squares(LsKind::A1, n / 10, n, 6);
  PrunAdagState s(random_sparse_start(n, n / 10, 7), n / 10, 0.01, {Version::V3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(prunadag_iterate(s, problem));
  }
}
BENCHMARK(BM_PrunAdagIterateLeastSquares)->Arg(200)->Arg(1000);

void BM_LambertWMinus1(benchmark::State& state) {
  std::vector<double> ys;
  for (double y = -1e-12; y > -0.36; y *= 1.5) ys.push_back(y);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w_minus1(ys[i]));
    i = (i + 1) % ys.size();
  }
}
BENCHMARK(BM_LambertWMinus1);

}  // namespace

BENCHMARK_MAIN();
