#include <benchmark/benchmark.h>

#include "hatestack/gbt.hpp"
#include "hatestack/pls.hpp"
#include "hatestack/rng.hpp"
#include "hatestack/stack.hpp"
#include "hatestack/synth.hpp"

using namespace hatestack;

namespace {

Matrix gaussian(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = rng.normal();
  return X;
}

void BM_PrepareMessage(benchmark::State& state) {
  const auto d = generate_corpus(standard_profiles(std::vector<std::string>{"facebook"}), 200, 1);
  const auto res = FeatureResources::builtin();
  const HashedEmbeddingProvider emb(128);
  const HeuristicTagger tagger;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prepare_message(d[i++ % d.size()], res, emb, tagger));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PrepareMessage);

void BM_FitGbt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix X = gaussian(n, 60, 2);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = X(i, 0) + 0.5 * X(i, 1) * X(i, 2) > 0;
  for (auto _ : state) benchmark::DoNotOptimize(fit_gbt(X, y, {.n_trees = 100, .max_depth = 3}));
}
BENCHMARK(BM_FitGbt)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FitPls(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix X = gaussian(n, 128, 3);
  Matrix Y = Matrix::Zero(n, 3);
  for (int i = 0; i < n; ++i) Y(i, X(i, 0) > 0.5 ? 2 : X(i, 1) > 0 ? 1 : 0) = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_pls(X, Y, 50, {.allow_fewer = true}));
}
BENCHMARK(BM_FitPls)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
