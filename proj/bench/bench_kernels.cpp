#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "altruist/harness/evaluate.hpp"
#include "altruist/learn/kernels.hpp"

using namespace altruist;

namespace {

std::vector<float> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (float& x : v) x = u(rng);
  return v;
}

// Args: batch, in, out. The default learner's first layer is 1280 -> 256.
template <bool Parallel>
void BM_DenseForward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0)), in = static_cast<int>(state.range(1)),
            out = static_cast<int>(state.range(2));
  const auto x = random_vec(static_cast<std::size_t>(batch) * in, 1);
  const auto w = random_vec(static_cast<std::size_t>(out) * in, 2);
  const auto b = random_vec(static_cast<std::size_t>(out), 3);
  std::vector<float> y(static_cast<std::size_t>(batch) * out);
  for (auto _ : state) {
    if constexpr (Parallel) learn::omp::dense_forward(x.data(), batch, in, w.data(), b.data(), out, y.data());
    else learn::serial::dense_forward(x.data(), batch, in, w.data(), b.data(), out, y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * batch * in * out);
}

template <bool Parallel>
void BM_DenseBackwardWeights(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0)), in = static_cast<int>(state.range(1)),
            out = static_cast<int>(state.range(2));
  const auto x = random_vec(static_cast<std::size_t>(batch) * in, 1);
  const auto dy = random_vec(static_cast<std::size_t>(batch) * out, 2);
  std::vector<float> dw(static_cast<std::size_t>(out) * in), db(static_cast<std::size_t>(out));
  for (auto _ : state) {
    if constexpr (Parallel) learn::omp::dense_backward_weights(dy.data(), x.data(), batch, in, out, dw.data(), db.data());
    else learn::serial::dense_backward_weights(dy.data(), x.data(), batch, in, out, dw.data(), db.data());
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(state.iterations() * batch * in * out);
}

// Random masked policy on the default merge domain; arg = workers (0 = serial reference).
void BM_EvalEpisodes(benchmark::State& state) {
  const harness::EvalSetup setup;
  const auto seeds = harness::eval_seeds(7, 8);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto m = workers == 0 ? harness::run_episodes_serial(harness::Policy::random(), setup, seeds)
                          : harness::run_episodes(harness::Policy::random(), setup, seeds, workers);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(seeds.size()));
}

}  // namespace

BENCHMARK(BM_DenseForward<false>)->Args({1, 1280, 256})->Args({32, 1280, 256})->Args({32, 256, 128});
BENCHMARK(BM_DenseForward<true>)->Args({1, 1280, 256})->Args({32, 1280, 256})->Args({32, 256, 128});
BENCHMARK(BM_DenseBackwardWeights<false>)->Args({32, 1280, 256})->Args({32, 256, 128});
BENCHMARK(BM_DenseBackwardWeights<true>)->Args({32, 1280, 256})->Args({32, 256, 128});
BENCHMARK(BM_EvalEpisodes)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
