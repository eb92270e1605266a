#include <benchmark/benchmark.h>

#include <random>

#include "brainclust/kmeans1d.hpp"
#include "brainclust/matching.hpp"
#include "brainclust/metrics.hpp"
#include "brainclust/phantom.hpp"
#include "brainclust/pipeline.hpp"

namespace bc = brainclust;

namespace {

bc::WeightedValues histogram(std::size_t n) {
  std::mt19937_64 rng(1);
  bc::WeightedValues wv;
  for (std::size_t i = 0; i < n; ++i) {
    wv.values.push_back(static_cast<double>(i) / static_cast<double>(n));
    wv.weights.push_back(1 + rng() % 1000);
  }
  return wv;
}

void BM_Cluster1d(benchmark::State& state) {
  const auto wv = histogram(static_cast<std::size_t>(state.range(0)));
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(bc::cluster_1d(wv, k));
}
BENCHMARK(BM_Cluster1d)->Args({1000, 5})->Args({10000, 5})->Args({10000, 100})->Unit(benchmark::kMillisecond);

void BM_Matching(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::vector<std::int64_t> c(k * k);
  for (auto& x : c) x = static_cast<std::int64_t>(rng() % 100000);
  const bc::OverlapMatrix om(k, c);
  for (auto _ : state) benchmark::DoNotOptimize(bc::max_weight_matching(om));
}
BENCHMARK(BM_Matching)->Arg(6)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

void BM_Hd95(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bc::Phantom a = bc::make_phantom(1, bc::Dims{n, n, n}, 3, bc::identity_transfer(3), 0.0);
  const bc::Phantom b = bc::make_phantom(2, bc::Dims{n, n, n}, 3, bc::identity_transfer(3), 0.0);
  const bc::Mask ma = bc::region_masks(*a.pair.seg).whole;
  const bc::Mask mb = bc::region_masks(*b.pair.seg).whole;
  for (auto _ : state) benchmark::DoNotOptimize(bc::hd95(ma, mb, bc::Spacing{}));
}
BENCHMARK(BM_Hd95)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto tf = bc::phantom_transfer_family(4, 3);
  std::vector<bc::PatientPair> data;
  for (std::uint64_t s = 0; s < 3; ++s) data.push_back(bc::make_phantom_pair(10 + s, bc::Dims{n, n, n}, 4, tf, 0.0));
  const bc::Model model = bc::train(data, bc::TrainConfig{4, 100, 1024, 1});
  const bc::PatientPair q = bc::make_phantom_pair(99, bc::Dims{n, n, n}, 4, tf, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(bc::synthesize(q.t1, model));
}
BENCHMARK(BM_Synthesize)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
