#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/capacity.hpp"

namespace {

using namespace bwalloc;

void BM_MinBandwidth(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> h(0.5, 10.0), c(0.1, 2.0);
  std::vector<double> gains, thresholds;
  for (int k = 0; k < 256; ++k) {
    gains.push_back(h(rng));
    thresholds.push_back(c(rng));
  }
  std::size_t k = 0;
  for (auto _ : state) {
    double const floor = thresholds[k] / gains[k];
    benchmark::DoNotOptimize(min_bandwidth(2.0 * floor, gains[k], thresholds[k]));
    k = (k + 1) % gains.size();
  }
}
BENCHMARK(BM_MinBandwidth);

void BM_OneSourceG(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> h(0.5, 10.0), c(0.1, 1.0);
  std::vector<DemandUser> users;
  double floor = 0.0;
  for (int i = 0; i < state.range(0); ++i) {
    users.push_back({h(rng), c(rng)});
    floor += users.back().threshold / users.back().gain;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_bandwidth_one_source(users, 1.5 * floor).total);
  }
}
BENCHMARK(BM_OneSourceG)->RangeMultiplier(2)->Range(1, 64);

}  // namespace

BENCHMARK_MAIN();
