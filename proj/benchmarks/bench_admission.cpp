#include <benchmark/benchmark.h>

#include <random>

#include "bwalloc/admission.hpp"
#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/model.hpp"

namespace {

using namespace bwalloc;

struct Instance {
  NetworkTopology topology;
  ChannelGains gains;
  std::vector<double> thresholds;
};

// Two sources; W is a third of what serving everyone would take.
Instance make(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> h(0.5, 8.0), c(0.2, 1.5);
  Instance in;
  in.topology.sources = {{1, 2.0 * n}, {2, 2.0 * n}};
  for (std::size_t u = 0; u < n; ++u) {
    double const cu = c(rng);
    in.topology.users.push_back({static_cast<int>(u + 1), static_cast<int>(u % 2 + 1),
                                 std::nullopt, cu});
    in.gains.direct.push_back(h(rng));
    in.thresholds.push_back(cu);
  }
  std::vector<std::size_t> all(n);
  for (std::size_t u = 0; u < n; ++u) all[u] = u;
  in.topology.total_bandwidth =
      min_total_bandwidth(direct_hop(in.topology, in.gains), in.thresholds, all).total / 3.0;
  return in;
}

void BM_Greedy(benchmark::State& state) {
  auto const in = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_admission_no_relay(in.topology, in.gains, in.thresholds));
  }
}
BENCHMARK(BM_Greedy)->DenseRange(4, 16, 4);

void BM_Exhaustive(benchmark::State& state) {
  auto const in = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exhaustive_admission_no_relay(in.topology, in.gains, in.thresholds));
  }
}
BENCHMARK(BM_Exhaustive)->DenseRange(4, 12, 4);

}  // namespace

BENCHMARK_MAIN();
