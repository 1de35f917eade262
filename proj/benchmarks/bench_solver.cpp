#include <benchmark/benchmark.h>

#include "bwalloc/allocators.hpp"
#include "bwalloc/errors.hpp"
#include "bwalloc/simharness.hpp"

namespace {

using namespace bwalloc;

Scenario scenario(std::size_t run) {
  return sim::generate_scenario(sim::default_config(), run).scenario;
}

void BM_Allocate(benchmark::State& state, Objective objective, Scheme scheme) {
  std::vector<Scenario> cases;
  for (std::size_t r = 0; cases.size() < 16; ++r) {
    Scenario s = scenario(r);
    for (auto& u : s.topology.users) u.c_min = 0.3;
    try {
      allocate(s.topology, s.gains, objective, scheme);
    } catch (const InfeasibleInstanceError&) {
      continue;
    }
    cases.push_back(std::move(s));
  }
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& s = cases[k];
    benchmark::DoNotOptimize(allocate(s.topology, s.gains, objective, scheme).metric);
    k = (k + 1) % cases.size();
  }
}
BENCHMARK_CAPTURE(BM_Allocate, relay_sum_obpa, Objective::kSumCapacity, Scheme::kObpa);
BENCHMARK_CAPTURE(BM_Allocate, relay_sum_ebopa, Objective::kSumCapacity, Scheme::kEbopa);
BENCHMARK_CAPTURE(BM_Allocate, relay_maxmin_obpa, Objective::kMaxMin, Scheme::kObpa);
BENCHMARK_CAPTURE(BM_Allocate, relay_powermin_obpa, Objective::kPowerMin, Scheme::kObpa);

}  // namespace

BENCHMARK_MAIN();
