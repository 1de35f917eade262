#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/capacity.hpp"
#include "oracles.hpp"

namespace {

using namespace bwalloc;

std::vector<DemandUser> example_users() { return {{4.0, 1.0}, {5.0, 1.1}, {6.0, 1.2}}; }

double g_of(std::vector<DemandUser> users, double budget) {
  return min_bandwidth_one_source(users, budget).total;
}

TEST(OneSource, ExamplePairs) {
  auto const u = example_users();
  EXPECT_NEAR(g_of({u[0], u[1]}, 1.1), 1.3849, 1e-3);
  EXPECT_NEAR(g_of({u[0], u[2]}, 1.1), 1.3808, 1e-3);
  EXPECT_NEAR(g_of({u[1], u[2]}, 1.1), 1.3573, 1e-3);
  EXPECT_NEAR(g_of({u[0]}, 1.1), 0.4039, 5e-4);
  EXPECT_NEAR(g_of({u[0]}, 1.1), min_bandwidth(1.1, 4.0, 1.0), 1e-12);
}

TEST(OneSource, ThreeUsersMatchGridSearch) {
  auto const u = example_users();
  double const grid = oracle::grid_min_bandwidth({{4, 1}, {5, 1.1}, {6, 1.2}}, 1.1);
  double const dual = g_of(u, 1.1);
  EXPECT_NEAR(dual, grid, 1e-3);
  EXPECT_NEAR(dual, 3.563280, 1e-5);
  EXPECT_LE(dual, grid + 1e-9);
}

TEST(OneSource, RandomInstancesMatchGridSearch) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> h(1.0, 10.0), c(0.2, 1.5), slack(1.2, 3.0);
  for (int k = 0; k < 8; ++k) {
    std::size_t const n = 2 + k % 2;
    std::vector<DemandUser> users;
    std::vector<oracle::UserHC> ref;
    double floor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double const hh = h(rng), cc = c(rng);
      users.push_back({hh, cc});
      ref.push_back({hh, cc});
      floor += cc / hh;
    }
    double const budget = std::min(2.0, floor * slack(rng));
    if (budget <= floor) continue;
    double const grid = oracle::grid_min_bandwidth(ref, budget);
    double const dual = g_of(users, budget);
    EXPECT_NEAR(dual, grid, 1e-3) << "instance " << k;
    EXPECT_LE(dual, grid + 1e-9);
  }
}

TEST(OneSource, SpendsWholeBudget) {
  auto const d = min_bandwidth_one_source(example_users(), 1.1);
  ASSERT_TRUE(d.feasible);
  double power = 0.0, bandwidth = 0.0;
  for (const auto& u : d.users) {
    power += u.power;
    bandwidth += u.bandwidth;
  }
  EXPECT_NEAR(power, 1.1, 1e-8 * 1.1);
  EXPECT_NEAR(bandwidth, d.total, 1e-12);
  ASSERT_EQ(d.duals.size(), 1u);
  EXPECT_GT(d.duals[0], 0.0);
  // Every user at its threshold.
  auto const u = example_users();
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_NEAR(link_capacity(d.users[i].power, d.users[i].bandwidth, u[i].gain, 1.0),
                u[i].threshold, 1e-9);
  }
}

TEST(OneSource, InfeasibleCarriesDeficit) {
  auto const d = min_bandwidth_one_source(std::vector<DemandUser>{{4.0, 1.0}, {5.0, 1.0}}, 0.4);
  EXPECT_FALSE(d.feasible);
  EXPECT_TRUE(std::isinf(d.total));
  EXPECT_NEAR(d.power_deficit, 0.25 + 0.2 - 0.4, 1e-12);
  // Exactly at the floor is infeasible too.
  EXPECT_FALSE(min_bandwidth_one_source(std::vector<DemandUser>{{4.0, 1.0}}, 0.25).feasible);
}

TEST(OneSource, PowersGrowWithBudget) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> h(0.5, 10.0), c(0.1, 2.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<DemandUser> users;
    double floor = 0.0;
    for (int i = 0; i < 4; ++i) {
      users.push_back({h(rng), c(rng)});
      floor += users.back().threshold / users.back().gain;
    }
    std::vector<double> previous(4, 0.0);
    double previous_total = INFINITY;
    for (double scale = 1.05; scale < 20.0; scale *= 1.3) {
      auto const d = min_bandwidth_one_source(users, floor * scale);
      for (int i = 0; i < 4; ++i) {
        EXPECT_GE(d.users[i].power, previous[i] * (1.0 - 1e-9));
        previous[i] = d.users[i].power;
      }
      EXPECT_LT(d.total, previous_total);
      previous_total = d.total;
    }
  }
}

TEST(TotalBandwidth, EmptySetAndDecoupling) {
  Hop hop;
  hop.budgets = {1.1, 1.1};
  hop.transmitter_of = {0, 0, 1, 1};
  hop.gains = {4.0, 5.0, 4.0, 5.0};
  hop.total_bandwidth = 10.0;
  std::vector<double> const c{1.0, 1.1, 1.0, 1.1};
  EXPECT_EQ(min_total_bandwidth(hop, c, {}).total, 0.0);

  std::vector<std::size_t> const all{0, 1, 2, 3};
  auto const d = min_total_bandwidth(hop, c, all);
  EXPECT_NEAR(d.total, 2 * 1.3849, 2e-3);
  EXPECT_EQ(d.users.size(), 4u);
  EXPECT_EQ(d.duals.size(), 2u);

  // Removing a user of source 2 leaves source 1's share untouched.
  std::vector<std::size_t> const without{0, 1, 2};
  auto const e = min_total_bandwidth(hop, c, without);
  EXPECT_DOUBLE_EQ(e.users[0].bandwidth, d.users[0].bandwidth);
  EXPECT_DOUBLE_EQ(e.users[1].bandwidth, d.users[1].bandwidth);
  EXPECT_NEAR(e.total - d.users[0].bandwidth - d.users[1].bandwidth,
              min_bandwidth(1.1, 4.0, 1.0), 1e-9);
}

TEST(TotalBandwidth, MonotoneInTheSet) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> h(0.5, 8.0), c(0.1, 1.0);
  for (int k = 0; k < 30; ++k) {
    Hop hop;
    hop.budgets = {3.0, 3.0};
    hop.total_bandwidth = 1.0;
    std::vector<double> thresholds;
    for (std::size_t i = 0; i < 6; ++i) {
      hop.transmitter_of.push_back(i % 2);
      hop.gains.push_back(h(rng));
      thresholds.push_back(c(rng));
    }
    for (unsigned mask = 0; mask < 64; ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < 6; ++i) {
        if (mask >> i & 1u) subset.push_back(i);
      }
      double const g = min_total_bandwidth(hop, thresholds, subset).total;
      for (std::size_t drop = 0; drop < subset.size(); ++drop) {
        auto smaller = subset;
        smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
        EXPECT_LE(min_total_bandwidth(hop, thresholds, smaller).total, g);
      }
    }
  }
}

TEST(TotalBandwidth, NoisePsdNormalizesGains) {
  Hop hop;
  hop.budgets = {1.1};
  hop.transmitter_of = {0, 0};
  hop.gains = {8.0, 10.0};
  hop.noise_psd = 2.0;
  std::vector<double> const c{1.0, 1.1};
  std::vector<std::size_t> const all{0, 1};
  EXPECT_NEAR(min_total_bandwidth(hop, c, all).total, 1.3849, 1e-3);
}

}  // namespace
