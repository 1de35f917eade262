#include "bwalloc/bandwidth_min.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "bwalloc/capacity.hpp"
#include "bwalloc/root_finding.hpp"

namespace bwalloc {

namespace {

constexpr double kInnerTolerance = 1e-14;
constexpr double kDualTolerance = 1e-14;

// g(x) = exp(x)(x - 1) + 1, the bracket of the stationarity condition with
// x = c/w. Increasing and convex on x > 0 with g(0) = 0.
double stationarity(double x) {
  if (x < 1e-3) {
    double const x2 = x * x;
    return x2 * (0.5 + x * (1.0 / 3.0 + x * (0.125 + x * (1.0 / 30.0 + x / 144.0))));
  }
  if (x > 700.0) return std::numeric_limits<double>::infinity();
  return x * std::exp(x) - std::expm1(x);
}

// expm1(x)/x, continuous at 0.
double expm1_ratio(double x) {
  if (x < 1e-5) return 1.0 + x * (0.5 + x / 6.0);
  return std::expm1(x) / x;
}

// Solves g(x) = target for x > 0.
double solve_stationarity(double target) {
  double hi = 1.0;
  while (stationarity(hi) < target) hi *= 2.0;
  double lo = hi;
  while (stationarity(lo) > target) lo *= 0.5;
  auto residual = [target](double x) {
    return std::pair{stationarity(x) - target, x * std::exp(x)};
  };
  return numerics::solve_increasing(residual, lo, hi, kInnerTolerance);
}

struct DualPoint {
  double power_sum = 0.0;
  double power_slope = 0.0;  // -d(power_sum)/d(lambda), positive
};

DualPoint evaluate(std::span<const DemandUser> users, double lambda,
                   std::vector<double>* ratios = nullptr) {
  DualPoint point;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& u = users[i];
    double const g = u.gain / lambda;
    double const x = solve_stationarity(g);
    double const floor = u.threshold / u.gain;
    point.power_sum += floor * expm1_ratio(x);
    point.power_slope += floor * g * g / (x * x * x * std::exp(x)) / lambda;
    if (ratios) (*ratios)[i] = x;
  }
  return point;
}

void check_inputs(std::span<const DemandUser> users, double power_budget) {
  if (!(power_budget > 0.0) || !std::isfinite(power_budget)) {
    throw std::invalid_argument("min_bandwidth_one_source: budget must be positive");
  }
  for (const auto& u : users) {
    if (!(u.gain > 0.0) || !(u.threshold > 0.0) || !std::isfinite(u.gain) ||
        !std::isfinite(u.threshold)) {
      throw std::invalid_argument(
          "min_bandwidth_one_source: gains and thresholds must be positive");
    }
  }
}

}  // namespace

BandwidthDemand min_bandwidth_one_source(std::span<const DemandUser> users,
                                         double power_budget) {
  check_inputs(users, power_budget);
  BandwidthDemand demand;
  demand.duals.push_back(0.0);
  if (users.empty()) return demand;

  double floor_sum = 0.0;
  for (const auto& u : users) floor_sum += u.threshold / u.gain;
  if (floor_sum >= power_budget) {
    demand.feasible = false;
    demand.total = kInfeasibleBandwidth;
    demand.power_deficit = floor_sum - power_budget;
    return demand;
  }

  if (users.size() == 1) {
    const auto& u = users.front();
    double const w = min_bandwidth(power_budget, u.gain, u.threshold);
    demand.users.push_back({0, power_budget, w});
    demand.total = w;
    demand.duals[0] = u.gain / stationarity(u.threshold / w);
    return demand;
  }

  // Sum of powers is decreasing in lambda; bracket the budget crossing.
  double lo = 1.0, hi = 1.0;
  while (evaluate(users, lo).power_sum < power_budget) lo *= 0.25;
  while (evaluate(users, hi).power_sum > power_budget) hi *= 4.0;
  auto residual = [&](double lambda) {
    DualPoint const point = evaluate(users, lambda);
    return std::pair{power_budget - point.power_sum, point.power_slope};
  };
  double const lambda =
      numerics::solve_increasing(residual, lo, hi, kDualTolerance);

  std::vector<double> ratios(users.size());
  evaluate(users, lambda, &ratios);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& u = users[i];
    double const w = u.threshold / ratios[i];
    double const p = u.threshold / u.gain * expm1_ratio(ratios[i]);
    demand.users.push_back({i, p, w});
    demand.total += w;
  }
  demand.duals[0] = lambda;
  return demand;
}

std::vector<DemandUser> demand_users(const Hop& hop,
                                     std::span<const double> thresholds,
                                     std::span<const std::size_t> users) {
  std::vector<DemandUser> out;
  out.reserve(users.size());
  for (auto u : users) {
    out.push_back({hop.gains.at(u) / hop.noise_psd, thresholds[u]});
  }
  return out;
}

BandwidthDemand min_total_bandwidth(const Hop& hop,
                                    std::span<const double> thresholds,
                                    std::span<const std::size_t> subset) {
  if (thresholds.size() != hop.user_count()) {
    throw std::invalid_argument("min_total_bandwidth: one threshold per user");
  }
  std::vector<std::vector<std::size_t>> members(hop.budgets.size());
  for (auto u : subset) {
    if (u >= hop.user_count()) {
      throw std::invalid_argument("min_total_bandwidth: user out of range");
    }
    members[hop.transmitter_of[u]].push_back(u);
  }

  BandwidthDemand demand;
  demand.duals.assign(hop.budgets.size(), 0.0);
  for (std::size_t t = 0; t < members.size(); ++t) {
    if (members[t].empty()) continue;
    auto const request = demand_users(hop, thresholds, members[t]);
    BandwidthDemand const part = min_bandwidth_one_source(request, hop.budgets[t]);
    demand.duals[t] = part.duals.front();
    if (!part.feasible) {
      demand.feasible = false;
      demand.power_deficit += part.power_deficit;
      continue;
    }
    demand.total += part.total;
    for (const auto& entry : part.users) {
      demand.users.push_back({members[t][entry.user], entry.power, entry.bandwidth});
    }
  }
  if (!demand.feasible) {
    demand.total = kInfeasibleBandwidth;
    demand.users.clear();
  }
  return demand;
}

BandwidthDemand min_total_bandwidth(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    std::span<const double> thresholds,
                                    std::span<const std::size_t> subset) {
  return min_total_bandwidth(direct_hop(topology, gains), thresholds, subset);
}

}  // namespace bwalloc
