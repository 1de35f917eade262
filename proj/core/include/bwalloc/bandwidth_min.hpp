#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "bwalloc/model.hpp"

namespace bwalloc {

/// A user as seen by the minimum-bandwidth oracle: noise-normalized gain
/// (h/N0) and capacity threshold.
struct DemandUser {
  double gain = 0.0;
  double threshold = 0.0;
};

struct UserDemand {
  std::size_t user = 0;  // position in the request (or in the topology)
  double power = 0.0;
  double bandwidth = 0.0;
};

/// Result of the minimum-total-bandwidth problem G(I): the least bandwidth
/// that lets every requested user reach its threshold while each
/// transmitter stays within its power budget.
///
/// Infeasible requests (some transmitter's users have power floors
/// sum(c/h) >= budget) carry total = +inf and the summed floor excess in
/// `power_deficit`, so callers can order infeasible sets as well.
struct BandwidthDemand {
  std::vector<UserDemand> users;
  double total = 0.0;
  std::vector<double> duals;  // one per transmitter; 0 when it serves nobody
  bool feasible = true;
  double power_deficit = 0.0;
};

/// G for users sharing one power budget. Solves
///   min sum_i F_i(p_i)  s.t.  sum_i p_i <= budget
/// through the dual: for a multiplier lambda every user's optimal bandwidth
/// solves exp(x)(x - 1) + 1 = h/lambda with x = c/w, and lambda is searched
/// until the implied powers exhaust the budget. Power is always fully used
/// since F is decreasing.
BandwidthDemand min_bandwidth_one_source(std::span<const DemandUser> users,
                                         double power_budget);

/// G(I) for an arbitrary subset of a hop's users (positions into the hop).
/// Decouples per transmitter: G(I) = sum_j G(I restricted to transmitter j).
BandwidthDemand min_total_bandwidth(const Hop& hop,
                                    std::span<const double> thresholds,
                                    std::span<const std::size_t> subset);

/// Same on a single-hop topology (direct gains).
BandwidthDemand min_total_bandwidth(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    std::span<const double> thresholds,
                                    std::span<const std::size_t> subset);

std::vector<DemandUser> demand_users(const Hop& hop,
                                     std::span<const double> thresholds,
                                     std::span<const std::size_t> users);

inline constexpr double kInfeasibleBandwidth =
    std::numeric_limits<double>::infinity();

}  // namespace bwalloc
