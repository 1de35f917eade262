#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bwalloc {

/// A transmitter (source or relay) and its total power budget.
struct Node {
  int id = 0;
  double power_budget = 0.0;
};

/// One source-destination link, optionally forwarded by a single designated
/// relay. `c_min` is the minimum acceptable capacity in nats/s; it is only
/// needed by the threshold-driven problems (power minimization, admission).
struct User {
  int id = 0;
  int source_id = 0;
  std::optional<int> relay_id;
  std::optional<double> c_min;
};

/// Sources, relays and users sharing one spectrum of `total_bandwidth` with
/// noise power spectral density `noise_psd`. A topology is in relay mode
/// exactly when it declares at least one relay.
struct NetworkTopology {
  std::vector<Node> sources;
  std::vector<Node> relays;
  std::vector<User> users;
  double total_bandwidth = 0.0;
  double noise_psd = 1.0;

  bool relaying() const { return !relays.empty(); }
  std::size_t user_count() const { return users.size(); }

  // Positions (not ids) of the transmitter serving each user. Throws
  // std::invalid_argument on dangling references.
  std::vector<std::size_t> source_index_of_users() const;
  std::vector<std::size_t> relay_index_of_users() const;

  // Users (by position) grouped per source / relay, in user order.
  std::vector<std::vector<std::size_t>> users_by_source() const;
  std::vector<std::vector<std::size_t>> users_by_relay() const;
};

/// Per-user power gains. `direct` holds h_SD and is used by single-hop
/// networks; `first_hop`/`second_hop` hold h_SR/h_RD for relay networks. A
/// vector is either empty (not provided) or has one entry per user.
struct ChannelGains {
  std::vector<double> direct;
  std::vector<double> first_hop;
  std::vector<double> second_hop;

  bool has_direct() const { return !direct.empty(); }
  bool has_relay() const { return !first_hop.empty() && !second_hop.empty(); }
};

/// Power and bandwidth granted to a user in one transmission phase. A share
/// without bandwidth carries no power, so sparse solutions are represented
/// exactly instead of as 0*ln(inf).
class PhaseShare {
 public:
  PhaseShare() = default;
  PhaseShare(double power, double bandwidth);

  double power() const { return power_; }
  double bandwidth() const { return bandwidth_; }
  bool active() const { return bandwidth_ > 0.0; }

 private:
  double power_ = 0.0;
  double bandwidth_ = 0.0;
};

struct UserAllocation {
  PhaseShare source;  // phase 1 (or the only phase without relaying)
  PhaseShare relay;   // phase 2; zero without relaying
};

struct Allocation {
  std::vector<UserAllocation> users;

  static Allocation zeros(std::size_t user_count) {
    return Allocation{std::vector<UserAllocation>(user_count)};
  }
};

/// One hop of the network seen as an independent single-hop system:
/// transmitters with budgets, the transmitter serving each user, per-user
/// raw gains, and the shared bandwidth. Both phases of a relay network and a
/// direct network all reduce to this shape.
struct Hop {
  std::vector<double> budgets;
  std::vector<std::size_t> transmitter_of;
  std::vector<double> gains;
  double total_bandwidth = 0.0;
  double noise_psd = 1.0;

  std::size_t user_count() const { return gains.size(); }
  std::vector<std::vector<std::size_t>> users_by_transmitter() const;
};

Hop direct_hop(const NetworkTopology& topology, const ChannelGains& gains);
Hop first_hop(const NetworkTopology& topology, const ChannelGains& gains);
Hop second_hop(const NetworkTopology& topology, const ChannelGains& gains);

struct Violation {
  std::string field;
  std::string message;
};
using ValidationReport = std::vector<Violation>;

ValidationReport validate_topology(const NetworkTopology& topology);

// Checks that the gains required by the topology's mode are present, sized
// per user, strictly positive and finite.
ValidationReport validate_gains(const NetworkTopology& topology,
                                const ChannelGains& gains);

// Thresholds in user order; throws std::invalid_argument naming the first
// user without one.
std::vector<double> thresholds_of(const NetworkTopology& topology);

struct ConstraintSlack {
  std::string name;
  double budget = 0.0;
  double usage = 0.0;

  double slack() const { return budget - usage; }
};

struct ConstraintReport {
  std::vector<ConstraintSlack> constraints;
  std::vector<std::string> issues;
  bool satisfied = true;
};

/// Power caps of every source/relay and the bandwidth cap of every phase.
/// A constraint is satisfied when slack >= -rel_tol * budget. Throws
/// std::invalid_argument when the allocation is not sized per user.
ConstraintReport check_feasibility(const NetworkTopology& topology,
                                   const Allocation& allocation,
                                   double rel_tol = 1e-8);

/// End-to-end capacity of every user (min over hops with relaying).
std::vector<double> user_capacities(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    const Allocation& allocation);

}  // namespace bwalloc
