#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bwalloc/model.hpp"
#include "bwalloc/solver_core.hpp"

namespace bwalloc {

enum class Objective { kSumCapacity, kMaxMin, kPowerMin };
enum class Scheme { kObpa, kEbopa, kEbpa };

std::string_view to_string(Objective objective);
std::string_view to_string(Scheme scheme);
std::optional<Objective> parse_objective(std::string_view text);
std::optional<Scheme> parse_scheme(std::string_view text);

/// An allocation with its objective value: total capacity (sum), the common
/// capacity T (max-min), or total transmit power (power-min).
struct AllocationResult {
  Allocation allocation;
  double metric = 0.0;
  std::vector<double> capacities;
  // Relay networks only: C_SR - C_RD per user, a diagnostic.
  std::vector<double> hop_gap;
};

/// Closed form: each source gives its whole budget to its best user (lowest
/// id on ties); bandwidth is split across the winners in proportion to
/// h*P.
AllocationResult sum_capacity_no_relay(const NetworkTopology& topology,
                                       const ChannelGains& gains);

/// Drops users dominated on both hops by a user with the same source and
/// relay, then solves the epigraph program with the barrier method. Shares
/// below 1e-7 of their budget are zeroed afterwards and the remaining
/// bandwidth and power are rescaled to their caps.
AllocationResult sum_capacity_relay(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    const solver::SolverConfig& config = {});

/// Bisection on the common capacity T with the minimum-bandwidth oracle as
/// feasibility test. Every user ends with capacity exactly T.
AllocationResult max_min_no_relay(const NetworkTopology& topology,
                                  const ChannelGains& gains);

/// The phases decouple for a given T; T* is the smaller phase optimum.
AllocationResult max_min_relay(const NetworkTopology& topology,
                               const ChannelGains& gains);

/// Minimum total power meeting every threshold. Throws
/// InfeasibleInstanceError carrying G(N) when the bandwidth does not
/// suffice.
AllocationResult power_min_no_relay(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    std::span<const double> thresholds,
                                    const solver::SolverConfig& config = {});

/// Two independent single-hop solves; the error names the failing phase.
AllocationResult power_min_relay(const NetworkTopology& topology,
                                 const ChannelGains& gains,
                                 std::span<const double> thresholds,
                                 const solver::SolverConfig& config = {});

/// Equal bandwidth W/N per user and phase with optimal power: water-filling
/// (sum capacity, no relay), the barrier method at fixed bandwidth (sum
/// capacity, relay), bisection on T (max-min), or F^-1(W/N) (power-min,
/// throwing InfeasibleInstanceError when a budget is exceeded).
AllocationResult ebopa(const NetworkTopology& topology, const ChannelGains& gains,
                       Objective objective,
                       std::span<const double> thresholds = {});

/// Equal bandwidth W/N and equal power per transmitter. The metric follows
/// `objective`; for power-min it is the total power spent, and the split
/// meets the thresholds only if every capacity reaches its c_min.
AllocationResult ebpa(const NetworkTopology& topology, const ChannelGains& gains,
                      Objective objective = Objective::kSumCapacity);

/// Dispatches on objective, scheme and the topology's relay mode.
AllocationResult allocate(const NetworkTopology& topology,
                          const ChannelGains& gains, Objective objective,
                          Scheme scheme, std::span<const double> thresholds = {});

/// Water-filling over parallel links at fixed bandwidths sharing one power
/// budget: p_i = w_i (L - n0/h_i)_+ with L set so the budget is spent.
std::vector<double> water_filling(std::span<const double> bandwidths,
                                  std::span<const double> gains,
                                  double budget, double noise_psd = 1.0);

/// Users that the pairwise dominance rule removes before the relay
/// sum-capacity solve (positions, ascending).
std::vector<std::size_t> dominated_relay_users(const NetworkTopology& topology,
                                               const ChannelGains& gains);

}  // namespace bwalloc
