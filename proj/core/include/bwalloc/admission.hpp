#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bwalloc/model.hpp"

namespace bwalloc {

inline constexpr std::size_t kDefaultExhaustiveCap = 16;

struct RemovalStep {
  std::size_t user = 0;         // position in the topology
  std::size_t transmitter = 0;  // source (or relay) position
  double g_before = 0.0;        // G of the whole remaining set
  double g_after = 0.0;
  double source_g_before = 0.0;  // G restricted to the transmitter's users
  double source_g_after = 0.0;
};

/// Outcome of an admission search. `admitted` holds user positions in
/// ascending order; `g_admitted` is G of that set (phase 1 and phase 2 for
/// relay networks). `oracle_calls` counts G evaluations spent choosing the
/// set; the initial G(N) test of the greedy search is counted separately in
/// `initial_calls`.
struct AdmissionResult {
  std::vector<std::size_t> admitted;
  std::vector<RemovalStep> removal_trace;
  std::size_t t_star = 0;
  std::size_t oracle_calls = 0;
  std::size_t initial_calls = 0;
  double g_admitted = 0.0;
  double g_second = 0.0;
  std::optional<bool> optimal;
};

/// Two-phase admission: the greedy search on each phase, then the joint
/// exhaustive search below d' = min(N - t1, N - t2).
struct RelayAdmissionResult {
  AdmissionResult combined;
  AdmissionResult phase1;
  AdmissionResult phase2;
  std::size_t d_prime = 0;
  bool exhaustive_stage = false;
  std::size_t exhaustive_subsets = 0;
};

// Hop-level searches. `ids` orders ties (greedy removes the higher id; the
// exhaustive search prefers the lexicographically smaller id list). Users
// are admitted while G <= `bandwidth`.
AdmissionResult greedy_admission(const Hop& hop, std::span<const double> thresholds,
                                 std::span<const int> ids, double bandwidth);
AdmissionResult exhaustive_admission(const Hop& hop,
                                     std::span<const double> thresholds,
                                     std::span<const int> ids, double bandwidth,
                                     std::size_t cap = kDefaultExhaustiveCap);

AdmissionResult greedy_admission_no_relay(const NetworkTopology& topology,
                                          const ChannelGains& gains,
                                          std::span<const double> thresholds);

/// Scans cardinalities from N down; throws InstanceTooLargeError when
/// N > cap.
AdmissionResult exhaustive_admission_no_relay(
    const NetworkTopology& topology, const ChannelGains& gains,
    std::span<const double> thresholds, std::size_t cap = kDefaultExhaustiveCap);

RelayAdmissionResult greedy_admission_relay(const NetworkTopology& topology,
                                            const ChannelGains& gains,
                                            std::span<const double> thresholds,
                                            std::size_t cap = kDefaultExhaustiveCap);

/// Joint exhaustive search over both phases (the reference for the relay
/// pipeline); two G evaluations per subset.
AdmissionResult exhaustive_admission_relay(const NetworkTopology& topology,
                                           const ChannelGains& gains,
                                           std::span<const double> thresholds,
                                           std::size_t cap = kDefaultExhaustiveCap);

enum class PairRelation { kUniqueIntersection, kFirstDominates, kSecondDominates, kIdentical };

/// How the minimum-bandwidth curves F_i and F_j of two users sharing a
/// power budget compare. "Dominates" means a strictly smaller bandwidth
/// requirement at every power. For an intersection, `crossing_power` is p'
/// and `inside_budget` tells whether 0 < p' < power_cap.
struct PairClassification {
  PairRelation relation = PairRelation::kIdentical;
  double crossing_power = 0.0;
  bool inside_budget = false;
};

PairClassification classify_pair(double h_i, double c_i, double h_j, double c_j,
                                 double power_cap);

struct SourceConditions {
  std::size_t transmitter = 0;
  std::size_t users = 0;
  std::size_t max_crossings = 0;  // most in-budget intersections of one user
  bool few_crossings = true;      // every user crosses at most one other
  std::optional<bool> best_sets;  // C1; empty when the source is too large
  bool diminishing_gains = true;  // C2
};

struct OptimalityReport {
  bool equal_thresholds = false;
  bool few_crossings = true;
  std::optional<bool> best_sets;
  bool diminishing_gains = true;
  bool guaranteed = false;
  std::vector<SourceConditions> sources;
};

/// Evaluates the greedy optimality conditions per source on a single hop:
/// the equal-threshold predicate, the at-most-one-crossing sufficient
/// condition, C1 by exhaustive comparison (sources up to `cap` users) and C2
/// on the full per-source greedy trace. The guarantee is C1 and C2, or the
/// equal-threshold / crossing conditions when C1 was not checked.
OptimalityReport check_optimality_conditions(const Hop& hop,
                                             std::span<const double> thresholds,
                                             std::span<const int> ids,
                                             std::size_t cap = kDefaultExhaustiveCap);

OptimalityReport check_optimality_conditions(const NetworkTopology& topology,
                                             const ChannelGains& gains,
                                             std::span<const double> thresholds,
                                             std::size_t cap = kDefaultExhaustiveCap);

/// True when every step of each transmitter's removal subsequence frees
/// strictly less bandwidth than the previous one (finite steps only).
bool removal_gains_diminish(std::span<const RemovalStep> trace);

// Sum_{i=0}^{t-1} (N - i).
std::size_t greedy_call_bound(std::size_t n, std::size_t t_star);
// Sum_{i=d}^{hi} C(N, i).
std::size_t exhaustive_call_bound(std::size_t n, std::size_t d, std::size_t hi);

}  // namespace bwalloc
