#include "bwalloc/allocators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/capacity.hpp"
#include "bwalloc/errors.hpp"
#include "bwalloc/programs.hpp"
#include "bwalloc/root_finding.hpp"

namespace bwalloc {

namespace {

constexpr double kBisectionWidth = 1e-8;
constexpr double kSparseFraction = 1e-7;
constexpr double kPowerMargin = 1e-10;

struct HopPlan {
  std::vector<PhaseShare> shares;
  double value = 0.0;
};

std::vector<std::size_t> all_users(std::size_t n) {
  std::vector<std::size_t> users(n);
  std::iota(users.begin(), users.end(), std::size_t{0});
  return users;
}

double normalized(const Hop& hop, std::size_t u) {
  return hop.gains[u] / hop.noise_psd;
}

std::vector<double> hop_capacities(const Hop& hop,
                                   const std::vector<PhaseShare>& shares) {
  std::vector<double> out(shares.size());
  for (std::size_t u = 0; u < shares.size(); ++u) {
    out[u] = link_capacity(shares[u].power(), shares[u].bandwidth(), hop.gains[u],
                           hop.noise_psd);
  }
  return out;
}

void require_solved(const solver::SolverResult& result, const char* what) {
  if (result.status == solver::SolverStatus::kNumericalFailure) {
    throw SolverError(std::string(what) + ": Newton system could not be factored");
  }
  if (result.status == solver::SolverStatus::kMaxIterations) {
    throw SolverError(std::string(what) + ": barrier iterations exhausted");
  }
}

// Scales active bandwidths up to W and each transmitter's power up to its
// budget; both only raise capacities.
void fill_caps(const Hop& hop, std::vector<PhaseShare>& shares,
               bool scale_bandwidth) {
  double bandwidth = 0.0;
  std::vector<double> power(hop.budgets.size(), 0.0);
  for (std::size_t u = 0; u < shares.size(); ++u) {
    bandwidth += shares[u].bandwidth();
    power[hop.transmitter_of[u]] += shares[u].power();
  }
  double const w_scale =
      scale_bandwidth && bandwidth > 0.0 ? hop.total_bandwidth / bandwidth : 1.0;
  for (std::size_t u = 0; u < shares.size(); ++u) {
    std::size_t const t = hop.transmitter_of[u];
    double const p_scale = power[t] > 0.0 ? hop.budgets[t] / power[t] : 1.0;
    shares[u] = PhaseShare(shares[u].power() * p_scale,
                           shares[u].bandwidth() * w_scale);
  }
}

// Max-min over one hop: largest T with G(all users at threshold T) <= W.
HopPlan max_min_hop(const Hop& hop) {
  std::size_t const n = hop.user_count();
  HopPlan plan;
  plan.shares.resize(n);
  if (n == 0) return plan;
  auto const users = all_users(n);

  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < n; ++u) {
    upper = std::min(upper, link_capacity(hop.budgets[hop.transmitter_of[u]],
                                          hop.total_bandwidth, hop.gains[u],
                                          hop.noise_psd));
  }
  auto feasible = [&](double t) {
    std::vector<double> const thresholds(n, t);
    return min_total_bandwidth(hop, thresholds, users).total <= hop.total_bandwidth;
  };
  double const t_star =
      numerics::bisect_last_true(feasible, 0.0, upper, kBisectionWidth);
  if (!(t_star > 0.0)) return plan;

  std::vector<double> const thresholds(n, t_star);
  BandwidthDemand const demand = min_total_bandwidth(hop, thresholds, users);
  double const stretch = hop.total_bandwidth / demand.total;
  for (const auto& entry : demand.users) {
    double const w = entry.bandwidth * stretch;
    double const p = std::min(
        entry.power, inv_min_bandwidth(w, normalized(hop, entry.user), t_star));
    plan.shares[entry.user] = PhaseShare(p, w);
  }
  plan.value = t_star;
  return plan;
}

HopPlan power_min_hop(const Hop& hop, std::span<const double> thresholds,
                      int phase, const solver::SolverConfig& config) {
  auto const program = programs::power_min_program(hop, thresholds, nullptr, phase);
  auto const result = solver::solve(program.program, config);
  require_solved(result, "power_min");

  std::size_t const n = hop.user_count();
  HopPlan plan;
  plan.shares.resize(n);
  double bandwidth = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    bandwidth += program.first.share(result.x, k).bandwidth();
  }
  double const stretch = hop.total_bandwidth / bandwidth;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t const u = program.first.users[k];
    double const w = program.first.share(result.x, k).bandwidth() * stretch;
    double const p =
        inv_min_bandwidth(w, normalized(hop, u), thresholds[u]) * (1.0 + kPowerMargin);
    plan.shares[u] = PhaseShare(p, w);
    plan.value += p;
  }
  return plan;
}

// Bisection on T at fixed per-user bandwidth: T is reachable iff every
// transmitter covers sum_i F^-1_i(w; T).
HopPlan fixed_bandwidth_max_min_hop(const Hop& hop, double w) {
  std::size_t const n = hop.user_count();
  HopPlan plan;
  plan.shares.resize(n);
  if (n == 0) return plan;
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < n; ++u) {
    upper = std::min(upper, link_capacity(hop.budgets[hop.transmitter_of[u]], w,
                                          hop.gains[u], hop.noise_psd));
  }
  auto powers = [&](double t) {
    std::vector<double> spent(hop.budgets.size(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      spent[hop.transmitter_of[u]] += inv_min_bandwidth(w, normalized(hop, u), t);
    }
    return spent;
  };
  auto feasible = [&](double t) {
    auto const spent = powers(t);
    for (std::size_t j = 0; j < spent.size(); ++j) {
      if (spent[j] > hop.budgets[j]) return false;
    }
    return true;
  };
  double const t_star =
      numerics::bisect_last_true(feasible, 0.0, upper, kBisectionWidth);
  if (!(t_star > 0.0)) return plan;
  for (std::size_t u = 0; u < n; ++u) {
    plan.shares[u] = PhaseShare(inv_min_bandwidth(w, normalized(hop, u), t_star), w);
  }
  plan.value = t_star;
  return plan;
}

// Smallest equal per-user bandwidth at which every transmitter can pay
// sum_i F^-1_i(w); +inf when some transmitter cannot cover its floors.
double equal_bandwidth_needed(const Hop& hop, std::span<const double> thresholds) {
  std::size_t const n = hop.user_count();
  auto fits = [&](double w) {
    std::vector<double> spent(hop.budgets.size(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      spent[hop.transmitter_of[u]] +=
          inv_min_bandwidth(w, normalized(hop, u), thresholds[u]);
    }
    for (std::size_t j = 0; j < spent.size(); ++j) {
      if (spent[j] > hop.budgets[j]) return false;
    }
    return true;
  };
  double hi = hop.total_bandwidth / static_cast<double>(n);
  for (int k = 0; !fits(hi); ++k) {
    if (k == 200) return std::numeric_limits<double>::infinity();
    hi *= 2.0;
  }
  double lo = 0.5 * hi;
  if (fits(lo)) lo = 0.0;
  for (int k = 0; k < 200 && hi - lo > 1e-12 * hi; ++k) {
    double const mid = 0.5 * (lo + hi);
    (fits(mid) ? hi : lo) = mid;
  }
  return hi * static_cast<double>(n);
}

HopPlan fixed_bandwidth_power_hop(const Hop& hop, std::span<const double> thresholds,
                                  int phase) {
  std::size_t const n = hop.user_count();
  double const w = hop.total_bandwidth / static_cast<double>(n);
  HopPlan plan;
  plan.shares.resize(n);
  std::vector<double> spent(hop.budgets.size(), 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    double const p = inv_min_bandwidth(w, normalized(hop, u), thresholds[u]);
    plan.shares[u] = PhaseShare(p, w);
    spent[hop.transmitter_of[u]] += p;
    plan.value += p;
  }
  for (std::size_t j = 0; j < spent.size(); ++j) {
    if (spent[j] > hop.budgets[j]) {
      throw InfeasibleInstanceError(
          "equal bandwidth cannot meet the thresholds within the power budgets",
          equal_bandwidth_needed(hop, thresholds), hop.total_bandwidth, phase);
    }
  }
  return plan;
}

HopPlan equal_split_hop(const Hop& hop) {
  std::size_t const n = hop.user_count();
  HopPlan plan;
  plan.shares.resize(n);
  if (n == 0) return plan;
  auto const groups = hop.users_by_transmitter();
  double const w = hop.total_bandwidth / static_cast<double>(n);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    for (auto u : groups[j]) {
      plan.shares[u] =
          PhaseShare(hop.budgets[j] / static_cast<double>(groups[j].size()), w);
    }
  }
  return plan;
}

HopPlan water_filling_hop(const Hop& hop) {
  std::size_t const n = hop.user_count();
  HopPlan plan;
  plan.shares.resize(n);
  if (n == 0) return plan;
  double const w = hop.total_bandwidth / static_cast<double>(n);
  auto const groups = hop.users_by_transmitter();
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].empty()) continue;
    std::vector<double> bandwidths(groups[j].size(), w), gains;
    for (auto u : groups[j]) gains.push_back(hop.gains[u]);
    auto const powers = water_filling(bandwidths, gains, hop.budgets[j], hop.noise_psd);
    for (std::size_t k = 0; k < groups[j].size(); ++k) {
      plan.shares[groups[j][k]] = PhaseShare(powers[k], w);
    }
  }
  return plan;
}

AllocationResult single_hop_result(const NetworkTopology& topology,
                                   const ChannelGains& gains, HopPlan plan) {
  AllocationResult result;
  result.allocation = Allocation::zeros(topology.user_count());
  for (std::size_t u = 0; u < plan.shares.size(); ++u) {
    result.allocation.users[u].source = plan.shares[u];
  }
  result.capacities = user_capacities(topology, gains, result.allocation);
  result.metric = plan.value;
  return result;
}

AllocationResult two_hop_result(const NetworkTopology& topology,
                                const ChannelGains& gains,
                                const std::vector<PhaseShare>& first,
                                const std::vector<PhaseShare>& second) {
  AllocationResult result;
  result.allocation = Allocation::zeros(topology.user_count());
  for (std::size_t u = 0; u < first.size(); ++u) {
    result.allocation.users[u].source = first[u];
    result.allocation.users[u].relay = second[u];
  }
  result.capacities = user_capacities(topology, gains, result.allocation);
  auto const c1 = hop_capacities(first_hop(topology, gains), first);
  auto const c2 = hop_capacities(second_hop(topology, gains), second);
  result.hop_gap.resize(first.size());
  for (std::size_t u = 0; u < first.size(); ++u) result.hop_gap[u] = c1[u] - c2[u];
  return result;
}

double sum_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double min_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return *std::min_element(values.begin(), values.end());
}

double total_power(const Allocation& allocation) {
  double sum = 0.0;
  for (const auto& u : allocation.users) sum += u.source.power() + u.relay.power();
  return sum;
}

void require_mode(const NetworkTopology& topology, bool relay, const char* what) {
  if (topology.relaying() != relay) {
    throw std::invalid_argument(std::string(what) +
                                (relay ? ": requires a relay topology"
                                       : ": requires a topology without relays"));
  }
}

std::vector<double> resolve_thresholds(const NetworkTopology& topology,
                                       std::span<const double> thresholds) {
  if (thresholds.empty()) return thresholds_of(topology);
  if (thresholds.size() != topology.user_count()) {
    throw std::invalid_argument("one threshold per user is required");
  }
  return {thresholds.begin(), thresholds.end()};
}

}  // namespace

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::kSumCapacity: return "sum";
    case Objective::kMaxMin: return "maxmin";
    case Objective::kPowerMin: return "powermin";
  }
  return "?";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kObpa: return "obpa";
    case Scheme::kEbopa: return "ebopa";
    case Scheme::kEbpa: return "ebpa";
  }
  return "?";
}

std::optional<Objective> parse_objective(std::string_view text) {
  for (auto o : {Objective::kSumCapacity, Objective::kMaxMin, Objective::kPowerMin}) {
    if (to_string(o) == text) return o;
  }
  return std::nullopt;
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (auto s : {Scheme::kObpa, Scheme::kEbopa, Scheme::kEbpa}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::vector<double> water_filling(std::span<const double> bandwidths,
                                  std::span<const double> gains, double budget,
                                  double noise_psd) {
  std::size_t const n = bandwidths.size();
  if (gains.size() != n) throw std::invalid_argument("water_filling: size mismatch");
  std::vector<double> powers(n, 0.0);
  if (n == 0 || budget <= 0.0) return powers;

  // Strongest channels fill first: sort by inverse gain (the floor).
  std::vector<std::size_t> order = all_users(n);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gains[a] > gains[b];
  });
  double weight = 0.0, floor_mass = 0.0, level = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t const i = order[k];
    double const floor = noise_psd / gains[i];
    double const trial = (budget + floor_mass + bandwidths[i] * floor) /
                         (weight + bandwidths[i]);
    if (k > 0 && trial <= floor) break;
    weight += bandwidths[i];
    floor_mass += bandwidths[i] * floor;
    level = trial;
    active = k + 1;
  }
  for (std::size_t k = 0; k < active; ++k) {
    std::size_t const i = order[k];
    powers[i] = std::max(0.0, bandwidths[i] * (level - noise_psd / gains[i]));
  }
  return powers;
}

std::vector<std::size_t> dominated_relay_users(const NetworkTopology& topology,
                                               const ChannelGains& gains) {
  std::size_t const n = topology.user_count();
  auto const sources = topology.source_index_of_users();
  auto const relays = topology.relay_index_of_users();
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j || sources[i] != sources[j] || relays[i] != relays[j]) continue;
      double const a1 = gains.first_hop[i], b1 = gains.first_hop[j];
      double const a2 = gains.second_hop[i], b2 = gains.second_hop[j];
      if (a1 < b1 || a2 < b2) continue;
      bool const strict = a1 > b1 || a2 > b2;
      if (strict || topology.users[i].id < topology.users[j].id) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

AllocationResult sum_capacity_no_relay(const NetworkTopology& topology,
                                       const ChannelGains& gains) {
  require_mode(topology, false, "sum_capacity_no_relay");
  Hop const hop = direct_hop(topology, gains);
  auto const groups = hop.users_by_transmitter();
  std::vector<std::size_t> winners;
  double weight = 0.0;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].empty()) continue;
    std::size_t best = groups[j].front();
    for (auto u : groups[j]) {
      if (hop.gains[u] > hop.gains[best] ||
          (hop.gains[u] == hop.gains[best] &&
           topology.users[u].id < topology.users[best].id)) {
        best = u;
      }
    }
    winners.push_back(best);
    weight += hop.gains[best] * hop.budgets[j];
  }
  HopPlan plan;
  plan.shares.resize(hop.user_count());
  for (auto u : winners) {
    double const p = hop.budgets[hop.transmitter_of[u]];
    plan.shares[u] = PhaseShare(p, hop.total_bandwidth * hop.gains[u] * p / weight);
  }
  auto result = single_hop_result(topology, gains, std::move(plan));
  result.metric = sum_of(result.capacities);
  return result;
}

AllocationResult sum_capacity_relay(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    const solver::SolverConfig& config) {
  require_mode(topology, true, "sum_capacity_relay");
  Hop const hop1 = first_hop(topology, gains);
  Hop const hop2 = second_hop(topology, gains);
  std::size_t const n = topology.user_count();

  auto const dominated = dominated_relay_users(topology, gains);
  std::vector<std::size_t> active;
  for (std::size_t u = 0; u < n; ++u) {
    if (!std::binary_search(dominated.begin(), dominated.end(), u)) active.push_back(u);
  }

  std::vector<PhaseShare> first(n), second(n);
  if (!active.empty()) {
    auto const program = programs::relay_sum_capacity_program(hop1, hop2, active);
    auto const solved = solver::solve(program.program, config);
    require_solved(solved, "sum_capacity_relay");
    for (std::size_t k = 0; k < active.size(); ++k) {
      std::size_t const u = active[k];
      PhaseShare const a = program.first.share(solved.x, k);
      PhaseShare const b = program.second->share(solved.x, k);
      bool const sparse =
          a.power() < kSparseFraction * hop1.budgets[hop1.transmitter_of[u]] ||
          b.power() < kSparseFraction * hop2.budgets[hop2.transmitter_of[u]] ||
          a.bandwidth() < kSparseFraction * hop1.total_bandwidth ||
          b.bandwidth() < kSparseFraction * hop2.total_bandwidth;
      if (sparse) continue;
      first[u] = a;
      second[u] = b;
    }
    fill_caps(hop1, first, true);
    fill_caps(hop2, second, true);
  }
  auto result = two_hop_result(topology, gains, first, second);
  result.metric = sum_of(result.capacities);
  return result;
}

AllocationResult max_min_no_relay(const NetworkTopology& topology,
                                  const ChannelGains& gains) {
  require_mode(topology, false, "max_min_no_relay");
  return single_hop_result(topology, gains, max_min_hop(direct_hop(topology, gains)));
}

AllocationResult max_min_relay(const NetworkTopology& topology,
                               const ChannelGains& gains) {
  require_mode(topology, true, "max_min_relay");
  HopPlan const a = max_min_hop(first_hop(topology, gains));
  HopPlan const b = max_min_hop(second_hop(topology, gains));
  auto result = two_hop_result(topology, gains, a.shares, b.shares);
  result.metric = std::min(a.value, b.value);
  return result;
}

AllocationResult power_min_no_relay(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    std::span<const double> thresholds,
                                    const solver::SolverConfig& config) {
  require_mode(topology, false, "power_min_no_relay");
  auto const c = resolve_thresholds(topology, thresholds);
  return single_hop_result(topology, gains,
                           power_min_hop(direct_hop(topology, gains), c, 0, config));
}

AllocationResult power_min_relay(const NetworkTopology& topology,
                                 const ChannelGains& gains,
                                 std::span<const double> thresholds,
                                 const solver::SolverConfig& config) {
  require_mode(topology, true, "power_min_relay");
  auto const c = resolve_thresholds(topology, thresholds);
  HopPlan const a = power_min_hop(first_hop(topology, gains), c, 1, config);
  HopPlan const b = power_min_hop(second_hop(topology, gains), c, 2, config);
  auto result = two_hop_result(topology, gains, a.shares, b.shares);
  result.metric = a.value + b.value;
  return result;
}

AllocationResult ebopa(const NetworkTopology& topology, const ChannelGains& gains,
                       Objective objective, std::span<const double> thresholds) {
  std::size_t const n = topology.user_count();
  if (n == 0) return {};
  bool const relay = topology.relaying();
  double const w = topology.total_bandwidth / static_cast<double>(n);

  switch (objective) {
    case Objective::kSumCapacity: {
      if (!relay) {
        auto result =
            single_hop_result(topology, gains, water_filling_hop(direct_hop(topology, gains)));
        result.metric = sum_of(result.capacities);
        return result;
      }
      Hop const hop1 = first_hop(topology, gains);
      Hop const hop2 = second_hop(topology, gains);
      auto const users = all_users(n);
      auto const program = programs::relay_sum_capacity_program(hop1, hop2, users, w);
      auto const solved = solver::solve(program.program);
      require_solved(solved, "ebopa");
      std::vector<PhaseShare> first(n), second(n);
      for (std::size_t u = 0; u < n; ++u) {
        first[u] = program.first.share(solved.x, u);
        second[u] = program.second->share(solved.x, u);
      }
      fill_caps(hop1, first, false);
      fill_caps(hop2, second, false);
      auto result = two_hop_result(topology, gains, first, second);
      result.metric = sum_of(result.capacities);
      return result;
    }
    case Objective::kMaxMin: {
      if (!relay) {
        return single_hop_result(
            topology, gains, fixed_bandwidth_max_min_hop(direct_hop(topology, gains), w));
      }
      HopPlan const a = fixed_bandwidth_max_min_hop(first_hop(topology, gains), w);
      HopPlan const b = fixed_bandwidth_max_min_hop(second_hop(topology, gains), w);
      auto result = two_hop_result(topology, gains, a.shares, b.shares);
      result.metric = std::min(a.value, b.value);
      return result;
    }
    case Objective::kPowerMin: {
      auto const c = resolve_thresholds(topology, thresholds);
      if (!relay) {
        return single_hop_result(
            topology, gains, fixed_bandwidth_power_hop(direct_hop(topology, gains), c, 0));
      }
      HopPlan const a = fixed_bandwidth_power_hop(first_hop(topology, gains), c, 1);
      HopPlan const b = fixed_bandwidth_power_hop(second_hop(topology, gains), c, 2);
      auto result = two_hop_result(topology, gains, a.shares, b.shares);
      result.metric = a.value + b.value;
      return result;
    }
  }
  throw std::invalid_argument("ebopa: unknown objective");
}

AllocationResult ebpa(const NetworkTopology& topology, const ChannelGains& gains,
                      Objective objective) {
  AllocationResult result;
  if (!topology.relaying()) {
    result = single_hop_result(topology, gains,
                               equal_split_hop(direct_hop(topology, gains)));
  } else {
    result = two_hop_result(topology, gains,
                            equal_split_hop(first_hop(topology, gains)).shares,
                            equal_split_hop(second_hop(topology, gains)).shares);
  }
  switch (objective) {
    case Objective::kSumCapacity: result.metric = sum_of(result.capacities); break;
    case Objective::kMaxMin: result.metric = min_of(result.capacities); break;
    case Objective::kPowerMin: result.metric = total_power(result.allocation); break;
  }
  return result;
}

AllocationResult allocate(const NetworkTopology& topology, const ChannelGains& gains,
                          Objective objective, Scheme scheme,
                          std::span<const double> thresholds) {
  bool const relay = topology.relaying();
  switch (scheme) {
    case Scheme::kEbopa: return ebopa(topology, gains, objective, thresholds);
    case Scheme::kEbpa: return ebpa(topology, gains, objective);
    case Scheme::kObpa: break;
  }
  switch (objective) {
    case Objective::kSumCapacity:
      return relay ? sum_capacity_relay(topology, gains)
                   : sum_capacity_no_relay(topology, gains);
    case Objective::kMaxMin:
      return relay ? max_min_relay(topology, gains) : max_min_no_relay(topology, gains);
    case Objective::kPowerMin:
      return relay ? power_min_relay(topology, gains, thresholds)
                   : power_min_no_relay(topology, gains, thresholds);
  }
  throw std::invalid_argument("allocate: unknown objective");
}

}  // namespace bwalloc
