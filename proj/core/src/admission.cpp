#include "bwalloc/admission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/errors.hpp"
#include "bwalloc/root_finding.hpp"

namespace bwalloc {

namespace {

constexpr double kTieTolerance = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// G together with the power deficit, so infeasible sets can be ranked by
// how far they are from feasibility.
struct Demand {
  double g = 0.0;
  double deficit = 0.0;
};

int compare(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0;
  double const scale = std::max(1.0, std::min(std::abs(a), std::abs(b)));
  if (std::abs(a - b) <= kTieTolerance * scale) return 0;
  return a < b ? -1 : 1;
}

int compare(const Demand& a, const Demand& b) {
  if (int const c = compare(a.g, b.g); c != 0) return c;
  return compare(a.deficit, b.deficit);
}

Demand evaluate_source(const Hop& hop, std::span<const double> thresholds,
                       std::size_t transmitter,
                       const std::vector<std::size_t>& members) {
  if (members.empty()) return {};
  auto const request = demand_users(hop, thresholds, members);
  BandwidthDemand const d = min_bandwidth_one_source(request, hop.budgets[transmitter]);
  return {d.total, d.power_deficit};
}

Demand evaluate_set(const Hop& hop, std::span<const double> thresholds,
                    std::span<const std::size_t> subset) {
  BandwidthDemand const d = min_total_bandwidth(hop, thresholds, subset);
  return {d.total, d.power_deficit};
}

Demand add(const std::vector<Demand>& parts, std::size_t skip, const Demand& replace) {
  Demand sum;
  for (std::size_t t = 0; t < parts.size(); ++t) {
    const Demand& d = t == skip ? replace : parts[t];
    sum.g += d.g;
    sum.deficit += d.deficit;
  }
  return sum;
}

std::vector<int> ids_of(std::span<const int> ids, std::span<const std::size_t> subset) {
  std::vector<int> out;
  out.reserve(subset.size());
  for (auto u : subset) out.push_back(ids[u]);
  std::sort(out.begin(), out.end());
  return out;
}

// Visits every k-subset of {0..n-1} in lexicographic order.
template <class Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
  std::vector<std::size_t> subset(k);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  while (true) {
    visit(std::span<const std::size_t>(subset));
    std::size_t i = k;
    while (i > 0 && subset[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++subset[i - 1];
    for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
}

std::vector<int> topology_ids(const NetworkTopology& topology) {
  std::vector<int> ids;
  for (const auto& u : topology.users) ids.push_back(u.id);
  return ids;
}

std::vector<double> resolve(const NetworkTopology& topology,
                            std::span<const double> thresholds) {
  if (thresholds.empty()) return thresholds_of(topology);
  if (thresholds.size() != topology.user_count()) {
    throw std::invalid_argument("one threshold per user is required");
  }
  return {thresholds.begin(), thresholds.end()};
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t out = 1;
  for (std::size_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// A hop holding one transmitter's users only, renumbered 0..m-1.
struct SourceView {
  Hop hop;
  std::vector<double> thresholds;
  std::vector<int> ids;
  std::vector<std::size_t> original;
};

SourceView source_view(const Hop& hop, std::span<const double> thresholds,
                       std::span<const int> ids, std::size_t transmitter,
                       const std::vector<std::size_t>& members) {
  SourceView view;
  view.hop.budgets = {hop.budgets[transmitter]};
  view.hop.total_bandwidth = hop.total_bandwidth;
  view.hop.noise_psd = hop.noise_psd;
  for (auto u : members) {
    view.hop.transmitter_of.push_back(0);
    view.hop.gains.push_back(hop.gains[u]);
    view.thresholds.push_back(thresholds[u]);
    view.ids.push_back(ids[u]);
    view.original.push_back(u);
  }
  return view;
}

}  // namespace

AdmissionResult greedy_admission(const Hop& hop, std::span<const double> thresholds,
                                 std::span<const int> ids, double bandwidth) {
  if (thresholds.size() != hop.user_count() || ids.size() != hop.user_count()) {
    throw std::invalid_argument("greedy_admission: one threshold and id per user");
  }
  auto groups = hop.users_by_transmitter();
  std::size_t const sources = groups.size();
  std::vector<std::map<std::vector<std::size_t>, Demand>> memo(sources);
  AdmissionResult result;

  auto lookup = [&](std::size_t t, const std::vector<std::size_t>& members,
                    std::size_t& counter) {
    auto [it, inserted] = memo[t].try_emplace(members);
    if (inserted) {
      it->second = evaluate_source(hop, thresholds, t, members);
      ++counter;
    }
    return it->second;
  };

  std::vector<Demand> parts(sources);
  for (std::size_t t = 0; t < sources; ++t) {
    std::size_t ignored = 0;
    parts[t] = lookup(t, groups[t], ignored);
  }
  result.initial_calls = 1;
  Demand total = add(parts, sources, {});

  while (!(total.g <= bandwidth)) {
    std::optional<std::size_t> best_user;
    std::size_t best_source = 0;
    Demand best, best_part;
    for (std::size_t t = 0; t < sources; ++t) {
      for (std::size_t k = 0; k < groups[t].size(); ++k) {
        std::vector<std::size_t> rest = groups[t];
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
        Demand const part = lookup(t, rest, result.oracle_calls);
        Demand const candidate = add(parts, t, part);
        std::size_t const u = groups[t][k];
        int const c = best_user ? compare(candidate, best) : -1;
        if (c < 0 || (c == 0 && ids[u] > ids[*best_user])) {
          best_user = u;
          best_source = t;
          best = candidate;
          best_part = part;
        }
      }
    }
    if (!best_user) break;
    RemovalStep step;
    step.user = *best_user;
    step.transmitter = best_source;
    step.g_before = total.g;
    step.g_after = best.g;
    step.source_g_before = parts[best_source].g;
    step.source_g_after = best_part.g;
    result.removal_trace.push_back(step);

    auto& members = groups[best_source];
    members.erase(std::find(members.begin(), members.end(), *best_user));
    parts[best_source] = best_part;
    total = best;
    ++result.t_star;
  }

  for (const auto& members : groups) {
    result.admitted.insert(result.admitted.end(), members.begin(), members.end());
  }
  std::sort(result.admitted.begin(), result.admitted.end());
  result.g_admitted = total.g;
  return result;
}

AdmissionResult exhaustive_admission(const Hop& hop,
                                     std::span<const double> thresholds,
                                     std::span<const int> ids, double bandwidth,
                                     std::size_t cap) {
  std::size_t const n = hop.user_count();
  if (n > cap) throw InstanceTooLargeError(n, cap);
  if (thresholds.size() != n || ids.size() != n) {
    throw std::invalid_argument("exhaustive_admission: one threshold and id per user");
  }
  AdmissionResult result;
  for (std::size_t k = n + 1; k-- > 0;) {
    std::optional<std::vector<std::size_t>> best;
    double best_g = kInf;
    for_each_subset(n, k, [&](std::span<const std::size_t> subset) {
      ++result.oracle_calls;
      double const g = evaluate_set(hop, thresholds, subset).g;
      if (!(g <= bandwidth)) return;
      int const c = best ? compare(g, best_g) : -1;
      if (c < 0 || (c == 0 && ids_of(ids, subset) < ids_of(ids, *best))) {
        best.emplace(subset.begin(), subset.end());
        best_g = g;
      }
    });
    if (best) {
      result.admitted = *best;
      result.g_admitted = best_g;
      result.t_star = n - k;
      break;
    }
  }
  return result;
}

AdmissionResult greedy_admission_no_relay(const NetworkTopology& topology,
                                          const ChannelGains& gains,
                                          std::span<const double> thresholds) {
  auto const c = resolve(topology, thresholds);
  auto const ids = topology_ids(topology);
  return greedy_admission(direct_hop(topology, gains), c, ids,
                          topology.total_bandwidth);
}

AdmissionResult exhaustive_admission_no_relay(const NetworkTopology& topology,
                                              const ChannelGains& gains,
                                              std::span<const double> thresholds,
                                              std::size_t cap) {
  if (topology.user_count() > cap) {
    throw InstanceTooLargeError(topology.user_count(), cap);
  }
  auto const c = resolve(topology, thresholds);
  auto const ids = topology_ids(topology);
  return exhaustive_admission(direct_hop(topology, gains), c, ids,
                              topology.total_bandwidth, cap);
}

namespace {

// Largest jointly feasible subset with at most `limit` users; ties go to
// the smallest G1 + G2, then to the smaller id list.
AdmissionResult joint_search(const Hop& hop1, const Hop& hop2,
                             std::span<const double> thresholds,
                             std::span<const int> ids, double bandwidth,
                             std::size_t limit) {
  std::size_t const n = hop1.user_count();
  AdmissionResult result;
  for (std::size_t k = std::min(limit, n) + 1; k-- > 0;) {
    std::optional<std::vector<std::size_t>> best;
    double best_sum = kInf, best_g1 = 0.0, best_g2 = 0.0;
    for_each_subset(n, k, [&](std::span<const std::size_t> subset) {
      result.oracle_calls += 2;
      double const g1 = evaluate_set(hop1, thresholds, subset).g;
      double const g2 = evaluate_set(hop2, thresholds, subset).g;
      if (!(g1 <= bandwidth && g2 <= bandwidth)) return;
      int const c = best ? compare(g1 + g2, best_sum) : -1;
      if (c < 0 || (c == 0 && ids_of(ids, subset) < ids_of(ids, *best))) {
        best.emplace(subset.begin(), subset.end());
        best_sum = g1 + g2;
        best_g1 = g1;
        best_g2 = g2;
      }
    });
    if (best) {
      result.admitted = *best;
      result.g_admitted = best_g1;
      result.g_second = best_g2;
      result.t_star = n - k;
      break;
    }
  }
  return result;
}

}  // namespace

RelayAdmissionResult greedy_admission_relay(const NetworkTopology& topology,
                                            const ChannelGains& gains,
                                            std::span<const double> thresholds,
                                            std::size_t cap) {
  auto const c = resolve(topology, thresholds);
  auto const ids = topology_ids(topology);
  Hop const hop1 = first_hop(topology, gains);
  Hop const hop2 = second_hop(topology, gains);
  double const w = topology.total_bandwidth;
  std::size_t const n = topology.user_count();

  RelayAdmissionResult out;
  out.phase1 = greedy_admission(hop1, c, ids, w);
  out.phase2 = greedy_admission(hop2, c, ids, w);
  out.d_prime = std::min(n - out.phase1.t_star, n - out.phase2.t_star);

  std::size_t const greedy_calls = out.phase1.oracle_calls + out.phase2.oracle_calls;
  out.combined.initial_calls = out.phase1.initial_calls + out.phase2.initial_calls;
  if (out.phase1.t_star == 0 && out.phase2.t_star == 0) {
    out.combined.admitted = out.phase1.admitted;
    out.combined.g_admitted = out.phase1.g_admitted;
    out.combined.g_second = out.phase2.g_admitted;
    out.combined.oracle_calls = greedy_calls;
    return out;
  }
  if (n > cap) throw InstanceTooLargeError(n, cap);
  AdmissionResult joint = joint_search(hop1, hop2, c, ids, w, out.d_prime);
  out.exhaustive_stage = true;
  out.exhaustive_subsets = joint.oracle_calls / 2;
  joint.oracle_calls += greedy_calls;
  joint.initial_calls = out.combined.initial_calls;
  out.combined = std::move(joint);
  return out;
}

AdmissionResult exhaustive_admission_relay(const NetworkTopology& topology,
                                           const ChannelGains& gains,
                                           std::span<const double> thresholds,
                                           std::size_t cap) {
  std::size_t const n = topology.user_count();
  if (n > cap) throw InstanceTooLargeError(n, cap);
  auto const c = resolve(topology, thresholds);
  auto const ids = topology_ids(topology);
  return joint_search(first_hop(topology, gains), second_hop(topology, gains), c,
                      ids, topology.total_bandwidth, n);
}

PairClassification classify_pair(double h_i, double c_i, double h_j, double c_j,
                                 double power_cap) {
  for (double v : {h_i, c_i, h_j, c_j, power_cap}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("classify_pair: inputs must be positive and finite");
    }
  }
  bool const swapped = h_j < h_i;
  if (swapped) {
    std::swap(h_i, h_j);
    std::swap(c_i, c_j);
  }
  auto orient = [swapped](PairRelation r) {
    if (!swapped) return r;
    if (r == PairRelation::kFirstDominates) return PairRelation::kSecondDominates;
    if (r == PairRelation::kSecondDominates) return PairRelation::kFirstDominates;
    return r;
  };

  double const r = c_j / c_i;
  double const ratio = h_j / h_i;
  PairClassification out;
  if (h_i == h_j && c_i == c_j) return out;
  if (r <= 1.0) {
    out.relation = orient(PairRelation::kSecondDominates);
    return out;
  }
  if (r >= ratio) {
    out.relation = orient(PairRelation::kFirstDominates);
    return out;
  }

  // q(x) = ln(1 + h_j x) / ln(1 + h_i x) falls from h_j/h_i to 1 as x = p/w
  // grows; the curves cross where q(x) = c_j/c_i.
  auto residual = [&](double x) {
    double const li = std::log1p(h_i * x), lj = std::log1p(h_j * x);
    double const dq = (h_j / (1.0 + h_j * x) * li - lj * h_i / (1.0 + h_i * x)) / (li * li);
    return std::pair{r - lj / li, -dq};
  };
  out.relation = PairRelation::kUniqueIntersection;
  double lo = 1.0, hi = 1.0;
  while (residual(lo).first > 0.0) lo *= 0.25;
  while (residual(hi).first < 0.0) {
    hi *= 4.0;
    if (hi > 1e300) {
      out.crossing_power = kInf;
      return out;
    }
  }
  double const x = numerics::solve_increasing(residual, lo, hi, 1e-13);
  double const w = c_i / std::log1p(h_i * x);
  out.crossing_power = x * w;
  out.inside_budget = out.crossing_power < power_cap;
  return out;
}

bool removal_gains_diminish(std::span<const RemovalStep> trace) {
  std::map<std::size_t, double> previous;
  for (const auto& step : trace) {
    double const gain = step.source_g_before - step.source_g_after;
    if (!std::isfinite(gain)) continue;
    auto it = previous.find(step.transmitter);
    if (it != previous.end() && !(gain < it->second)) return false;
    previous[step.transmitter] = gain;
  }
  return true;
}

OptimalityReport check_optimality_conditions(const Hop& hop,
                                             std::span<const double> thresholds,
                                             std::span<const int> ids,
                                             std::size_t cap) {
  OptimalityReport report;
  report.equal_thresholds = std::all_of(thresholds.begin(), thresholds.end(),
                                        [&](double c) { return c == thresholds.front(); });
  bool all_checked = true;
  bool c1 = true;
  auto const groups = hop.users_by_transmitter();
  for (std::size_t t = 0; t < groups.size(); ++t) {
    const auto& members = groups[t];
    if (members.empty()) continue;
    SourceConditions cond;
    cond.transmitter = t;
    cond.users = members.size();

    for (auto i : members) {
      std::size_t crossings = 0;
      for (auto j : members) {
        if (i == j) continue;
        auto const pair = classify_pair(hop.gains[i] / hop.noise_psd, thresholds[i],
                                        hop.gains[j] / hop.noise_psd, thresholds[j],
                                        hop.budgets[t]);
        if (pair.relation == PairRelation::kUniqueIntersection && pair.inside_budget) {
          ++crossings;
        }
      }
      cond.max_crossings = std::max(cond.max_crossings, crossings);
    }
    cond.few_crossings = cond.max_crossings <= 1;

    SourceView const view = source_view(hop, thresholds, ids, t, members);
    AdmissionResult const full =
        greedy_admission(view.hop, view.thresholds, view.ids, -kInf);
    cond.diminishing_gains = removal_gains_diminish(full.removal_trace);

    if (members.size() <= cap) {
      std::size_t const m = members.size();
      std::vector<std::size_t> remaining(m);
      std::iota(remaining.begin(), remaining.end(), std::size_t{0});
      bool holds = true;
      for (std::size_t step = 0; step < full.removal_trace.size() && holds; ++step) {
        remaining.erase(std::find(remaining.begin(), remaining.end(),
                                  full.removal_trace[step].user));
        Demand const greedy = evaluate_set(view.hop, view.thresholds, remaining);
        std::optional<Demand> best;
        for_each_subset(m, remaining.size(), [&](std::span<const std::size_t> s) {
          Demand const d = evaluate_set(view.hop, view.thresholds, s);
          if (!best || compare(d, *best) < 0) best = d;
        });
        holds = compare(greedy, *best) == 0;
      }
      cond.best_sets = holds;
      c1 = c1 && holds;
    } else {
      all_checked = false;
    }
    report.few_crossings = report.few_crossings && cond.few_crossings;
    report.diminishing_gains = report.diminishing_gains && cond.diminishing_gains;
    report.sources.push_back(cond);
  }
  if (all_checked) report.best_sets = c1;
  if (report.best_sets) {
    report.guaranteed = *report.best_sets && report.diminishing_gains;
  } else {
    report.guaranteed = (report.equal_thresholds || report.few_crossings) &&
                        report.diminishing_gains;
  }
  return report;
}

OptimalityReport check_optimality_conditions(const NetworkTopology& topology,
                                             const ChannelGains& gains,
                                             std::span<const double> thresholds,
                                             std::size_t cap) {
  auto const c = resolve(topology, thresholds);
  auto const ids = topology_ids(topology);
  return check_optimality_conditions(direct_hop(topology, gains), c, ids, cap);
}

std::size_t greedy_call_bound(std::size_t n, std::size_t t_star) {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < t_star && i < n; ++i) sum += n - i;
  return sum;
}

std::size_t exhaustive_call_bound(std::size_t n, std::size_t d, std::size_t hi) {
  std::size_t sum = 0;
  for (std::size_t i = d; i <= hi && i <= n; ++i) sum += binomial(n, i);
  return sum;
}

}  // namespace bwalloc
