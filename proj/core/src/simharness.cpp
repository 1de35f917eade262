#include "bwalloc/simharness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "bwalloc/admission.hpp"
#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/capacity.hpp"
#include "bwalloc/errors.hpp"

namespace bwalloc::sim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDominanceSlack = 1e-6;
constexpr int kMaxRedraws = 100;

enum Stream : std::uint64_t { kPositions = 0, kFading = 1, kThresholds = 2 };

template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", v);
  return buffer;
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Point draw_point(const ScenarioConfig& config, RandomStream& rng) {
  double const x = config.area_min.x + (config.area_max.x - config.area_min.x) * rng.uniform();
  double const y = config.area_min.y + (config.area_max.y - config.area_min.y) * rng.uniform();
  return {x, y};
}

bool inside(const ScenarioConfig& config, const Point& p) {
  return p.x >= config.area_min.x && p.x <= config.area_max.x &&
         p.y >= config.area_min.y && p.y <= config.area_max.y;
}

struct Summary {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = pairwise_sum(values.data(), values.size()) / static_cast<double>(s.n);
  if (s.n > 1) {
    std::vector<double> squares(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      squares[i] = (values[i] - s.mean) * (values[i] - s.mean);
    }
    double const variance =
        pairwise_sum(squares.data(), squares.size()) / static_cast<double>(s.n - 1);
    s.stderr_ = std::sqrt(variance / static_cast<double>(s.n));
  }
  return s;
}

bool meets_thresholds(const AllocationResult& result, const NetworkTopology& topology,
                      double rel_tol) {
  for (std::size_t u = 0; u < topology.user_count(); ++u) {
    double const c = *topology.users[u].c_min;
    if (result.capacities[u] < c * (1.0 - rel_tol)) return false;
  }
  return true;
}

struct RunOutcome {
  std::vector<double> metric;  // NaN: no answer
  std::vector<bool> failed;
  bool dominance_ok = true;
  bool feasible_ok = true;
};

RunOutcome evaluate_run(const Scenario& scenario, const std::vector<Scheme>& schemes,
                        Objective objective) {
  const auto& topology = scenario.topology;
  RunOutcome out;
  out.metric.assign(schemes.size(), kNaN);
  out.failed.assign(schemes.size(), false);
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    try {
      AllocationResult const r = allocate(topology, scenario.gains, objective, schemes[k]);
      if (!check_feasibility(topology, r.allocation).satisfied) out.feasible_ok = false;
      if (objective == Objective::kPowerMin && !meets_thresholds(r, topology, 1e-8)) {
        if (schemes[k] != Scheme::kEbpa) out.feasible_ok = false;
        continue;
      }
      out.metric[k] = r.metric;
    } catch (const InfeasibleInstanceError&) {
    } catch (const std::exception&) {
      out.failed[k] = true;
    }
  }

  auto metric_of = [&](Scheme s) -> double {
    for (std::size_t k = 0; k < schemes.size(); ++k) {
      if (schemes[k] == s) return out.metric[k];
    }
    return kNaN;
  };
  double const obpa = metric_of(Scheme::kObpa);
  double const ebopa = metric_of(Scheme::kEbopa);
  double const ebpa = metric_of(Scheme::kEbpa);
  auto at_least = [](double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return true;
    return a >= b - kDominanceSlack * std::max(std::abs(a), std::abs(b));
  };
  if (objective == Objective::kPowerMin) {
    out.dominance_ok = at_least(ebopa, obpa) && at_least(ebpa, obpa);
  } else {
    out.dominance_ok = at_least(obpa, ebopa) && at_least(ebopa, ebpa) && at_least(obpa, ebpa);
  }
  return out;
}

// EBOPA feasibility at threshold c: F^-1(W/N) per user within each budget.
bool equal_bandwidth_feasible(const Hop& hop, std::span<const double> thresholds) {
  double const w = hop.total_bandwidth / static_cast<double>(hop.user_count());
  std::vector<double> spent(hop.budgets.size(), 0.0);
  for (std::size_t u = 0; u < hop.user_count(); ++u) {
    spent[hop.transmitter_of[u]] +=
        inv_min_bandwidth(w, hop.gains[u] / hop.noise_psd, thresholds[u]);
  }
  for (std::size_t j = 0; j < spent.size(); ++j) {
    if (spent[j] > hop.budgets[j]) return false;
  }
  return true;
}

bool oracle_feasible(const Hop& hop, std::span<const double> thresholds) {
  std::vector<std::size_t> all(hop.user_count());
  for (std::size_t u = 0; u < all.size(); ++u) all[u] = u;
  return min_total_bandwidth(hop, thresholds, all).total <= hop.total_bandwidth;
}

std::vector<Hop> hops_of(const Scenario& s) {
  if (s.topology.relaying()) {
    return {first_hop(s.topology, s.gains), second_hop(s.topology, s.gains)};
  }
  return {direct_hop(s.topology, s.gains)};
}

ScenarioConfig setup_base() {
  ScenarioConfig c;
  c.relay_positions.clear();
  c.relay_of_user.clear();
  c.fading_mean = 10.0;
  c.bandwidth = 10.0;
  c.threshold = 1.0;
  c.threshold_spread = 4.0;
  c.runs = 20;
  return c;
}

}  // namespace

std::size_t ScenarioConfig::source_count() const {
  if (source_of_user.empty()) return 0;
  return *std::max_element(source_of_user.begin(), source_of_user.end()) + 1;
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig setup_config(int setup) {
  ScenarioConfig c = setup_base();
  switch (setup) {
    case 1:
    case 3:
      c.source_of_user = {0, 0, 1, 1, 2, 2, 3, 3};
      c.source_power = 40.0;
      if (setup == 3) {
        c.relay_positions = {{5.0, 2.0}, {5.0, 4.0}, {5.0, 6.0}, {5.0, 8.0}};
        c.relay_of_user = {0, 0, 1, 1, 2, 2, 3, 3};
        c.relay_power = 40.0;
      }
      return c;
    case 2:
    case 4:
      c.source_of_user = {0, 0, 0, 0, 1, 1, 1, 1};
      c.source_power = 80.0;
      if (setup == 4) {
        c.relay_positions = {{5.0, 3.0}, {5.0, 7.0}};
        c.relay_of_user = {0, 0, 1, 1, 1, 1, 0, 0};
        c.relay_power = 80.0;
      }
      return c;
    default:
      throw std::invalid_argument("setup must be 1, 2, 3 or 4");
  }
}

std::vector<std::string> validate(const ScenarioConfig& config) {
  std::vector<std::string> issues;
  if (config.runs < 1) issues.emplace_back("runs must be at least 1");
  if (!(config.fading_mean > 0.0)) issues.emplace_back("fading_mean must be positive");
  if (!(config.noise_psd > 0.0)) issues.emplace_back("noise_psd must be positive");
  if (!(config.bandwidth > 0.0)) issues.emplace_back("bandwidth must be positive");
  if (!(config.source_power > 0.0)) issues.emplace_back("source_power must be positive");
  if (config.relaying() && !(config.relay_power > 0.0)) {
    issues.emplace_back("relay_power must be positive");
  }
  if (!(config.threshold > 0.0)) issues.emplace_back("threshold must be positive");
  if (!(config.threshold_spread >= 0.0)) {
    issues.emplace_back("threshold_spread must be nonnegative");
  }
  if (!(config.area_max.x > config.area_min.x && config.area_max.y > config.area_min.y)) {
    issues.emplace_back("area must have positive extent");
  }
  if (config.source_of_user.empty()) issues.emplace_back("at least one user is required");
  for (std::size_t s = 0; s < config.source_count(); ++s) {
    if (std::find(config.source_of_user.begin(), config.source_of_user.end(), s) ==
        config.source_of_user.end()) {
      issues.push_back("source " + std::to_string(s) + " serves no user");
    }
  }
  if (config.relaying()) {
    if (config.relay_of_user.size() != config.user_count()) {
      issues.emplace_back("relay_of_user needs one entry per user");
    }
    for (auto r : config.relay_of_user) {
      if (r >= config.relay_positions.size()) {
        issues.push_back("relay index " + std::to_string(r) + " out of range");
      }
    }
    for (const auto& p : config.relay_positions) {
      if (!inside(config, p)) issues.emplace_back("relay position outside the area");
    }
  } else if (!config.relay_of_user.empty()) {
    issues.emplace_back("relay_of_user given without relay_positions");
  }
  return issues;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                    static_cast<std::uint32_t>(stream)};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double path_loss(double d) {
  if (!(d > 0.0)) throw std::invalid_argument("path_loss: distance must be positive");
  return 1.0 / (d * d);
}

double fading_gain(double mean, double uniform) { return -mean * std::log1p(-uniform); }

GeneratedScenario generate_scenario(const ScenarioConfig& config, std::size_t run) {
  if (auto issues = validate(config); !issues.empty()) {
    throw std::invalid_argument("invalid scenario config: " + issues.front());
  }
  std::size_t const n = config.user_count();
  std::size_t const m = config.source_count();
  RandomStream positions(config.seed, run, kPositions);
  RandomStream fading(config.seed, run, kFading);
  RandomStream thresholds(config.seed, run, kThresholds);

  GeneratedScenario out;
  auto& layout = out.layout;
  for (std::size_t s = 0; s < m; ++s) layout.sources.push_back(draw_point(config, positions));
  for (std::size_t u = 0; u < n; ++u) {
    Point const& src = layout.sources[config.source_of_user[u]];
    Point dst = draw_point(config, positions);
    auto degenerate = [&](const Point& p) {
      if (distance(src, p) <= 0.0) return true;
      return config.relaying() &&
             distance(config.relay_positions[config.relay_of_user[u]], p) <= 0.0;
    };
    int redraws = 0;
    while (degenerate(dst)) {
      if (++redraws > kMaxRedraws) {
        throw std::runtime_error("generate_scenario: degenerate geometry");
      }
      dst = draw_point(config, positions);
    }
    layout.destinations.push_back(dst);
  }

  auto& topo = out.scenario.topology;
  topo.total_bandwidth = config.bandwidth;
  topo.noise_psd = config.noise_psd;
  for (std::size_t s = 0; s < m; ++s) {
    topo.sources.push_back({static_cast<int>(s + 1), config.source_power});
  }
  for (std::size_t r = 0; r < config.relay_positions.size(); ++r) {
    topo.relays.push_back({static_cast<int>(r + 1), config.relay_power});
  }
  auto& gains = out.scenario.gains;
  for (std::size_t u = 0; u < n; ++u) {
    User user;
    user.id = static_cast<int>(u + 1);
    user.source_id = static_cast<int>(config.source_of_user[u] + 1);
    user.c_min = config.threshold + config.threshold_spread * thresholds.uniform();
    // Three fading draws per user in every mode keep the streams aligned.
    double const f_direct = fading_gain(config.fading_mean, fading.uniform());
    double const f_first = fading_gain(config.fading_mean, fading.uniform());
    double const f_second = fading_gain(config.fading_mean, fading.uniform());
    Point const& src = layout.sources[config.source_of_user[u]];
    Point const& dst = layout.destinations[u];
    if (config.relaying()) {
      std::size_t const r = config.relay_of_user[u];
      user.relay_id = static_cast<int>(r + 1);
      Point const& relay = config.relay_positions[r];
      double const d1 = distance(src, relay);
      if (!(d1 > 0.0)) throw std::runtime_error("generate_scenario: source on a relay");
      gains.first_hop.push_back(path_loss(d1) * f_first);
      gains.second_hop.push_back(path_loss(distance(relay, dst)) * f_second);
    } else {
      gains.direct.push_back(path_loss(distance(src, dst)) * f_direct);
    }
    topo.users.push_back(user);
  }
  return out;
}

std::optional<SweepParameter> parse_parameter(const std::string& name) {
  if (name == "P_R") return SweepParameter::kRelayPower;
  if (name == "W") return SweepParameter::kBandwidth;
  if (name == "c") return SweepParameter::kThreshold;
  if (name == "P_S") return SweepParameter::kSourcePower;
  return std::nullopt;
}

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::kRelayPower: return "P_R";
    case SweepParameter::kBandwidth: return "W";
    case SweepParameter::kThreshold: return "c";
    case SweepParameter::kSourcePower: return "P_S";
  }
  return "?";
}

void apply(ScenarioConfig& config, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::kRelayPower: config.relay_power = value; break;
    case SweepParameter::kBandwidth: config.bandwidth = value; break;
    case SweepParameter::kThreshold: config.threshold = value; break;
    case SweepParameter::kSourcePower: config.source_power = value; break;
  }
}

SweepSpec parse_sweep(const std::string& text) {
  auto const eq = text.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("sweep must look like name=start:step:stop or name=v1,v2");
  }
  auto const parameter = parse_parameter(text.substr(0, eq));
  if (!parameter) {
    throw std::invalid_argument("unknown sweep parameter '" + text.substr(0, eq) +
                                "' (expected P_R, W, c or P_S)");
  }
  std::string const body = text.substr(eq + 1);
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw std::invalid_argument("bad number '" + s + "' in sweep");
    }
    return v;
  };
  SweepSpec spec;
  spec.parameter = *parameter;
  if (body.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream stream(body);
    std::string piece;
    while (std::getline(stream, piece, ':')) parts.push_back(to_double(piece));
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
      throw std::invalid_argument("range sweep needs start:step:stop with step > 0");
    }
    auto const count = static_cast<std::size_t>(
        std::floor((parts[2] - parts[0]) / parts[1] * (1.0 + 1e-12))) + 1;
    for (std::size_t k = 0; k < count; ++k) {
      spec.values.push_back(parts[0] + static_cast<double>(k) * parts[1]);
    }
  } else {
    std::stringstream stream(body);
    std::string piece;
    while (std::getline(stream, piece, ',')) spec.values.push_back(to_double(piece));
  }
  if (spec.values.empty()) throw std::invalid_argument("sweep has no values");
  return spec;
}

SweepTable run_sweep(const ScenarioConfig& config, const SweepSpec& sweep,
                     const std::vector<Scheme>& schemes, Objective objective,
                     std::size_t workers) {
  if (schemes.empty()) throw std::invalid_argument("run_sweep: no schemes");
  std::size_t const runs = config.runs;
  std::size_t const tasks = sweep.values.size() * runs;
  std::vector<RunOutcome> outcomes(tasks);
  parallel_for(tasks, workers, [&](std::size_t task) {
    ScenarioConfig local = config;
    apply(local, sweep.parameter, sweep.values[task / runs]);
    auto const generated = generate_scenario(local, task % runs);
    outcomes[task] = evaluate_run(generated.scenario, schemes, objective);
  });

  SweepTable table;
  table.parameter = sweep.parameter;
  table.objective = objective;
  for (std::size_t v = 0; v < sweep.values.size(); ++v) {
    for (std::size_t k = 0; k < schemes.size(); ++k) {
      SweepRow row;
      row.value = sweep.values[v];
      row.scheme = schemes[k];
      std::vector<double> values;
      for (std::size_t r = 0; r < runs; ++r) {
        const auto& o = outcomes[v * runs + r];
        if (o.failed[k]) {
          ++row.failures;
        } else if (std::isnan(o.metric[k])) {
          ++row.excluded;
        } else {
          values.push_back(o.metric[k]);
        }
      }
      Summary const s = summarize(values);
      row.mean = s.mean;
      row.stderr_ = s.stderr_;
      row.n = s.n;
      table.rows.push_back(row);
    }
    auto const obpa = std::find(schemes.begin(), schemes.end(), Scheme::kObpa);
    if (obpa != schemes.end()) {
      std::size_t const a = static_cast<std::size_t>(obpa - schemes.begin());
      for (std::size_t k = 0; k < schemes.size(); ++k) {
        if (k == a) continue;
        std::vector<double> ours, theirs;
        for (std::size_t r = 0; r < runs; ++r) {
          const auto& o = outcomes[v * runs + r];
          if (std::isnan(o.metric[a]) || std::isnan(o.metric[k])) continue;
          ours.push_back(o.metric[a]);
          theirs.push_back(o.metric[k]);
        }
        if (ours.empty()) continue;
        double const ratio = summarize(ours).mean / summarize(theirs).mean;
        double const improvement =
            objective == Objective::kPowerMin ? 1.0 - ratio : ratio - 1.0;
        table.improvements.push_back({sweep.values[v], schemes[k], improvement});
      }
    }
  }
  for (const auto& o : outcomes) {
    table.per_run.push_back(o.metric);
    if (!o.dominance_ok) ++table.dominance_violations;
    if (!o.feasible_ok) ++table.feasibility_violations;
  }
  return table;
}

std::vector<AdmissionRow> admission_probability(const ScenarioConfig& config,
                                                const std::vector<double>& thresholds,
                                                std::size_t workers) {
  std::size_t const runs = config.runs;
  std::size_t const tasks = thresholds.size() * runs;
  // Three flags per task: OBPA, EBOPA, EBPA.
  std::vector<std::array<bool, 3>> admitted(tasks);
  parallel_for(tasks, workers, [&](std::size_t task) {
    ScenarioConfig local = config;
    local.threshold = thresholds[task / runs];
    auto const generated = generate_scenario(local, task % runs);
    const auto& s = generated.scenario;
    auto const c = thresholds_of(s.topology);
    auto const hops = hops_of(s);
    bool obpa = true, ebopa = true;
    for (const auto& hop : hops) {
      obpa = obpa && oracle_feasible(hop, c);
      ebopa = ebopa && equal_bandwidth_feasible(hop, c);
    }
    AllocationResult const equal = ebpa(s.topology, s.gains);
    bool const ebpa_ok = meets_thresholds(equal, s.topology, 0.0);
    admitted[task] = {obpa, ebopa, ebpa_ok};
  });

  std::vector<AdmissionRow> rows;
  for (std::size_t v = 0; v < thresholds.size(); ++v) {
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < runs; ++r) hits += admitted[v * runs + r][k] ? 1 : 0;
      AdmissionRow row;
      row.threshold = thresholds[v];
      row.scheme = k == 0 ? Scheme::kObpa : (k == 1 ? Scheme::kEbopa : Scheme::kEbpa);
      row.probability = static_cast<double>(hits) / static_cast<double>(runs);
      row.n = runs;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<GreedyRow> greedy_benchmark(int setup, const std::vector<double>& c0_values,
                                        std::size_t runs, std::uint64_t seed,
                                        std::size_t workers) {
  ScenarioConfig config = setup_config(setup);
  config.runs = runs;
  config.seed = seed;
  return greedy_benchmark(config, c0_values, workers);
}

std::vector<GreedyRow> greedy_benchmark(const ScenarioConfig& config,
                                        const std::vector<double>& c0_values,
                                        std::size_t workers) {
  struct Sample {
    std::size_t greedy = 0, exhaustive = 0, greedy_calls = 0, exhaustive_calls = 0;
    bool within_bounds = true, diminishing = true;
    double greedy_seconds = 0.0, exhaustive_seconds = 0.0;
  };
  std::size_t const runs = config.runs;
  std::size_t const tasks = c0_values.size() * runs;
  std::vector<Sample> samples(tasks);
  parallel_for(tasks, workers, [&](std::size_t task) {
    ScenarioConfig local = config;
    local.threshold = c0_values[task / runs];
    auto const generated = generate_scenario(local, task % runs);
    const auto& s = generated.scenario;
    std::size_t const n = s.topology.user_count();
    auto const c = thresholds_of(s.topology);
    Sample& out = samples[task];
    using Clock = std::chrono::steady_clock;

    if (s.topology.relaying()) {
      auto const t0 = Clock::now();
      RelayAdmissionResult const g = greedy_admission_relay(s.topology, s.gains, c);
      auto const t1 = Clock::now();
      AdmissionResult const e = exhaustive_admission_relay(s.topology, s.gains, c);
      auto const t2 = Clock::now();
      out.greedy = g.combined.admitted.size();
      out.exhaustive = e.admitted.size();
      out.greedy_calls = g.combined.oracle_calls;
      out.exhaustive_calls = e.oracle_calls;
      std::size_t const d_star = e.admitted.size();
      std::size_t stage = 0;
      if (g.exhaustive_stage) {
        stage = g.d_prime >= d_star ? 2 * exhaustive_call_bound(n, d_star, g.d_prime)
                                    : 2 * exhaustive_call_bound(n, g.d_prime, g.d_prime);
      }
      std::size_t const bound = greedy_call_bound(n, g.phase1.t_star) +
                                greedy_call_bound(n, g.phase2.t_star) + stage;
      out.within_bounds = g.combined.oracle_calls <= bound &&
                          e.oracle_calls <= 2 * exhaustive_call_bound(n, d_star, n);
      out.diminishing = removal_gains_diminish(g.phase1.removal_trace) &&
                        removal_gains_diminish(g.phase2.removal_trace);
      out.greedy_seconds = std::chrono::duration<double>(t1 - t0).count();
      out.exhaustive_seconds = std::chrono::duration<double>(t2 - t1).count();
    } else {
      auto const t0 = Clock::now();
      AdmissionResult const g = greedy_admission_no_relay(s.topology, s.gains, c);
      auto const t1 = Clock::now();
      AdmissionResult const e = exhaustive_admission_no_relay(s.topology, s.gains, c);
      auto const t2 = Clock::now();
      out.greedy = g.admitted.size();
      out.exhaustive = e.admitted.size();
      out.greedy_calls = g.oracle_calls;
      out.exhaustive_calls = e.oracle_calls;
      out.within_bounds = g.oracle_calls <= greedy_call_bound(n, g.t_star) &&
                          e.oracle_calls <= exhaustive_call_bound(n, e.admitted.size(), n);
      out.diminishing = removal_gains_diminish(g.removal_trace);
      out.greedy_seconds = std::chrono::duration<double>(t1 - t0).count();
      out.exhaustive_seconds = std::chrono::duration<double>(t2 - t1).count();
    }
  });

  std::vector<GreedyRow> rows;
  for (std::size_t v = 0; v < c0_values.size(); ++v) {
    GreedyRow row;
    row.c0 = c0_values[v];
    row.runs = runs;
    std::vector<double> g, e, gc, ec;
    double g_time = 0.0, e_time = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      const Sample& s = samples[v * runs + r];
      g.push_back(static_cast<double>(s.greedy));
      e.push_back(static_cast<double>(s.exhaustive));
      gc.push_back(static_cast<double>(s.greedy_calls));
      ec.push_back(static_cast<double>(s.exhaustive_calls));
      if (s.greedy < s.exhaustive) ++row.count_mismatches;
      if (s.greedy > s.exhaustive) ++row.greedy_above;
      if (!s.within_bounds) ++row.bound_violations;
      if (!s.diminishing) ++row.trace_violations;
      std::size_t const n = config.user_count();
      if (s.greedy < n || s.exhaustive < n) {
        ++row.rejecting_runs;
        if (s.greedy_calls < s.exhaustive_calls) ++row.fewer_calls;
      }
      g_time += s.greedy_seconds;
      e_time += s.exhaustive_seconds;
    }
    row.greedy_admitted = summarize(g).mean;
    row.exhaustive_admitted = summarize(e).mean;
    row.greedy_calls = summarize(gc).mean;
    row.exhaustive_calls = summarize(ec).mean;
    row.time_ratio = g_time > 0.0 ? e_time / g_time : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string to_csv(const SweepTable& table) {
  std::string out = "parameter,value,objective,scheme,mean,stderr,n,excluded,failures\n";
  for (const auto& r : table.rows) {
    out += to_string(table.parameter) + "," + number(r.value) + "," +
           std::string(to_string(table.objective)) + "," +
           std::string(to_string(r.scheme)) + "," + number(r.mean) + "," +
           number(r.stderr_) + "," + std::to_string(r.n) + "," +
           std::to_string(r.excluded) + "," + std::to_string(r.failures) + "\n";
  }
  return out;
}

std::string improvements_csv(const SweepTable& table) {
  std::string out = "parameter,value,objective,baseline,improvement\n";
  for (const auto& r : table.improvements) {
    out += to_string(table.parameter) + "," + number(r.value) + "," +
           std::string(to_string(table.objective)) + "," +
           std::string(to_string(r.baseline)) + "," + number(r.improvement) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<AdmissionRow>& rows) {
  std::string out = "c,scheme,probability,n\n";
  for (const auto& r : rows) {
    out += number(r.threshold) + "," + std::string(to_string(r.scheme)) + "," +
           number(r.probability) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<GreedyRow>& rows, bool include_timing) {
  std::string out =
      "c0,greedy_admitted,exhaustive_admitted,greedy_calls,exhaustive_calls,runs,"
      "count_mismatches,greedy_above,bound_violations,trace_violations,"
      "rejecting_runs,fewer_calls";
  out += include_timing ? ",time_ratio\n" : "\n";
  for (const auto& r : rows) {
    out += number(r.c0) + "," + number(r.greedy_admitted) + "," +
           number(r.exhaustive_admitted) + "," + number(r.greedy_calls) + "," +
           number(r.exhaustive_calls) + "," + std::to_string(r.runs) + "," +
           std::to_string(r.count_mismatches) + "," + std::to_string(r.greedy_above) +
           "," + std::to_string(r.bound_violations) + "," +
           std::to_string(r.trace_violations) + "," + std::to_string(r.rejecting_runs) +
           "," + std::to_string(r.fewer_calls);
    out += include_timing ? "," + number(r.time_ratio) + "\n" : "\n";
  }
  return out;
}

std::string config_to_json(const ScenarioConfig& config) {
  using nlohmann::json;
  auto point = [](const Point& p) { return json::array({p.x, p.y}); };
  json relays = json::array();
  for (const auto& p : config.relay_positions) relays.push_back(point(p));
  json doc = {
      {"area", {{"min", point(config.area_min)}, {"max", point(config.area_max)}}},
      {"source_of_user", config.source_of_user},
      {"relay_positions", relays},
      {"relay_of_user", config.relay_of_user},
      {"source_power", config.source_power},
      {"relay_power", config.relay_power},
      {"bandwidth", config.bandwidth},
      {"fading_mean", config.fading_mean},
      {"noise_psd", config.noise_psd},
      {"threshold", config.threshold},
      {"threshold_spread", config.threshold_spread},
      {"runs", config.runs},
      {"seed", config.seed},
  };
  return doc.dump(2);
}

ScenarioConfig config_from_json(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");

  ScenarioConfig config;
  if (doc.contains("preset")) {
    auto const preset = doc.at("preset").get<std::string>();
    if (preset == "default") {
      config = default_config();
    } else if (preset.rfind("setup", 0) == 0 && preset.size() == 6) {
      config = setup_config(preset[5] - '0');
    } else {
      throw std::invalid_argument("preset: unknown preset '" + preset + "'");
    }
  }
  auto read_point = [](const json& j, const char* field) {
    if (!j.is_array() || j.size() != 2) {
      throw std::invalid_argument(std::string(field) + ": expected [x, y]");
    }
    return Point{j[0].get<double>(), j[1].get<double>()};
  };
  try {
    if (doc.contains("area")) {
      config.area_min = read_point(doc.at("area").at("min"), "area.min");
      config.area_max = read_point(doc.at("area").at("max"), "area.max");
    }
    if (doc.contains("source_of_user")) {
      config.source_of_user = doc.at("source_of_user").get<std::vector<std::size_t>>();
    }
    if (doc.contains("relay_positions")) {
      config.relay_positions.clear();
      for (const auto& p : doc.at("relay_positions")) {
        config.relay_positions.push_back(read_point(p, "relay_positions"));
      }
    }
    if (doc.contains("relay_of_user")) {
      config.relay_of_user = doc.at("relay_of_user").get<std::vector<std::size_t>>();
    }
    auto number_field = [&](const char* key, double& target) {
      if (doc.contains(key)) target = doc.at(key).get<double>();
    };
    number_field("source_power", config.source_power);
    number_field("relay_power", config.relay_power);
    number_field("bandwidth", config.bandwidth);
    number_field("fading_mean", config.fading_mean);
    number_field("noise_psd", config.noise_psd);
    number_field("threshold", config.threshold);
    number_field("threshold_spread", config.threshold_spread);
    if (doc.contains("runs")) config.runs = doc.at("runs").get<std::size_t>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (auto issues = validate(config); !issues.empty()) {
    throw std::invalid_argument("config: " + issues.front());
  }
  return config;
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[i];
    return sum;
  }
  std::size_t const half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

}  // namespace bwalloc::sim
