#include "bwalloc_cli/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bwalloc/admission.hpp"
#include "bwalloc/allocators.hpp"
#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/errors.hpp"
#include "bwalloc/model.hpp"
#include "bwalloc/scenario_io.hpp"
#include "bwalloc/simharness.hpp"
#include "format.hpp"

namespace bwalloc::cli {
namespace {

using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Scenario loading

Scenario load_scenario(const std::string& path, const std::string& relay,
                       std::optional<double> bandwidth) {
  Scenario s = read_scenario_file(path);
  if (bandwidth) s.topology.total_bandwidth = *bandwidth;
  if (relay == "on" && !s.topology.relaying()) {
    throw InputError("relays: --relay on needs at least one relay in the scenario");
  }
  if (relay == "off" && s.topology.relaying()) {
    if (!s.gains.has_direct()) {
      throw InputError("users[id=" + std::to_string(s.topology.users.front().id) +
                       "].h_sd: direct gains are required with --relay off");
    }
    s.topology.relays.clear();
    for (auto& u : s.topology.users) u.relay_id.reset();
    s.gains.first_hop.clear();
    s.gains.second_hop.clear();
  }
  auto issues = validate_topology(s.topology);
  auto const gain_issues = validate_gains(s.topology, s.gains);
  issues.insert(issues.end(), gain_issues.begin(), gain_issues.end());
  if (!issues.empty()) throw InputError(issues.front().field + ": " + issues.front().message);
  return s;
}

std::vector<Hop> hops_of(const Scenario& s) {
  if (!s.topology.relaying()) return {direct_hop(s.topology, s.gains)};
  return {first_hop(s.topology, s.gains), second_hop(s.topology, s.gains)};
}

std::vector<int> ids_of(const NetworkTopology& t) {
  std::vector<int> ids;
  for (const auto& u : t.users) ids.push_back(u.id);
  return ids;
}

std::string id_set(const NetworkTopology& t, const std::vector<std::size_t>& positions) {
  std::string out = "{";
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(t.users[positions[k]].id);
  }
  return out + "}";
}

json id_list(const NetworkTopology& t, const std::vector<std::size_t>& positions) {
  json out = json::array();
  for (auto p : positions) out.push_back(t.users[p].id);
  return out;
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::string certificate(const InfeasibleInstanceError& e) {
  std::string out = "certificate: G(N) = " + num(e.required_bandwidth()) +
                    " > W = " + num(e.available_bandwidth());
  if (e.phase() > 0) out += " (phase " + std::to_string(e.phase()) + ")";
  if (std::isinf(e.required_bandwidth())) {
    out += "; some transmitter cannot cover its users' power floors";
  }
  return out + "\n";
}

// ---------------------------------------------------------------------------
// allocate

struct AllocateOptions {
  std::string scenario;
  std::string objective = "sum";
  std::string scheme = "obpa";
  std::string relay = "auto";
  std::string format = "table";
  std::string out;
  std::optional<double> bandwidth;
};

std::string metric_name(Objective objective) {
  switch (objective) {
    case Objective::kSumCapacity: return "total_capacity";
    case Objective::kMaxMin: return "common_capacity";
    case Objective::kPowerMin: return "total_power";
  }
  return "value";
}

std::string cmd_allocate(const AllocateOptions& o) {
  Scenario const s = load_scenario(o.scenario, o.relay, o.bandwidth);
  const NetworkTopology& t = s.topology;
  Objective const objective = *parse_objective(o.objective);
  Scheme const scheme = *parse_scheme(o.scheme);
  bool const power_min = objective == Objective::kPowerMin;
  std::vector<double> c;
  if (power_min) c = thresholds_of(t);

  AllocationResult const r = allocate(t, s.gains, objective, scheme, c);
  ConstraintReport const report = check_feasibility(t, r.allocation);

  std::vector<bool> met(t.user_count(), true);
  if (power_min) {
    std::vector<std::size_t> missed;
    for (std::size_t i = 0; i < t.user_count(); ++i) {
      met[i] = r.capacities[i] >= c[i] * (1.0 - 1e-8);
      if (!met[i]) missed.push_back(i);
    }
    if (!missed.empty()) {
      // Only the equal split can land here; report the bandwidth an
      // optimal allocation would need.
      std::vector<std::size_t> all(t.user_count());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      auto const hops = hops_of(s);
      double worst = 0.0;
      int phase = 0;
      for (std::size_t h = 0; h < hops.size(); ++h) {
        double const g = min_total_bandwidth(hops[h], c, all).total;
        if (h == 0 || g > worst) {
          worst = g;
          phase = hops.size() > 1 ? static_cast<int>(h) + 1 : 0;
        }
      }
      throw InfeasibleInstanceError(
          std::string(to_string(scheme)) + ": thresholds of users " + id_set(t, missed) +
              " not met",
          worst, t.total_bandwidth, phase);
    }
  }

  bool const relay = t.relaying();
  std::vector<std::string> header{"user", "source"};
  if (relay) header.push_back("relay");
  header.insert(header.end(), {"p_source", "w_source"});
  if (relay) header.insert(header.end(), {"p_relay", "w_relay"});
  header.push_back("capacity");
  if (power_min) header.insert(header.end(), {"c_min", "met"});

  std::vector<std::vector<std::string>> users;
  json juser = json::array();
  for (std::size_t i = 0; i < t.user_count(); ++i) {
    const auto& u = t.users[i];
    const auto& a = r.allocation.users[i];
    std::vector<std::string> row{std::to_string(u.id), std::to_string(u.source_id)};
    json ju{{"id", u.id},
            {"source", u.source_id},
            {"p_source", a.source.power()},
            {"w_source", a.source.bandwidth()},
            {"capacity", r.capacities[i]}};
    if (relay) {
      row.push_back(std::to_string(*u.relay_id));
      ju["relay"] = *u.relay_id;
      ju["p_relay"] = a.relay.power();
      ju["w_relay"] = a.relay.bandwidth();
    }
    row.insert(row.end(), {num(a.source.power()), num(a.source.bandwidth())});
    if (relay) row.insert(row.end(), {num(a.relay.power()), num(a.relay.bandwidth())});
    row.push_back(num(r.capacities[i]));
    if (power_min) {
      row.insert(row.end(), {num(c[i]), yes_no(met[i])});
      ju["c_min"] = c[i];
    }
    users.push_back(std::move(row));
    juser.push_back(std::move(ju));
  }

  std::vector<std::vector<std::string>> constraints;
  json jcons = json::array();
  for (const auto& k : report.constraints) {
    constraints.push_back({k.name, num(k.budget), num(k.usage), num(k.slack())});
    jcons.push_back({{"name", k.name}, {"budget", k.budget}, {"usage", k.usage}});
  }
  std::vector<std::vector<std::string>> summary{
      {"objective", o.objective},
      {"scheme", o.scheme},
      {"relay", relay ? "on" : "off"},
      {metric_name(objective), num(r.metric)},
      {"feasible", yes_no(report.satisfied)},
  };

  if (o.format == "json") {
    json doc{{"objective", o.objective},
             {"scheme", o.scheme},
             {"relay", relay},
             {metric_name(objective), r.metric},
             {"users", juser},
             {"constraints", jcons},
             {"feasible", report.satisfied},
             {"issues", report.issues}};
    return doc.dump(2) + "\n";
  }
  if (o.format == "csv") {
    return render_csv({"key", "value"}, summary) + "\n" + render_csv(header, users) + "\n" +
           render_csv({"constraint", "budget", "usage", "slack"}, constraints);
  }
  std::string out;
  for (const auto& kv : summary) out += kv[0] + ": " + kv[1] + "\n";
  for (const auto& issue : report.issues) out += "issue: " + issue + "\n";
  out += "\n" + render_table(header, users) + "\n" +
         render_table({"constraint", "budget", "usage", "slack"}, constraints);
  return out;
}

// ---------------------------------------------------------------------------
// admit

struct AdmitOptions {
  std::string scenario;
  std::string algorithm = "greedy";
  std::string relay = "auto";
  std::string format = "table";
  bool trace = false;
  std::size_t cap = kDefaultExhaustiveCap;
  std::optional<double> bandwidth;
};

std::string trace_table(const NetworkTopology& t, const std::vector<RemovalStep>& trace,
                        bool relay_phase) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& step = trace[k];
    int const tx = relay_phase ? t.relays[step.transmitter].id : t.sources[step.transmitter].id;
    rows.push_back({std::to_string(k + 1), std::to_string(t.users[step.user].id),
                    std::to_string(tx), num(step.g_before), num(step.g_after),
                    num(step.source_g_before - step.source_g_after)});
  }
  return render_table({"step", "removed", relay_phase ? "relay" : "source", "G_before",
                       "G_after", "freed"},
                      rows);
}

json trace_json(const NetworkTopology& t, const std::vector<RemovalStep>& trace) {
  json out = json::array();
  for (const auto& step : trace) {
    out.push_back({{"removed", t.users[step.user].id},
                   {"G_before", step.g_before},
                   {"G_after", step.g_after}});
  }
  return out;
}

std::string conditions_table(const NetworkTopology& t, const OptimalityReport& r,
                             bool relay_phase) {
  auto c1 = [](std::optional<bool> v) { return v ? yes_no(*v) : std::string("unchecked"); };
  std::string out = "equal_thresholds: " + yes_no(r.equal_thresholds) + "\n" +
                    "few_crossings: " + yes_no(r.few_crossings) + "\n" +
                    "C1 best_sets: " + c1(r.best_sets) + "\n" +
                    "C2 diminishing_gains: " + yes_no(r.diminishing_gains) + "\n" +
                    "guaranteed: " + yes_no(r.guaranteed) + "\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.sources) {
    int const tx = relay_phase ? t.relays[s.transmitter].id : t.sources[s.transmitter].id;
    rows.push_back({std::to_string(tx), std::to_string(s.users),
                    std::to_string(s.max_crossings), c1(s.best_sets),
                    yes_no(s.diminishing_gains)});
  }
  return out + render_table({relay_phase ? "relay" : "source", "users", "max_crossings", "C1",
                             "C2"},
                            rows);
}

json conditions_json(const OptimalityReport& r) {
  json out{{"equal_thresholds", r.equal_thresholds},
           {"few_crossings", r.few_crossings},
           {"diminishing_gains", r.diminishing_gains},
           {"guaranteed", r.guaranteed}};
  out["best_sets"] = r.best_sets ? json(*r.best_sets) : json(nullptr);
  return out;
}

std::string cmd_admit(const AdmitOptions& o) {
  Scenario const s = load_scenario(o.scenario, o.relay, o.bandwidth);
  const NetworkTopology& t = s.topology;
  auto const c = thresholds_of(t);
  bool const relay = t.relaying();
  bool const run_greedy = o.algorithm != "exhaustive";
  bool const run_exhaustive = o.algorithm != "greedy";

  std::optional<RelayAdmissionResult> relay_greedy;
  std::optional<AdmissionResult> greedy, exhaustive;
  if (run_exhaustive) {
    exhaustive = relay ? exhaustive_admission_relay(t, s.gains, c, o.cap)
                       : exhaustive_admission_no_relay(t, s.gains, c, o.cap);
  }
  if (run_greedy) {
    if (relay) {
      relay_greedy = greedy_admission_relay(t, s.gains, c, o.cap);
      greedy = relay_greedy->combined;
    } else {
      greedy = greedy_admission_no_relay(t, s.gains, c);
    }
  }

  std::string out;
  json doc{{"relay", relay}, {"users", t.user_count()}, {"W", t.total_bandwidth}};
  auto g_total = [](const AdmissionResult& r) { return r.g_admitted + r.g_second; };
  auto describe = [&](const std::string& name, const AdmissionResult& r) {
    out += name + "\n";
    out += "  admitted: " + id_set(t, r.admitted) + "\n";
    out += "  count: " + std::to_string(r.admitted.size()) + "\n";
    if (name == "greedy") out += "  t*: " + std::to_string(r.t_star) + "\n";
    out += "  oracle_calls: " + std::to_string(r.oracle_calls) + "\n";
    if (name == "greedy") out += "  initial_calls: " + std::to_string(r.initial_calls) + "\n";
    if (relay) {
      out += "  G_phase1: " + num(r.g_admitted) + "\n";
      out += "  G_phase2: " + num(r.g_second) + "\n";
    } else {
      out += "  G: " + num(r.g_admitted) + "\n";
    }
    json j{{"admitted", id_list(t, r.admitted)},
           {"oracle_calls", r.oracle_calls},
           {"G", r.g_admitted}};
    if (relay) j["G_phase2"] = r.g_second;
    if (name == "greedy") {
      j["t_star"] = r.t_star;
      j["initial_calls"] = r.initial_calls;
    }
    doc[name] = j;
  };

  if (greedy) {
    describe("greedy", *greedy);
    if (relay_greedy) {
      out += "  phase1_t*: " + std::to_string(relay_greedy->phase1.t_star) + "\n";
      out += "  phase2_t*: " + std::to_string(relay_greedy->phase2.t_star) + "\n";
      out += "  d': " + std::to_string(relay_greedy->d_prime) + "\n";
      out += "  joint_search: " + yes_no(relay_greedy->exhaustive_stage) + " (" +
             std::to_string(relay_greedy->exhaustive_subsets) + " subsets)\n";
      doc["greedy"]["d_prime"] = relay_greedy->d_prime;
      doc["greedy"]["joint_search_subsets"] = relay_greedy->exhaustive_subsets;
    }
    if (o.trace) {
      if (relay_greedy) {
        out += "\nremoval trace, phase 1\n" + trace_table(t, relay_greedy->phase1.removal_trace, false);
        out += "\nremoval trace, phase 2\n" + trace_table(t, relay_greedy->phase2.removal_trace, true);
        doc["greedy"]["trace_phase1"] = trace_json(t, relay_greedy->phase1.removal_trace);
        doc["greedy"]["trace_phase2"] = trace_json(t, relay_greedy->phase2.removal_trace);
      } else {
        out += "\nremoval trace\n" + trace_table(t, greedy->removal_trace, false);
        doc["greedy"]["trace"] = trace_json(t, greedy->removal_trace);
      }
    }
  }
  if (exhaustive) {
    if (greedy) out += "\n";
    describe("exhaustive", *exhaustive);
  }

  if (greedy && exhaustive) {
    std::size_t const gc = greedy->admitted.size(), ec = exhaustive->admitted.size();
    double const gg = g_total(*greedy), eg = g_total(*exhaustive);
    bool const same_g = std::abs(gg - eg) <= 1e-9 * std::max(1.0, std::abs(eg));
    bool const optimal = gc == ec && same_g;
    std::string verdict = optimal ? "optimal" : "suboptimal";
    if (gc < ec) {
      verdict += " (greedy admits " + std::to_string(gc) + " of " + std::to_string(ec) + ")";
    } else if (!optimal) {
      verdict += " (same count, greedy set needs more bandwidth: " + num(gg) + " vs " +
                 num(eg) + ")";
    }
    out += "\ncomparison: " + verdict + "\n";
    doc["optimal"] = optimal;

    std::vector<std::pair<std::string, OptimalityReport>> reports;
    auto const ids = ids_of(t);
    if (relay) {
      reports.emplace_back("phase 1", check_optimality_conditions(first_hop(t, s.gains), c, ids, o.cap));
      reports.emplace_back("phase 2", check_optimality_conditions(second_hop(t, s.gains), c, ids, o.cap));
    } else {
      reports.emplace_back("", check_optimality_conditions(t, s.gains, c, o.cap));
    }
    json jc = json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
      out += "\nconditions" + (reports[k].first.empty() ? "" : ", " + reports[k].first) + "\n";
      out += conditions_table(t, reports[k].second, k == 1);
      jc.push_back(conditions_json(reports[k].second));
    }
    doc["conditions"] = jc;
  }

  if (o.format == "json") return doc.dump(2) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string config;
  std::optional<std::string> sweep, objective, experiment, schemes;
  std::optional<std::size_t> runs, workers;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool timing = false;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t default_workers() {
  const char* env = std::getenv("BWALLOC_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  long const v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw InputError("BWALLOC_WORKERS: expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<Scheme> parse_schemes(const std::string& text) {
  std::vector<Scheme> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto s = parse_scheme(item);
    if (!s) throw InputError("schemes: unknown scheme '" + item + "'");
    out.push_back(*s);
  }
  if (out.empty()) throw InputError("schemes: empty list");
  return out;
}

// Result files in write order. Contents are deterministic.
using Files = std::vector<std::pair<std::string, std::string>>;

std::string cmd_simulate(const SimulateOptions& o, std::ostream& err) {
  std::string const text = read_text(o.config);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(o.config + ": not valid JSON (" + e.what() + ")");
  }
  auto setting = [&](const std::optional<std::string>& flag, const char* key,
                     std::string fallback) -> std::string {
    if (flag) return *flag;
    if (doc.is_object() && doc.contains(key)) {
      const auto& v = doc.at(key);
      if (v.is_string()) return v.get<std::string>();
      if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) joined += (joined.empty() ? "" : ",") + item.get<std::string>();
        return joined;
      }
      throw InputError(std::string(key) + ": expected a string");
    }
    return fallback;
  };
  std::string const experiment = setting(o.experiment, "experiment", "sweep");
  std::string const objective_text = setting(o.objective, "objective", "sum");
  std::string const schemes_text = setting(o.schemes, "schemes", "obpa,ebopa,ebpa");
  std::string const sweep_text = setting(o.sweep, "sweep", "");
  if (experiment != "sweep" && experiment != "admission" && experiment != "greedy") {
    throw InputError("experiment: expected sweep, admission or greedy");
  }
  if (sweep_text.empty()) throw InputError("sweep: no sweep given (flag --sweep or config key)");
  auto const objective = parse_objective(objective_text);
  if (!objective) throw InputError("objective: unknown objective '" + objective_text + "'");
  auto const schemes = parse_schemes(schemes_text);

  sim::ScenarioConfig config = sim::config_from_json(text);
  if (o.runs) config.runs = *o.runs;
  if (o.seed) config.seed = *o.seed;
  auto const problems = sim::validate(config);
  if (!problems.empty()) throw InputError("config: " + problems.front());
  sim::SweepSpec const sweep = sim::parse_sweep(sweep_text);
  if (experiment != "sweep" && sweep.parameter != sim::SweepParameter::kThreshold) {
    throw InputError("sweep: the " + experiment + " experiment sweeps c");
  }
  std::size_t const workers = o.workers ? *o.workers : default_workers();

  Files files;
  std::string summary;
  json timing;
  auto const start = std::chrono::steady_clock::now();
  if (experiment == "sweep") {
    auto const table = sim::run_sweep(config, sweep, schemes, *objective, workers);
    files.emplace_back("results.csv", sim::to_csv(table));
    files.emplace_back("improvements.csv", sim::improvements_csv(table));
    std::string per_run = "value,run";
    for (auto s : schemes) per_run += "," + std::string(to_string(s));
    per_run += "\n";
    for (std::size_t k = 0; k < table.per_run.size(); ++k) {
      per_run += num(sweep.values[k / config.runs], 17) + "," + std::to_string(k % config.runs);
      for (double v : table.per_run[k]) per_run += "," + (std::isnan(v) ? std::string() : num(v, 17));
      per_run += "\n";
    }
    files.emplace_back("per_run.csv", per_run);
    summary = sim::to_csv(table) + "\n" + sim::improvements_csv(table);
    if (table.dominance_violations || table.feasibility_violations) {
      err << "bwalloc: warning: " << table.dominance_violations << " dominance and "
          << table.feasibility_violations << " feasibility violations\n";
    }
  } else if (experiment == "admission") {
    auto const rows = sim::admission_probability(config, sweep.values, workers);
    files.emplace_back("admission.csv", sim::to_csv(rows));
    summary = files.back().second;
  } else {
    auto const rows = sim::greedy_benchmark(config, sweep.values, workers);
    files.emplace_back("greedy.csv", sim::to_csv(rows, false));
    summary = files.back().second;
    json ratios = json::array();
    for (const auto& r : rows) ratios.push_back({{"c0", r.c0}, {"time_ratio", r.time_ratio}});
    timing["exhaustive_over_greedy"] = ratios;
  }
  timing["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  timing["workers"] = workers;

  if (o.out.empty()) return summary;

  json manifest{
      {"tool", "bwalloc"},
      {"command", "simulate"},
      {"experiment", experiment},
      {"objective", objective_text},
      {"schemes", schemes_text},
      {"sweep", sweep_text},
      {"runs", config.runs},
      {"seed", config.seed},
      {"config", json::parse(sim::config_to_json(config))},
      {"rng", "mt19937_64 seeded by (seed, run, stream)"},
      {"versions",
       {{"bwalloc", BWALLOC_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", CLI11_VERSION},
        {"compiler", __VERSION__}}},
  };
  json names = json::array();
  for (const auto& f : files) names.push_back(f.first);
  manifest["files"] = names;
  files.emplace_back("manifest.json", manifest.dump(2) + "\n");
  if (o.timing) files.emplace_back("timing.json", timing.dump(2) + "\n");

  std::filesystem::path const dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(o.out + ": cannot create directory (" + ec.message() + ")");
  for (const auto& [name, content] : files) {
    std::ofstream file(dir / name, std::ios::binary);
    file << content;
    if (!file) throw InputError((dir / name).string() + ": write failed");
  }
  return summary;
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) throw InputError(path + ": write failed");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint bandwidth and power allocation for multi-source networks"};
  app.name("bwalloc");
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 1 input error, 2 infeasible instance, 3 instance too large,\n"
      "4 numerical failure.");

  std::vector<std::string> const relay_modes{"auto", "on", "off"};

  AllocateOptions ao;
  auto* allocate_cmd = app.add_subcommand("allocate", "Allocate bandwidth and power for one scenario");
  allocate_cmd->add_option("scenario", ao.scenario, "Scenario file")->required();
  allocate_cmd->add_option("--objective", ao.objective, "sum, maxmin or powermin")
      ->check(CLI::IsMember({"sum", "maxmin", "powermin"}));
  allocate_cmd->add_option("--scheme", ao.scheme, "obpa, ebopa or ebpa")
      ->check(CLI::IsMember({"obpa", "ebopa", "ebpa"}));
  allocate_cmd->add_option("--relay", ao.relay, "auto, on or off")->check(CLI::IsMember(relay_modes));
  allocate_cmd->add_option("--bandwidth", ao.bandwidth, "Override the total bandwidth W")
      ->check(CLI::PositiveNumber);
  allocate_cmd->add_option("--format", ao.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  allocate_cmd->add_option("--out", ao.out, "Write the result to this file");

  AdmitOptions mo;
  auto* admit_cmd = app.add_subcommand("admit", "Choose the largest set of users that can be served");
  admit_cmd->add_option("scenario", mo.scenario, "Scenario file (thresholds required)")->required();
  admit_cmd->add_option("--algorithm", mo.algorithm, "greedy, exhaustive or both")
      ->check(CLI::IsMember({"greedy", "exhaustive", "both"}));
  admit_cmd->add_flag("--both", [&](std::int64_t) { mo.algorithm = "both"; },
                      "Shorthand for --algorithm both");
  admit_cmd->add_option("--relay", mo.relay, "auto, on or off")->check(CLI::IsMember(relay_modes));
  admit_cmd->add_option("--bandwidth", mo.bandwidth, "Override the total bandwidth W")
      ->check(CLI::PositiveNumber);
  admit_cmd->add_option("--cap", mo.cap, "Largest N for exhaustive search")->check(CLI::Range(1, 30));
  admit_cmd->add_flag("--trace", mo.trace, "Print the greedy removal trace");
  admit_cmd->add_option("--format", mo.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));

  SimulateOptions so;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a seeded Monte Carlo experiment");
  simulate_cmd->add_option("config", so.config, "Configuration file")->required();
  simulate_cmd->add_option("--sweep", so.sweep, "name=start:step:stop or name=v1,v2,...");
  simulate_cmd->add_option("--experiment", so.experiment, "sweep, admission or greedy")
      ->check(CLI::IsMember({"sweep", "admission", "greedy"}));
  simulate_cmd->add_option("--objective", so.objective, "sum, maxmin or powermin")
      ->check(CLI::IsMember({"sum", "maxmin", "powermin"}));
  simulate_cmd->add_option("--schemes", so.schemes, "Comma-separated schemes");
  simulate_cmd->add_option("--runs", so.runs, "Runs per sweep value")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", so.seed, "Base seed");
  simulate_cmd->add_option("--workers", so.workers,
                           "Worker threads (default $BWALLOC_WORKERS, else all cores)");
  simulate_cmd->add_option("--out", so.out, "Output directory for tables and manifest");
  simulate_cmd->add_flag("--timing", so.timing, "Also write timing.json (not deterministic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int const code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    std::string text;
    if (*allocate_cmd) {
      text = cmd_allocate(ao);
      write_output(text, ao.out, out);
    } else if (*admit_cmd) {
      out << cmd_admit(mo);
    } else {
      out << cmd_simulate(so, err);
    }
    return kOk;
  } catch (const InfeasibleInstanceError& e) {
    err << "bwalloc: infeasible: " << e.what() << "\n" << certificate(e);
    return kInfeasible;
  } catch (const InstanceTooLargeError& e) {
    err << "bwalloc: instance too large: " << e.what() << "\n";
    return kTooLarge;
  } catch (const ScenarioFormatError& e) {
    err << "bwalloc: invalid scenario: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "bwalloc: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "bwalloc: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "bwalloc: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "bwalloc: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace bwalloc::cli
