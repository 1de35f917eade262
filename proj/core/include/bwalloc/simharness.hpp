#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bwalloc/allocators.hpp"
#include "bwalloc/model.hpp"
#include "bwalloc/scenario_io.hpp"

namespace bwalloc::sim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Random network layout and channel parameters. Sources and destinations
/// are placed uniformly in the area on every run; relays are fixed. Users
/// map to sources (and relays) by position in `source_of_user` /
/// `relay_of_user`; an empty `relay_positions` means no relaying.
struct ScenarioConfig {
  Point area_min{0.0, 0.0};
  Point area_max{10.0, 10.0};
  std::vector<std::size_t> source_of_user{0, 1, 2, 3};
  std::vector<Point> relay_positions{{5.0, 3.0}, {5.0, 7.0}};
  std::vector<std::size_t> relay_of_user{0, 0, 1, 1};
  double source_power = 20.0;
  double relay_power = 40.0;
  double bandwidth = 10.0;
  double fading_mean = 5.0;  // sigma^2, mean of the exponential power gain
  double noise_psd = 1.0;
  double threshold = 1.0;       // c for every user ...
  double threshold_spread = 0.0;  // ... or c ~ U[threshold, threshold + spread]
  std::size_t runs = 500;
  std::uint64_t seed = 1;

  std::size_t user_count() const { return source_of_user.size(); }
  std::size_t source_count() const;
  bool relaying() const { return !relay_positions.empty(); }
};

// The paper's default four-user relay network.
ScenarioConfig default_config();
// Greedy benchmark setups 1-4 (eight users, sigma^2 = 10, c ~ U[c0, c0+4]).
ScenarioConfig setup_config(int setup);

// Empty when valid; otherwise one message per problem.
std::vector<std::string> validate(const ScenarioConfig& config);

struct Layout {
  std::vector<Point> sources;
  std::vector<Point> destinations;
};

struct GeneratedScenario {
  Scenario scenario;
  Layout layout;
};

/// Deterministic in (seed, run): positions, fading and thresholds come from
/// separate generator streams keyed by (seed, run, stream).
GeneratedScenario generate_scenario(const ScenarioConfig& config, std::size_t run);

double path_loss(double distance);  // (1/d)^2

/// Exponential power gain with the given mean from a uniform draw u in
/// [0, 1). Isolated so the fading convention is a one-line change.
double fading_gain(double mean, double uniform);

/// Uniform [0, 1) stream for (seed, run, stream). The engine is the
/// standard 64-bit Mersenne Twister; the float conversion is explicit so
/// draws do not depend on the standard library's distributions.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream);
  double uniform();

 private:
  std::mt19937_64 engine_;
};

enum class SweepParameter { kRelayPower, kBandwidth, kThreshold, kSourcePower };

std::optional<SweepParameter> parse_parameter(const std::string& name);
std::string to_string(SweepParameter parameter);
void apply(ScenarioConfig& config, SweepParameter parameter, double value);

/// "name=start:step:stop" or "name=v1,v2,...".
struct SweepSpec {
  SweepParameter parameter = SweepParameter::kRelayPower;
  std::vector<double> values;
};
SweepSpec parse_sweep(const std::string& text);

struct SweepRow {
  double value = 0.0;
  Scheme scheme = Scheme::kObpa;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // runs where some scheme had no feasible answer
  std::size_t failures = 0;  // runs where a solver raised an error
};

/// Relative advantage of OBPA over `baseline` at one sweep value: the
/// capacity gain mean(OBPA)/mean(baseline) - 1, or for power-min the saving
/// 1 - mean(OBPA)/mean(baseline).
struct ImprovementRow {
  double value = 0.0;
  Scheme baseline = Scheme::kEbopa;
  double improvement = 0.0;
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::kRelayPower;
  Objective objective = Objective::kSumCapacity;
  std::vector<SweepRow> rows;
  std::vector<ImprovementRow> improvements;
  // Per run (value-major), the metric of each scheme; NaN when excluded.
  std::vector<std::vector<double>> per_run;
  std::size_t dominance_violations = 0;
  std::size_t feasibility_violations = 0;
};

/// Every scheme runs on the same scenarios. Means cover the runs on which
/// every scheme produced an answer. `workers` = 0 uses the hardware
/// concurrency; results do not depend on it.
SweepTable run_sweep(const ScenarioConfig& config, const SweepSpec& sweep,
                     const std::vector<Scheme>& schemes, Objective objective,
                     std::size_t workers = 0);

struct AdmissionRow {
  double threshold = 0.0;
  Scheme scheme = Scheme::kObpa;
  double probability = 0.0;
  std::size_t n = 0;
};

/// Fraction of runs in which every user can be served at threshold c:
/// G(N) <= W on every hop (OBPA), F^-1(W/N) within every budget (EBOPA), or
/// the equal split reaching c for everyone (EBPA).
std::vector<AdmissionRow> admission_probability(const ScenarioConfig& config,
                                                const std::vector<double>& thresholds,
                                                std::size_t workers = 0);

struct GreedyRow {
  double c0 = 0.0;
  double greedy_admitted = 0.0;
  double exhaustive_admitted = 0.0;
  double greedy_calls = 0.0;
  double exhaustive_calls = 0.0;
  std::size_t runs = 0;
  std::size_t count_mismatches = 0;  // greedy admitted fewer users
  std::size_t greedy_above = 0;      // greedy admitted more (a bug)
  std::size_t bound_violations = 0;
  std::size_t trace_violations = 0;  // removal gains not diminishing
  std::size_t fewer_calls = 0;       // runs with a rejection and fewer greedy calls
  std::size_t rejecting_runs = 0;
  double time_ratio = 0.0;           // exhaustive / greedy wall time
};

std::vector<GreedyRow> greedy_benchmark(int setup, const std::vector<double>& c0_values,
                                        std::size_t runs, std::uint64_t seed = 1,
                                        std::size_t workers = 0);
std::vector<GreedyRow> greedy_benchmark(const ScenarioConfig& config,
                                        const std::vector<double>& c0_values,
                                        std::size_t workers = 0);

// Delimiter-separated output with a header row.
std::string to_csv(const SweepTable& table);
std::string improvements_csv(const SweepTable& table);
std::string to_csv(const std::vector<AdmissionRow>& rows);
std::string to_csv(const std::vector<GreedyRow>& rows, bool include_timing);

std::string config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const std::string& text);

double pairwise_sum(const double* values, std::size_t n);

}  // namespace bwalloc::sim
