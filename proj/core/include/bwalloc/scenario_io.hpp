#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "bwalloc/model.hpp"

namespace bwalloc {

/// A network instance as stored on disk: topology, per-user gains and
/// (optional) per-user thresholds in one JSON document.
///
///   {
///     "format": "bwalloc.scenario", "version": 1,
///     "total_bandwidth": 10, "noise_psd": 1,
///     "sources": [{"id": 1, "power_budget": 20}],
///     "relays":  [{"id": 1, "power_budget": 40}],          // optional
///     "users": [{"id": 1, "source": 1, "relay": 1,          // relay optional
///                "c_min": 1.0,                            // optional
///                "h_sd": 0.5, "h_sr": 2.0, "h_rd": 1.5}]  // per mode
///   }
struct Scenario {
  NetworkTopology topology;
  ChannelGains gains;
};

inline constexpr const char* kScenarioFormat = "bwalloc.scenario";
inline constexpr int kScenarioVersion = 1;

/// Malformed or invalid scenario document. `field()` names the offending
/// JSON path.
class ScenarioFormatError : public std::runtime_error {
 public:
  ScenarioFormatError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Parses and validates (topology and gains). Throws ScenarioFormatError.
Scenario parse_scenario(const std::string& text);
Scenario read_scenario_file(const std::string& path);

// Round-trip exact: doubles are written with 17 significant digits.
std::string serialize_scenario(const Scenario& scenario);
void write_scenario_file(const std::string& path, const Scenario& scenario);

}  // namespace bwalloc
