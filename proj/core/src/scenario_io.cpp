#include "bwalloc/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bwalloc {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& member(const json& object, const std::string& key,
                   const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ScenarioFormatError(join(path, key), "missing field");
  }
  return *it;
}

double number(const json& object, const std::string& key,
              const std::string& path) {
  const json& value = member(object, key, path);
  if (!value.is_number()) {
    throw ScenarioFormatError(join(path, key), "expected a number");
  }
  return value.get<double>();
}

int integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) {
    throw ScenarioFormatError(path, "expected an integer");
  }
  return value.get<int>();
}

std::vector<Node> nodes(const json& document, const std::string& key,
                        bool required) {
  std::vector<Node> out;
  auto it = document.find(key);
  if (it == document.end()) {
    if (required) throw ScenarioFormatError(key, "missing field");
    return out;
  }
  if (!it->is_array()) throw ScenarioFormatError(key, "expected an array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    std::string const path = key + "[" + std::to_string(i) + "]";
    const json& entry = (*it)[i];
    if (!entry.is_object()) throw ScenarioFormatError(path, "expected an object");
    out.push_back({integer(member(entry, "id", path), path + ".id"),
                   number(entry, "power_budget", path)});
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioFormatError("<document>", e.what());
  }
  if (!document.is_object()) {
    throw ScenarioFormatError("<document>", "expected a JSON object");
  }
  if (auto it = document.find("format");
      it != document.end() && *it != kScenarioFormat) {
    throw ScenarioFormatError("format", "expected \"" +
                                            std::string(kScenarioFormat) + "\"");
  }
  if (auto it = document.find("version"); it != document.end()) {
    if (integer(*it, "version") != kScenarioVersion) {
      throw ScenarioFormatError("version", "unsupported version");
    }
  }

  Scenario scenario;
  NetworkTopology& topology = scenario.topology;
  topology.total_bandwidth = number(document, "total_bandwidth", "");
  if (document.contains("noise_psd")) {
    topology.noise_psd = number(document, "noise_psd", "");
  }
  topology.sources = nodes(document, "sources", true);
  topology.relays = nodes(document, "relays", false);

  const json& users = member(document, "users", "");
  if (!users.is_array()) throw ScenarioFormatError("users", "expected an array");
  bool any_sd = false, any_sr = false, any_rd = false;
  for (const auto& entry : users) {
    any_sd = any_sd || entry.contains("h_sd");
    any_sr = any_sr || entry.contains("h_sr");
    any_rd = any_rd || entry.contains("h_rd");
  }
  for (std::size_t i = 0; i < users.size(); ++i) {
    std::string const path = "users[" + std::to_string(i) + "]";
    const json& entry = users[i];
    if (!entry.is_object()) throw ScenarioFormatError(path, "expected an object");
    User user;
    user.id = integer(member(entry, "id", path), path + ".id");
    user.source_id = integer(member(entry, "source", path), path + ".source");
    if (entry.contains("relay")) {
      user.relay_id = integer(entry["relay"], path + ".relay");
    }
    if (entry.contains("c_min")) user.c_min = number(entry, "c_min", path);
    topology.users.push_back(user);
    if (any_sd) scenario.gains.direct.push_back(number(entry, "h_sd", path));
    if (any_sr) scenario.gains.first_hop.push_back(number(entry, "h_sr", path));
    if (any_rd) scenario.gains.second_hop.push_back(number(entry, "h_rd", path));
  }

  for (const auto& report :
       {validate_topology(topology), validate_gains(topology, scenario.gains)}) {
    if (!report.empty()) {
      throw ScenarioFormatError(report.front().field, report.front().message);
    }
  }
  return scenario;
}

Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFormatError(path, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& scenario) {
  const NetworkTopology& topology = scenario.topology;
  json document;
  document["format"] = kScenarioFormat;
  document["version"] = kScenarioVersion;
  document["total_bandwidth"] = topology.total_bandwidth;
  document["noise_psd"] = topology.noise_psd;
  auto dump_nodes = [](const std::vector<Node>& list) {
    json out = json::array();
    for (const auto& node : list) {
      out.push_back({{"id", node.id}, {"power_budget", node.power_budget}});
    }
    return out;
  };
  document["sources"] = dump_nodes(topology.sources);
  if (!topology.relays.empty()) document["relays"] = dump_nodes(topology.relays);
  json users = json::array();
  for (std::size_t u = 0; u < topology.users.size(); ++u) {
    const User& user = topology.users[u];
    json entry{{"id", user.id}, {"source", user.source_id}};
    if (user.relay_id) entry["relay"] = *user.relay_id;
    if (user.c_min) entry["c_min"] = *user.c_min;
    if (u < scenario.gains.direct.size()) entry["h_sd"] = scenario.gains.direct[u];
    if (u < scenario.gains.first_hop.size()) {
      entry["h_sr"] = scenario.gains.first_hop[u];
    }
    if (u < scenario.gains.second_hop.size()) {
      entry["h_rd"] = scenario.gains.second_hop[u];
    }
    users.push_back(entry);
  }
  document["users"] = users;
  return document.dump(2) + "\n";
}

void write_scenario_file(const std::string& path, const Scenario& scenario) {
  std::ofstream out(path);
  if (!out) throw ScenarioFormatError(path, "cannot open file for writing");
  out << serialize_scenario(scenario);
}

}  // namespace bwalloc
