#include "bwalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bwalloc/capacity.hpp"

namespace bwalloc {

namespace {

std::size_t index_of(const std::vector<Node>& nodes, int id, const char* kind,
                     int user_id) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw std::invalid_argument("user " + std::to_string(user_id) +
                              " references unknown " + kind + " " +
                              std::to_string(id));
}

std::vector<std::vector<std::size_t>> group(
    const std::vector<std::size_t>& owner, std::size_t groups) {
  std::vector<std::vector<std::size_t>> out(groups);
  for (std::size_t u = 0; u < owner.size(); ++u) out[owner[u]].push_back(u);
  return out;
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::string user_field(const User& user, const char* field) {
  return "users[id=" + std::to_string(user.id) + "]." + field;
}

}  // namespace

PhaseShare::PhaseShare(double power, double bandwidth) {
  if (!(power >= 0.0) || !(bandwidth >= 0.0)) {
    throw std::invalid_argument("PhaseShare: power and bandwidth must be >= 0");
  }
  if (bandwidth > 0.0) {
    power_ = power;
    bandwidth_ = bandwidth;
  }
}

std::vector<std::size_t> NetworkTopology::source_index_of_users() const {
  std::vector<std::size_t> out;
  out.reserve(users.size());
  for (const auto& user : users) {
    out.push_back(index_of(sources, user.source_id, "source", user.id));
  }
  return out;
}

std::vector<std::size_t> NetworkTopology::relay_index_of_users() const {
  std::vector<std::size_t> out;
  out.reserve(users.size());
  for (const auto& user : users) {
    if (!user.relay_id) {
      throw std::invalid_argument("user " + std::to_string(user.id) +
                                  " has no relay");
    }
    out.push_back(index_of(relays, *user.relay_id, "relay", user.id));
  }
  return out;
}

std::vector<std::vector<std::size_t>> NetworkTopology::users_by_source() const {
  return group(source_index_of_users(), sources.size());
}

std::vector<std::vector<std::size_t>> NetworkTopology::users_by_relay() const {
  return group(relay_index_of_users(), relays.size());
}

std::vector<std::vector<std::size_t>> Hop::users_by_transmitter() const {
  return group(transmitter_of, budgets.size());
}

namespace {

Hop make_hop(const std::vector<Node>& transmitters,
             std::vector<std::size_t> owner, const std::vector<double>& gains,
             const NetworkTopology& topology, const char* which) {
  if (gains.size() != topology.user_count()) {
    throw std::invalid_argument(std::string("missing ") + which +
                                " gains for some users");
  }
  Hop hop;
  for (const auto& node : transmitters) hop.budgets.push_back(node.power_budget);
  hop.transmitter_of = std::move(owner);
  hop.gains = gains;
  hop.total_bandwidth = topology.total_bandwidth;
  hop.noise_psd = topology.noise_psd;
  return hop;
}

}  // namespace

Hop direct_hop(const NetworkTopology& topology, const ChannelGains& gains) {
  return make_hop(topology.sources, topology.source_index_of_users(),
                  gains.direct, topology, "direct (h_sd)");
}

Hop first_hop(const NetworkTopology& topology, const ChannelGains& gains) {
  return make_hop(topology.sources, topology.source_index_of_users(),
                  gains.first_hop, topology, "first-hop (h_sr)");
}

Hop second_hop(const NetworkTopology& topology, const ChannelGains& gains) {
  return make_hop(topology.relays, topology.relay_index_of_users(),
                  gains.second_hop, topology, "second-hop (h_rd)");
}

ValidationReport validate_topology(const NetworkTopology& topology) {
  ValidationReport report;
  auto add = [&](std::string field, std::string message) {
    report.push_back({std::move(field), std::move(message)});
  };
  if (!positive_finite(topology.total_bandwidth)) {
    add("total_bandwidth", "must be positive and finite");
  }
  if (!positive_finite(topology.noise_psd)) {
    add("noise_psd", "must be positive and finite");
  }
  if (topology.sources.empty()) add("sources", "at least one source required");
  if (topology.users.empty()) add("users", "at least one user required");

  auto check_nodes = [&](const std::vector<Node>& nodes, const char* kind) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::string const field =
          std::string(kind) + "[id=" + std::to_string(nodes[i].id) + "]";
      if (!positive_finite(nodes[i].power_budget)) {
        add(field + ".power_budget", "must be positive and finite");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (nodes[j].id == nodes[i].id) add(field + ".id", "duplicate id");
      }
    }
  };
  check_nodes(topology.sources, "sources");
  check_nodes(topology.relays, "relays");

  auto known = [](const std::vector<Node>& nodes, int id) {
    return std::any_of(nodes.begin(), nodes.end(),
                       [id](const Node& n) { return n.id == id; });
  };
  for (std::size_t u = 0; u < topology.users.size(); ++u) {
    const User& user = topology.users[u];
    for (std::size_t v = 0; v < u; ++v) {
      if (topology.users[v].id == user.id) {
        add(user_field(user, "id"), "duplicate id");
      }
    }
    if (!known(topology.sources, user.source_id)) {
      add(user_field(user, "source"), "references an unknown source");
    }
    if (user.c_min && !positive_finite(*user.c_min)) {
      add(user_field(user, "c_min"), "must be positive and finite");
    }
    if (topology.relaying()) {
      if (!user.relay_id) {
        add(user_field(user, "relay"), "relay-mode topology requires a relay");
      } else if (!known(topology.relays, *user.relay_id)) {
        add(user_field(user, "relay"), "references an unknown relay");
      }
    } else if (user.relay_id) {
      add(user_field(user, "relay"), "no-relay topology must not assign relays");
    }
  }
  return report;
}

ValidationReport validate_gains(const NetworkTopology& topology,
                                const ChannelGains& gains) {
  ValidationReport report;
  auto check = [&](const std::vector<double>& values, const char* name) {
    if (values.size() != topology.user_count()) {
      report.push_back({name, "expected one gain per user"});
      return;
    }
    for (std::size_t u = 0; u < values.size(); ++u) {
      if (!positive_finite(values[u])) {
        report.push_back({user_field(topology.users[u], name),
                          "gain must be positive and finite"});
      }
    }
  };
  if (topology.relaying()) {
    check(gains.first_hop, "h_sr");
    check(gains.second_hop, "h_rd");
    if (gains.has_direct()) check(gains.direct, "h_sd");
  } else {
    check(gains.direct, "h_sd");
  }
  return report;
}

std::vector<double> thresholds_of(const NetworkTopology& topology) {
  std::vector<double> out;
  out.reserve(topology.user_count());
  for (const auto& user : topology.users) {
    if (!user.c_min) {
      throw std::invalid_argument(user_field(user, "c_min") +
                                  ": threshold required");
    }
    out.push_back(*user.c_min);
  }
  return out;
}

ConstraintReport check_feasibility(const NetworkTopology& topology,
                                   const Allocation& allocation,
                                   double rel_tol) {
  if (allocation.users.size() != topology.user_count()) {
    throw std::invalid_argument(
        "check_feasibility: allocation has " +
        std::to_string(allocation.users.size()) + " entries for " +
        std::to_string(topology.user_count()) + " users");
  }
  ConstraintReport report;
  auto const by_source = topology.users_by_source();
  for (std::size_t s = 0; s < topology.sources.size(); ++s) {
    ConstraintSlack c{"power[source " + std::to_string(topology.sources[s].id) + "]",
                      topology.sources[s].power_budget, 0.0};
    for (auto u : by_source[s]) c.usage += allocation.users[u].source.power();
    report.constraints.push_back(c);
  }
  ConstraintSlack band1{"bandwidth[phase 1]", topology.total_bandwidth, 0.0};
  for (const auto& a : allocation.users) band1.usage += a.source.bandwidth();
  report.constraints.push_back(band1);

  if (topology.relaying()) {
    auto const by_relay = topology.users_by_relay();
    for (std::size_t r = 0; r < topology.relays.size(); ++r) {
      ConstraintSlack c{"power[relay " + std::to_string(topology.relays[r].id) + "]",
                        topology.relays[r].power_budget, 0.0};
      for (auto u : by_relay[r]) c.usage += allocation.users[u].relay.power();
      report.constraints.push_back(c);
    }
    ConstraintSlack band2{"bandwidth[phase 2]", topology.total_bandwidth, 0.0};
    for (const auto& a : allocation.users) band2.usage += a.relay.bandwidth();
    report.constraints.push_back(band2);
  } else {
    for (std::size_t u = 0; u < allocation.users.size(); ++u) {
      if (allocation.users[u].relay.active()) {
        report.issues.push_back(
            user_field(topology.users[u], "relay share without relaying"));
      }
    }
  }

  for (const auto& c : report.constraints) {
    if (c.slack() < -rel_tol * c.budget) report.satisfied = false;
  }
  if (!report.issues.empty()) report.satisfied = false;
  return report;
}

std::vector<double> user_capacities(const NetworkTopology& topology,
                                    const ChannelGains& gains,
                                    const Allocation& allocation) {
  std::vector<double> out(topology.user_count(), 0.0);
  for (std::size_t u = 0; u < out.size(); ++u) {
    const auto& a = allocation.users[u];
    if (topology.relaying()) {
      out[u] = two_hop_capacity(a.source.power(), a.source.bandwidth(),
                                gains.first_hop[u], a.relay.power(),
                                a.relay.bandwidth(), gains.second_hop[u],
                                topology.noise_psd);
    } else {
      out[u] = link_capacity(a.source.power(), a.source.bandwidth(),
                             gains.direct[u], topology.noise_psd);
    }
  }
  return out;
}

}  // namespace bwalloc
