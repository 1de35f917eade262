#include <gtest/gtest.h>

#include <algorithm>

#include "bwalloc/capacity.hpp"
#include "bwalloc/model.hpp"

namespace {

using namespace bwalloc;

NetworkTopology two_source_relay() {
  NetworkTopology t;
  t.sources = {{1, 20.0}, {2, 10.0}};
  t.relays = {{7, 40.0}};
  t.users = {{1, 1, 7, 1.0}, {2, 2, 7, 2.0}, {3, 1, 7, std::nullopt}};
  t.total_bandwidth = 10.0;
  return t;
}

bool has_field(const ValidationReport& report, const std::string& field) {
  return std::any_of(report.begin(), report.end(),
                     [&](const Violation& v) { return v.field == field; });
}

TEST(PhaseShare, ZeroBandwidthCarriesNoPower) {
  PhaseShare const s(3.0, 0.0);
  EXPECT_EQ(s.power(), 0.0);
  EXPECT_FALSE(s.active());
  EXPECT_THROW(PhaseShare(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(PhaseShare(1.0, -1.0), std::invalid_argument);
}

TEST(Topology, GroupsUsersByTransmitter) {
  auto const t = two_source_relay();
  EXPECT_TRUE(t.relaying());
  auto const by_source = t.users_by_source();
  ASSERT_EQ(by_source.size(), 2u);
  EXPECT_EQ(by_source[0], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(by_source[1], (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.users_by_relay()[0].size(), 3u);
}

TEST(Topology, DanglingReferenceThrows) {
  auto t = two_source_relay();
  t.users[1].source_id = 99;
  EXPECT_THROW(t.source_index_of_users(), std::invalid_argument);
}

TEST(Validation, AcceptsWellFormedTopology) {
  EXPECT_TRUE(validate_topology(two_source_relay()).empty());
}

TEST(Validation, NamesOffendingFields) {
  auto t = two_source_relay();
  t.total_bandwidth = 0.0;
  t.sources[1].power_budget = -1.0;
  t.users[0].relay_id.reset();
  t.users[2].id = 2;
  t.users[1].c_min = 0.0;
  auto const report = validate_topology(t);
  EXPECT_TRUE(has_field(report, "total_bandwidth"));
  EXPECT_TRUE(has_field(report, "sources[id=2].power_budget"));
  EXPECT_TRUE(has_field(report, "users[id=1].relay"));
  EXPECT_TRUE(has_field(report, "users[id=2].id"));
  EXPECT_TRUE(has_field(report, "users[id=2].c_min"));
}

TEST(Validation, RelayOnNoRelayTopology) {
  NetworkTopology t;
  t.sources = {{1, 1.0}};
  t.users = {{1, 1, 3, std::nullopt}};
  t.total_bandwidth = 1.0;
  EXPECT_TRUE(has_field(validate_topology(t), "users[id=1].relay"));
}

TEST(Validation, GainsPerMode) {
  auto const t = two_source_relay();
  ChannelGains g;
  g.first_hop = {1.0, 2.0, 3.0};
  EXPECT_TRUE(has_field(validate_gains(t, g), "h_rd"));
  g.second_hop = {1.0, 0.0, 3.0};
  EXPECT_TRUE(has_field(validate_gains(t, g), "users[id=2].h_rd"));
  g.second_hop[1] = 2.0;
  EXPECT_TRUE(validate_gains(t, g).empty());
}

TEST(Thresholds, MissingThresholdIsNamed) {
  try {
    thresholds_of(two_source_relay());
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("users[id=3].c_min"), std::string::npos);
  }
}

TEST(Hops, CarryBudgetsAndGains) {
  auto const t = two_source_relay();
  ChannelGains g;
  g.first_hop = {1.0, 2.0, 3.0};
  g.second_hop = {4.0, 5.0, 6.0};
  Hop const h1 = first_hop(t, g);
  Hop const h2 = second_hop(t, g);
  EXPECT_EQ(h1.budgets, (std::vector<double>{20.0, 10.0}));
  EXPECT_EQ(h1.transmitter_of, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(h2.budgets, (std::vector<double>{40.0}));
  EXPECT_EQ(h2.gains, g.second_hop);
  EXPECT_THROW(direct_hop(t, g), std::invalid_argument);
}

TEST(Feasibility, ReportsSlackPerConstraint) {
  auto const t = two_source_relay();
  Allocation a = Allocation::zeros(3);
  a.users[0] = {PhaseShare(15.0, 4.0), PhaseShare(20.0, 5.0)};
  a.users[1] = {PhaseShare(10.0, 3.0), PhaseShare(20.0, 5.0)};
  a.users[2] = {PhaseShare(5.0, 3.0), PhaseShare()};
  auto report = check_feasibility(t, a);
  EXPECT_TRUE(report.satisfied);
  ASSERT_EQ(report.constraints.size(), 5u);
  EXPECT_DOUBLE_EQ(report.constraints[0].slack(), 0.0);
  EXPECT_DOUBLE_EQ(report.constraints[2].usage, 10.0);

  a.users[2] = {PhaseShare(5.0 + 1e-6, 3.0), PhaseShare()};
  EXPECT_FALSE(check_feasibility(t, a).satisfied);
  EXPECT_TRUE(check_feasibility(t, a, 1e-6).satisfied);
  EXPECT_THROW(check_feasibility(t, Allocation::zeros(2)), std::invalid_argument);
}

TEST(Feasibility, RelayShareWithoutRelayingIsAnIssue) {
  NetworkTopology t;
  t.sources = {{1, 1.0}};
  t.users = {{1, 1, std::nullopt, std::nullopt}};
  t.total_bandwidth = 1.0;
  Allocation a = Allocation::zeros(1);
  a.users[0].relay = PhaseShare(0.1, 0.1);
  auto const report = check_feasibility(t, a);
  EXPECT_FALSE(report.satisfied);
  EXPECT_EQ(report.issues.size(), 1u);
}

TEST(Capacities, EndToEndIsWeakerHop) {
  auto const t = two_source_relay();
  ChannelGains g;
  g.first_hop = {1.0, 2.0, 3.0};
  g.second_hop = {4.0, 5.0, 6.0};
  Allocation a = Allocation::zeros(3);
  a.users[0] = {PhaseShare(1.0, 1.0), PhaseShare(1.0, 1.0)};
  auto const c = user_capacities(t, g, a);
  EXPECT_DOUBLE_EQ(c[0], link_capacity(1.0, 1.0, 1.0, 1.0));
  EXPECT_EQ(c[1], 0.0);
  EXPECT_EQ(c[2], 0.0);
}

}  // namespace
