#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "bwalloc/capacity.hpp"
#include "bwalloc/errors.hpp"
#include "oracles.hpp"

namespace {

using namespace bwalloc;

TEST(LinkCapacity, KnownValues) {
  EXPECT_NEAR(link_capacity(1.1, 0.4039, 4.0, 1.0), 1.0, 1e-3);
  EXPECT_EQ(link_capacity(0.0, 5.0, 3.0, 1.0), 0.0);
  EXPECT_EQ(link_capacity(2.0, 0.0, 3.0, 1.0), 0.0);
  EXPECT_NEAR(link_capacity(std::exp(1.0) - 1.0, 1.0, 1.0, 1.0), 1.0, 1e-14);
}

TEST(LinkCapacity, NoisePsdScalesGain) {
  EXPECT_DOUBLE_EQ(link_capacity(2.0, 1.5, 6.0, 2.0), link_capacity(2.0, 1.5, 3.0, 1.0));
}

TEST(LinkCapacity, RejectsInvalidInputs) {
  EXPECT_THROW(link_capacity(-1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(link_capacity(1.0, -1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(link_capacity(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(link_capacity(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(TwoHopCapacity, WeakerHopBinds) {
  EXPECT_NEAR(two_hop_capacity(1.1, 0.4039, 4.0, 10.0, 10.0, 10.0, 1.0), 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(two_hop_capacity(2.0, 1.0, 3.0, 2.0, 1.0, 3.0, 1.0),
                   link_capacity(2.0, 1.0, 3.0, 1.0));
  EXPECT_EQ(two_hop_capacity(2.0, 1.0, 3.0, 2.0, 0.0, 3.0, 1.0), 0.0);
}

TEST(MinBandwidth, ExampleValues) {
  EXPECT_NEAR(min_bandwidth(1.1, 4.0, 1.0), 0.4039, 5e-4);
  EXPECT_NEAR(min_bandwidth(1.1, 5.0, 1.1), 0.4135, 5e-4);
  EXPECT_NEAR(min_bandwidth(1.1, 6.0, 1.2), 0.4292, 5e-4);
}

TEST(MinBandwidth, FloorIsReported) {
  try {
    min_bandwidth(0.25, 4.0, 1.0);
    FAIL() << "expected InfeasiblePowerError";
  } catch (const InfeasiblePowerError& e) {
    EXPECT_DOUBLE_EQ(e.floor(), 0.25);
    EXPECT_DOUBLE_EQ(e.power(), 0.25);
  }
  EXPECT_THROW(min_bandwidth(0.1, 4.0, 1.0), InfeasiblePowerError);
}

TEST(MinBandwidth, MatchesBisectionReference) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> h(0.05, 20.0), c(0.1, 5.0), over(1.001, 50.0);
  for (int k = 0; k < 500; ++k) {
    double const hh = h(rng), cc = c(rng), p = cc / hh * over(rng);
    double const expect = oracle::min_bandwidth(p, hh, cc);
    EXPECT_NEAR(min_bandwidth(p, hh, cc), expect, 1e-9 * expect) << hh << " " << cc << " " << p;
  }
}

TEST(MinBandwidth, IsDeterministic) {
  double const a = min_bandwidth(1.7, 3.3, 2.1);
  double const b = min_bandwidth(1.7, 3.3, 2.1);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(InvMinBandwidth, ClosedForm) {
  EXPECT_NEAR(inv_min_bandwidth(1.0, 1.0, 1.0), std::exp(1.0) - 1.0, 1e-14);
  EXPECT_NEAR(inv_min_bandwidth(0.4039, 4.0, 1.0), 1.1, 2e-3);
  EXPECT_NEAR(min_bandwidth(inv_min_bandwidth(0.7, 3.0, 1.3), 3.0, 1.3), 0.7, 1e-9);
  EXPECT_THROW(inv_min_bandwidth(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(inv_min_bandwidth(-1.0, 1.0, 1.0), std::invalid_argument);
}

TEST(CapacityGradients, MatchCentralDifferences) {
  double const p = 2.0, w = 1.0, h = 3.0, n0 = 1.0, s = 1e-5;
  auto const d = capacity_gradients(p, w, h, n0);
  auto c = [&](double pp, double ww) { return link_capacity(pp, ww, h, n0); };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
  EXPECT_LE(rel(d.d_power, (c(p + s, w) - c(p - s, w)) / (2 * s)), 1e-6);
  EXPECT_LE(rel(d.d_bandwidth, (c(p, w + s) - c(p, w - s)) / (2 * s)), 1e-6);
  double const s2 = 1e-4;
  EXPECT_LE(rel(d.d_power_power, (c(p + s2, w) - 2 * c(p, w) + c(p - s2, w)) / (s2 * s2)), 1e-5);
  EXPECT_LE(rel(d.d_bandwidth_bandwidth,
                (c(p, w + s2) - 2 * c(p, w) + c(p, w - s2)) / (s2 * s2)), 1e-5);
  double const cross = (c(p + s2, w + s2) - c(p + s2, w - s2) - c(p - s2, w + s2) +
                        c(p - s2, w - s2)) / (4 * s2 * s2);
  EXPECT_LE(rel(d.d_power_bandwidth, cross), 1e-5);
}

TEST(CapacityGradients, SlopeAtZeroPower) {
  EXPECT_NEAR(capacity_gradients(1e-12, 1.0, 1.0, 1.0).d_power, 1.0, 1e-9);
  EXPECT_THROW(capacity_gradients(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST(CapacityGradients, HessianIsNegativeSemidefinite) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int k = 0; k < 1000; ++k) {
    auto const d = capacity_gradients(u(rng), u(rng), u(rng), 1.0);
    EXPECT_LE(d.d_power_power, 0.0);
    EXPECT_LE(d.d_bandwidth_bandwidth, 0.0);
    double const det = d.d_power_power * d.d_bandwidth_bandwidth -
                       d.d_power_bandwidth * d.d_power_bandwidth;
    EXPECT_GE(det, -1e-12);
  }
}

TEST(CapacityProperties, JointConcavity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 20.0), lam(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    double const h = 0.1 + u(rng);
    double const p1 = u(rng), w1 = u(rng), p2 = u(rng), w2 = u(rng), l = lam(rng);
    double const mid = link_capacity(l * p1 + (1 - l) * p2, l * w1 + (1 - l) * w2, h, 1.0);
    double const chord = l * link_capacity(p1, w1, h, 1.0) + (1 - l) * link_capacity(p2, w2, h, 1.0);
    EXPECT_GE(mid, chord - 1e-9);
  }
}

TEST(CapacityProperties, IncreasingInPowerAndBandwidth) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 20.0);
  for (int k = 0; k < 1000; ++k) {
    double const h = u(rng), p = u(rng), w = u(rng);
    double const c = link_capacity(p, w, h, 1.0);
    EXPECT_GT(link_capacity(p * 1.001, w, h, 1.0), c);
    EXPECT_GT(link_capacity(p, w * 1.001, h, 1.0), c);
  }
}

// F(p1 - dp) - F(p1) < F(p2 - dp) - F(p2) for p1 > p2 > dp + floor: the
// bandwidth cost of losing power shrinks as power grows.
TEST(CapacityProperties, MinBandwidthConvexDecreasing) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> h(0.1, 10.0), c(0.1, 3.0), u(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    double const hh = h(rng), cc = c(rng), floor = cc / hh;
    double const dp = floor * (0.01 + u(rng));
    double const p2 = floor + dp * (1.01 + 3.0 * u(rng));
    double const p1 = p2 * (1.01 + 2.0 * u(rng));
    double const lhs = min_bandwidth(p1 - dp, hh, cc) - min_bandwidth(p1, hh, cc);
    double const rhs = min_bandwidth(p2 - dp, hh, cc) - min_bandwidth(p2, hh, cc);
    EXPECT_GT(lhs, 0.0);
    EXPECT_LT(lhs, rhs);
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

}  // namespace
