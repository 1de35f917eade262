#include "bwalloc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "bwalloc/errors.hpp"
#include "bwalloc/root_finding.hpp"

namespace bwalloc {

namespace {

constexpr double kRootTolerance = 1e-13;

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

double link_capacity(double power, double bandwidth, double gain,
                     double noise_psd) {
  require(power >= 0.0, "link_capacity: negative power");
  require(bandwidth >= 0.0, "link_capacity: negative bandwidth");
  require(gain > 0.0, "link_capacity: gain must be positive");
  require(noise_psd > 0.0, "link_capacity: noise PSD must be positive");
  if (power == 0.0 || bandwidth == 0.0) return 0.0;
  return bandwidth * std::log1p(gain * power / (bandwidth * noise_psd));
}

double two_hop_capacity(double source_power, double source_bandwidth,
                        double first_hop_gain, double relay_power,
                        double relay_bandwidth, double second_hop_gain,
                        double noise_psd) {
  return std::min(
      link_capacity(source_power, source_bandwidth, first_hop_gain, noise_psd),
      link_capacity(relay_power, relay_bandwidth, second_hop_gain, noise_psd));
}

double min_bandwidth(double power, double gain, double threshold) {
  require(gain > 0.0, "min_bandwidth: gain must be positive");
  require(threshold > 0.0, "min_bandwidth: threshold must be positive");
  require(power >= 0.0, "min_bandwidth: negative power");
  double const floor = threshold / gain;
  double const snr_bandwidth = gain * power;
  if (!(snr_bandwidth > threshold)) throw InfeasiblePowerError(power, floor);

  auto residual = [&](double w) {
    double const ratio = snr_bandwidth / w;
    double const value = w * std::log1p(ratio) - threshold;
    double const slope = std::log1p(ratio) - snr_bandwidth / (w + snr_bandwidth);
    return std::pair{value, slope};
  };

  double lo = threshold;
  while (residual(lo).first >= 0.0) lo *= 0.25;
  double hi = threshold;
  int widenings = 0;
  while (residual(hi).first <= 0.0) {
    hi *= 4.0;
    // Only reachable when power sits within rounding of the floor.
    if (++widenings > 600 || !std::isfinite(hi)) {
      throw InfeasiblePowerError(power, floor);
    }
  }
  return numerics::solve_increasing(residual, lo, hi, kRootTolerance);
}

double inv_min_bandwidth(double bandwidth, double gain, double threshold) {
  require(bandwidth > 0.0, "inv_min_bandwidth: bandwidth must be positive");
  require(gain > 0.0, "inv_min_bandwidth: gain must be positive");
  require(threshold > 0.0, "inv_min_bandwidth: threshold must be positive");
  return std::expm1(threshold / bandwidth) * bandwidth / gain;
}

CapacityDerivatives capacity_gradients(double power, double bandwidth,
                                       double gain, double noise_psd) {
  require(power > 0.0 && bandwidth > 0.0,
          "capacity_gradients: requires an interior point");
  require(gain > 0.0 && noise_psd > 0.0,
          "capacity_gradients: gain and noise PSD must be positive");
  double const a = gain / noise_psd;
  double const ap = a * power;
  double const s = bandwidth + ap;
  CapacityDerivatives d;
  d.d_power = a * bandwidth / s;
  d.d_bandwidth = std::log1p(ap / bandwidth) - ap / s;
  d.d_power_power = -a * a * bandwidth / (s * s);
  d.d_power_bandwidth = a * ap / (s * s);
  d.d_bandwidth_bandwidth = -ap * ap / (bandwidth * s * s);
  return d;
}

}  // namespace bwalloc
