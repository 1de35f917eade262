#pragma once

namespace bwalloc {

// Shannon capacity in nats/s of a link with power p and bandwidth w,
// w*ln(1 + h*p/(w*n0)). Exactly zero when p == 0 or w == 0. Throws
// std::invalid_argument on negative p/w or non-positive h/n0.
double link_capacity(double power, double bandwidth, double gain,
                     double noise_psd);

// Decode-and-forward end-to-end capacity: the weaker of the two hops.
double two_hop_capacity(double source_power, double source_bandwidth,
                        double first_hop_gain, double relay_power,
                        double relay_bandwidth, double second_hop_gain,
                        double noise_psd);

/// Minimum bandwidth F(p) at which power `power` reaches capacity
/// `threshold` over a link with noise-normalized gain `gain` (h/n0), i.e. the
/// unique w > 0 with threshold = w*ln(1 + gain*power/w).
///
/// The achievable capacity saturates at gain*power as w grows, so a root
/// exists only when power > threshold/gain; otherwise InfeasiblePowerError is
/// thrown carrying that floor. F is strictly convex and strictly decreasing.
double min_bandwidth(double power, double gain, double threshold);

// Closed-form inverse of min_bandwidth: (exp(c/w) - 1) * w / h.
double inv_min_bandwidth(double bandwidth, double gain, double threshold);

struct CapacityDerivatives {
  double d_power = 0.0;
  double d_bandwidth = 0.0;
  double d_power_power = 0.0;
  double d_power_bandwidth = 0.0;
  double d_bandwidth_bandwidth = 0.0;
};

// Analytic gradient and Hessian of link_capacity at an interior point
// (p > 0, w > 0). The Hessian is rank one and negative semidefinite.
CapacityDerivatives capacity_gradients(double power, double bandwidth,
                                       double gain, double noise_psd);

}  // namespace bwalloc
