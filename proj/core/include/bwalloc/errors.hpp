#pragma once

#include <stdexcept>
#include <string>

namespace bwalloc {

// Raised by the minimum-bandwidth function when the requested capacity cannot
// be reached at any bandwidth: w*ln(1 + h*p/w) < h*p, so p must exceed c/h.
class InfeasiblePowerError : public std::domain_error {
 public:
  InfeasiblePowerError(double power, double floor)
      : std::domain_error("power " + std::to_string(power) +
                          " does not exceed the feasibility floor " +
                          std::to_string(floor)),
        power_(power),
        floor_(floor) {}

  double power() const { return power_; }
  double floor() const { return floor_; }

 private:
  double power_;
  double floor_;
};

// An allocation problem whose thresholds cannot all be met. The certificate
// is the minimum total bandwidth the users would need (infinite when some
// source cannot even cover its users' power floors).
class InfeasibleInstanceError : public std::runtime_error {
 public:
  InfeasibleInstanceError(const std::string& what, double required_bandwidth,
                          double available_bandwidth, int phase = 0)
      : std::runtime_error(what),
        required_bandwidth_(required_bandwidth),
        available_bandwidth_(available_bandwidth),
        phase_(phase) {}

  double required_bandwidth() const { return required_bandwidth_; }
  double available_bandwidth() const { return available_bandwidth_; }
  // 0 for single-hop networks, 1 or 2 for the relay transmission phase.
  int phase() const { return phase_; }

 private:
  double required_bandwidth_;
  double available_bandwidth_;
  int phase_;
};

class InstanceTooLargeError : public std::length_error {
 public:
  InstanceTooLargeError(std::size_t users, std::size_t cap)
      : std::length_error("exhaustive search over " + std::to_string(users) +
                          " users exceeds the cap of " + std::to_string(cap)),
        users_(users),
        cap_(cap) {}

  std::size_t users() const { return users_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t users_;
  std::size_t cap_;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bwalloc
