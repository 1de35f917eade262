#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bwalloc/model.hpp"
#include "bwalloc/solver_core.hpp"

namespace bwalloc::programs {

/// bound - C(p, w) <= 0, where the bound is either an epigraph variable
/// (T - C <= 0) or a constant threshold (c - C <= 0), and the bandwidth is
/// either a variable or fixed.
class CapacityBound final : public solver::SmoothFunction {
 public:
  struct Spec {
    int power = -1;
    int bandwidth = -1;  // -1: use fixed_bandwidth
    double fixed_bandwidth = 0.0;
    int epigraph = -1;  // -1: use threshold
    double threshold = 0.0;
    double gain = 1.0;
    double noise_psd = 1.0;
  };

  explicit CapacityBound(Spec spec) : spec_(spec) {}

  double value(const solver::Vector& x) const override;
  void gradient(const solver::Vector& x, solver::Vector& out) const override;
  void add_hessian(const solver::Vector& x, double scale,
                   solver::Matrix& hessian) const override;

 private:
  double bandwidth(const solver::Vector& x) const {
    return spec_.bandwidth >= 0 ? x[spec_.bandwidth] : spec_.fixed_bandwidth;
  }
  Spec spec_;
};

/// -sum_i C(p_i, w_i) over (power, bandwidth) index pairs.
class NegatedCapacitySum final : public solver::SmoothFunction {
 public:
  struct Term {
    int power;
    int bandwidth;
    double gain;
  };

  NegatedCapacitySum(std::vector<Term> terms, double noise_psd)
      : terms_(std::move(terms)), noise_psd_(noise_psd) {}

  double value(const solver::Vector& x) const override;
  void gradient(const solver::Vector& x, solver::Vector& out) const override;
  void add_hessian(const solver::Vector& x, double scale,
                   solver::Matrix& hessian) const override;

 private:
  std::vector<Term> terms_;
  double noise_psd_;
};

/// Variable indices of one hop's shares; bandwidth index -1 means the
/// bandwidth is fixed at `fixed_bandwidth`.
struct HopVariables {
  std::vector<std::size_t> users;
  std::vector<int> power;
  std::vector<int> bandwidth;
  double fixed_bandwidth = 0.0;

  PhaseShare share(const solver::Vector& x, std::size_t k) const;
};

/// Incrementally assembles a ConvexProgram together with its strictly
/// feasible start.
class ProgramBuilder {
 public:
  int add_variable(double start);
  void add_inequality(solver::FunctionPtr g);

  // Power variables per active user, one power cap per transmitter,
  // nonnegativity, and (unless fixed) bandwidth variables with the shared
  // bandwidth cap. The start spends `fill` of every budget evenly.
  HopVariables add_hop(const Hop& hop, std::span<const std::size_t> users,
                       std::optional<double> fixed_bandwidth = std::nullopt,
                       double fill = 0.5);

  solver::ConvexProgram build(solver::FunctionPtr objective) const;
  const std::vector<double>& start() const { return start_; }
  void set_start(int index, double value) { start_[index] = value; }

 private:
  std::vector<double> start_;
  std::vector<solver::FunctionPtr> inequalities_;
};

/// A program plus the decoder back to an allocation.
struct SumCapacityProgram {
  solver::ConvexProgram program;
  HopVariables first;
  std::optional<HopVariables> second;  // relay networks only
  std::vector<int> epigraph;           // T_i per active user (relay only)
};

// Problem (sum capacity, no relaying) over all users of `hop`.
SumCapacityProgram sum_capacity_program(const Hop& hop);

// Relay sum capacity in epigraph form over `active` users. With
// `fixed_bandwidth` both phases keep bandwidth fixed (power-only problem).
SumCapacityProgram relay_sum_capacity_program(
    const Hop& first, const Hop& second, std::span<const std::size_t> active,
    std::optional<double> fixed_bandwidth = std::nullopt);

struct MaxMinProgram {
  solver::ConvexProgram program;
  HopVariables first;
  std::optional<HopVariables> second;
  int epigraph = -1;
};

// max T s.t. T <= C_i for every user (every hop when `second` is given).
MaxMinProgram max_min_program(const Hop& first, const Hop* second = nullptr);

struct PowerMinProgram {
  solver::ConvexProgram program;
  HopVariables first;
  std::optional<HopVariables> second;
};

// min total power s.t. C_i >= c_i on every hop given. The start is derived
// from the minimum-bandwidth oracle at slightly tightened thresholds and
// budgets; throws InfeasibleInstanceError when no strictly feasible point
// can be found that way. Errors carry `phase` for a lone hop and 1/2 when
// both hops are given.
PowerMinProgram power_min_program(const Hop& first,
                                  std::span<const double> thresholds,
                                  const Hop* second = nullptr, int phase = 0);

}  // namespace bwalloc::programs
