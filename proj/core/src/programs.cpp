#include "bwalloc/programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "bwalloc/bandwidth_min.hpp"
#include "bwalloc/capacity.hpp"
#include "bwalloc/errors.hpp"

namespace bwalloc::programs {

namespace {

constexpr double kOutside = std::numeric_limits<double>::infinity();

// Capacity on the open domain; +inf marks points outside it so the barrier
// rejects them regardless of constraint order.
bool interior(double p, double w) { return p > 0.0 && w > 0.0; }

double capacity(double p, double w, double gain, double noise_psd) {
  return w * std::log1p(gain * p / (noise_psd * w));
}

void add_capacity_hessian(int p_index, int w_index, double p, double w,
                          double gain, double noise_psd, double scale,
                          solver::Matrix& hessian) {
  auto const d = capacity_gradients(p, w, gain, noise_psd);
  hessian(p_index, p_index) += scale * d.d_power_power;
  if (w_index >= 0) {
    hessian(p_index, w_index) += scale * d.d_power_bandwidth;
    hessian(w_index, p_index) += scale * d.d_power_bandwidth;
    hessian(w_index, w_index) += scale * d.d_bandwidth_bandwidth;
  }
}

double even_capacity_floor(const Hop& hop, const HopVariables& vars,
                           const std::vector<double>& start) {
  double lowest = kOutside;
  for (std::size_t k = 0; k < vars.users.size(); ++k) {
    double const w =
        vars.bandwidth[k] >= 0 ? start[vars.bandwidth[k]] : vars.fixed_bandwidth;
    lowest = std::min(lowest, capacity(start[vars.power[k]], w,
                                       hop.gains[vars.users[k]], hop.noise_psd));
  }
  return lowest;
}

void add_capacity_bounds(ProgramBuilder& builder, const Hop& hop,
                         const HopVariables& vars, int epigraph,
                         std::span<const double> thresholds) {
  for (std::size_t k = 0; k < vars.users.size(); ++k) {
    CapacityBound::Spec spec;
    spec.power = vars.power[k];
    spec.bandwidth = vars.bandwidth[k];
    spec.fixed_bandwidth = vars.fixed_bandwidth;
    spec.epigraph = epigraph;
    spec.threshold = thresholds.empty() ? 0.0 : thresholds[vars.users[k]];
    spec.gain = hop.gains[vars.users[k]];
    spec.noise_psd = hop.noise_psd;
    builder.add_inequality(std::make_shared<CapacityBound>(spec));
  }
}

std::vector<std::size_t> all_users(const Hop& hop) {
  std::vector<std::size_t> users(hop.user_count());
  for (std::size_t u = 0; u < users.size(); ++u) users[u] = u;
  return users;
}

// A strictly feasible (p, w) for c_i <= C_i on one hop: the minimum-bandwidth
// solution at thresholds c(1 + d) and budgets P(1 - d), with the bandwidth
// then stretched halfway towards W.
std::vector<UserDemand> strict_start(const Hop& hop,
                                     std::span<const double> thresholds,
                                     int phase) {
  auto const users = all_users(hop);
  BandwidthDemand const exact = min_total_bandwidth(hop, thresholds, users);
  if (!(exact.total <= hop.total_bandwidth)) {
    throw InfeasibleInstanceError(
        "thresholds need more bandwidth than available", exact.total,
        hop.total_bandwidth, phase);
  }
  for (double d : {1e-3, 1e-5, 1e-7, 1e-9}) {
    Hop tight = hop;
    for (auto& b : tight.budgets) b *= 1.0 - d;
    std::vector<double> raised(thresholds.begin(), thresholds.end());
    for (auto& c : raised) c *= 1.0 + d;
    BandwidthDemand demand = min_total_bandwidth(tight, raised, users);
    if (!(demand.total < hop.total_bandwidth)) continue;
    double const stretch =
        (demand.total + hop.total_bandwidth) / (2.0 * demand.total);
    std::vector<UserDemand> out(hop.user_count());
    for (const auto& entry : demand.users) {
      out[entry.user] = {entry.user, entry.power, entry.bandwidth * stretch};
    }
    return out;
  }
  throw InfeasibleInstanceError("thresholds are only marginally feasible",
                                exact.total, hop.total_bandwidth, phase);
}

}  // namespace

double CapacityBound::value(const solver::Vector& x) const {
  double const p = x[spec_.power];
  double const w = bandwidth(x);
  if (!interior(p, w)) return kOutside;
  double const bound = spec_.epigraph >= 0 ? x[spec_.epigraph] : spec_.threshold;
  return bound - capacity(p, w, spec_.gain, spec_.noise_psd);
}

void CapacityBound::gradient(const solver::Vector& x, solver::Vector& out) const {
  out.setZero(x.size());
  auto const d = capacity_gradients(x[spec_.power], bandwidth(x), spec_.gain,
                                    spec_.noise_psd);
  out[spec_.power] = -d.d_power;
  if (spec_.bandwidth >= 0) out[spec_.bandwidth] = -d.d_bandwidth;
  if (spec_.epigraph >= 0) out[spec_.epigraph] = 1.0;
}

void CapacityBound::add_hessian(const solver::Vector& x, double scale,
                                solver::Matrix& hessian) const {
  add_capacity_hessian(spec_.power, spec_.bandwidth, x[spec_.power],
                       bandwidth(x), spec_.gain, spec_.noise_psd, -scale,
                       hessian);
}

double NegatedCapacitySum::value(const solver::Vector& x) const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    double const p = x[term.power], w = x[term.bandwidth];
    if (!interior(p, w)) return kOutside;
    sum -= capacity(p, w, term.gain, noise_psd_);
  }
  return sum;
}

void NegatedCapacitySum::gradient(const solver::Vector& x,
                                  solver::Vector& out) const {
  out.setZero(x.size());
  for (const auto& term : terms_) {
    auto const d = capacity_gradients(x[term.power], x[term.bandwidth],
                                      term.gain, noise_psd_);
    out[term.power] -= d.d_power;
    out[term.bandwidth] -= d.d_bandwidth;
  }
}

void NegatedCapacitySum::add_hessian(const solver::Vector& x, double scale,
                                     solver::Matrix& hessian) const {
  for (const auto& term : terms_) {
    add_capacity_hessian(term.power, term.bandwidth, x[term.power],
                         x[term.bandwidth], term.gain, noise_psd_, -scale,
                         hessian);
  }
}

PhaseShare HopVariables::share(const solver::Vector& x, std::size_t k) const {
  double const w =
      bandwidth[k] >= 0 ? std::max(0.0, x[bandwidth[k]]) : fixed_bandwidth;
  if (w == 0.0) return {};
  return {std::max(0.0, x[power[k]]), w};
}

int ProgramBuilder::add_variable(double start) {
  start_.push_back(start);
  return static_cast<int>(start_.size()) - 1;
}

void ProgramBuilder::add_inequality(solver::FunctionPtr g) {
  inequalities_.push_back(std::move(g));
}

HopVariables ProgramBuilder::add_hop(const Hop& hop,
                                     std::span<const std::size_t> users,
                                     std::optional<double> fixed_bandwidth,
                                     double fill) {
  HopVariables vars;
  vars.users.assign(users.begin(), users.end());
  vars.fixed_bandwidth = fixed_bandwidth.value_or(0.0);

  std::vector<std::size_t> served(hop.budgets.size(), 0);
  for (auto u : users) ++served[hop.transmitter_of[u]];

  std::vector<std::vector<std::pair<int, double>>> power_rows(hop.budgets.size());
  std::vector<std::pair<int, double>> bandwidth_row;
  double const n = static_cast<double>(users.size());
  for (auto u : users) {
    std::size_t const t = hop.transmitter_of[u];
    int const p = add_variable(fill * hop.budgets[t] / static_cast<double>(served[t]));
    vars.power.push_back(p);
    power_rows[t].emplace_back(p, 1.0);
    add_inequality(std::make_shared<solver::LinearFunction>(
        std::vector<std::pair<int, double>>{{p, -1.0}}, 0.0));
    if (fixed_bandwidth) {
      vars.bandwidth.push_back(-1);
      continue;
    }
    int const w = add_variable(fill * hop.total_bandwidth / n);
    vars.bandwidth.push_back(w);
    bandwidth_row.emplace_back(w, 1.0);
    add_inequality(std::make_shared<solver::LinearFunction>(
        std::vector<std::pair<int, double>>{{w, -1.0}}, 0.0));
  }
  for (std::size_t t = 0; t < power_rows.size(); ++t) {
    if (power_rows[t].empty()) continue;
    add_inequality(std::make_shared<solver::LinearFunction>(
        std::move(power_rows[t]), -hop.budgets[t]));
  }
  if (!bandwidth_row.empty()) {
    add_inequality(std::make_shared<solver::LinearFunction>(
        std::move(bandwidth_row), -hop.total_bandwidth));
  }
  return vars;
}

solver::ConvexProgram ProgramBuilder::build(solver::FunctionPtr objective) const {
  solver::ConvexProgram program;
  program.variables = static_cast<int>(start_.size());
  program.objective = std::move(objective);
  program.inequalities = inequalities_;
  program.equality_matrix.resize(0, program.variables);
  program.equality_rhs.resize(0);
  program.start = Eigen::Map<const solver::Vector>(start_.data(), program.variables);
  return program;
}

SumCapacityProgram sum_capacity_program(const Hop& hop) {
  ProgramBuilder builder;
  auto const users = all_users(hop);
  SumCapacityProgram out;
  out.first = builder.add_hop(hop, users);
  std::vector<NegatedCapacitySum::Term> terms;
  for (std::size_t k = 0; k < users.size(); ++k) {
    terms.push_back({out.first.power[k], out.first.bandwidth[k], hop.gains[users[k]]});
  }
  out.program = builder.build(
      std::make_shared<NegatedCapacitySum>(std::move(terms), hop.noise_psd));
  return out;
}

SumCapacityProgram relay_sum_capacity_program(
    const Hop& first, const Hop& second, std::span<const std::size_t> active,
    std::optional<double> fixed_bandwidth) {
  ProgramBuilder builder;
  SumCapacityProgram out;
  out.first = builder.add_hop(first, active, fixed_bandwidth);
  out.second = builder.add_hop(second, active, fixed_bandwidth);

  std::vector<std::pair<int, double>> objective;
  for (std::size_t k = 0; k < active.size(); ++k) {
    HopVariables one_first = out.first, one_second = *out.second;
    one_first.users = {active[k]};
    one_first.power = {out.first.power[k]};
    one_first.bandwidth = {out.first.bandwidth[k]};
    one_second.users = {active[k]};
    one_second.power = {out.second->power[k]};
    one_second.bandwidth = {out.second->bandwidth[k]};
    double const floor =
        std::min(even_capacity_floor(first, one_first, builder.start()),
                 even_capacity_floor(second, one_second, builder.start()));
    int const t = builder.add_variable(0.5 * floor);
    out.epigraph.push_back(t);
    objective.emplace_back(t, -1.0);
    add_capacity_bounds(builder, first, one_first, t, {});
    add_capacity_bounds(builder, second, one_second, t, {});
  }
  out.program = builder.build(
      std::make_shared<solver::LinearFunction>(std::move(objective), 0.0));
  return out;
}

MaxMinProgram max_min_program(const Hop& first, const Hop* second) {
  ProgramBuilder builder;
  MaxMinProgram out;
  auto const users = all_users(first);
  out.first = builder.add_hop(first, users);
  double floor = even_capacity_floor(first, out.first, builder.start());
  if (second) {
    out.second = builder.add_hop(*second, users);
    floor = std::min(floor, even_capacity_floor(*second, *out.second, builder.start()));
  }
  out.epigraph = builder.add_variable(0.5 * floor);
  add_capacity_bounds(builder, first, out.first, out.epigraph, {});
  if (second) add_capacity_bounds(builder, *second, *out.second, out.epigraph, {});
  out.program = builder.build(std::make_shared<solver::LinearFunction>(
      std::vector<std::pair<int, double>>{{out.epigraph, -1.0}}, 0.0));
  return out;
}

PowerMinProgram power_min_program(const Hop& first,
                                  std::span<const double> thresholds,
                                  const Hop* second, int phase) {
  ProgramBuilder builder;
  PowerMinProgram out;
  auto const users = all_users(first);
  std::vector<std::pair<int, double>> objective;

  auto add_phase = [&](const Hop& hop, int phase) {
    auto const start = strict_start(hop, thresholds, phase);
    HopVariables vars = builder.add_hop(hop, users);
    for (std::size_t k = 0; k < users.size(); ++k) {
      builder.set_start(vars.power[k], start[k].power);
      builder.set_start(vars.bandwidth[k], start[k].bandwidth);
      objective.emplace_back(vars.power[k], 1.0);
    }
    add_capacity_bounds(builder, hop, vars, -1, thresholds);
    return vars;
  };

  out.first = add_phase(first, second ? 1 : phase);
  if (second) out.second = add_phase(*second, 2);
  out.program = builder.build(
      std::make_shared<solver::LinearFunction>(std::move(objective), 0.0));
  return out;
}

}  // namespace bwalloc::programs
