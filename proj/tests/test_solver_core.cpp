#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "bwalloc/errors.hpp"
#include "bwalloc/programs.hpp"
#include "bwalloc/solver_core.hpp"
#include "oracles.hpp"

namespace {

using namespace bwalloc;
using solver::Matrix;
using solver::Vector;

// minimize sum (x_i - 1)^2 s.t. x_i <= 10.
solver::ConvexProgram quadratic(int n) {
  solver::ConvexProgram p;
  p.variables = n;
  p.objective = std::make_shared<solver::CallbackFunction>(
      [](const Vector& x) { return (x.array() - 1.0).square().sum(); },
      [](const Vector& x) -> Vector { return 2.0 * (x.array() - 1.0); },
      [n](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(n, n); });
  for (int i = 0; i < n; ++i) {
    p.inequalities.push_back(std::make_shared<solver::LinearFunction>(
        std::vector<std::pair<int, double>>{{i, 1.0}}, -10.0));
  }
  p.start = Vector::Constant(n, 5.0);
  return p;
}

Hop single_source(std::vector<double> gains, double budget, double bandwidth) {
  Hop hop;
  hop.budgets = {budget};
  hop.transmitter_of.assign(gains.size(), 0);
  hop.gains = std::move(gains);
  hop.total_bandwidth = bandwidth;
  return hop;
}

TEST(Solve, QuadraticInterior) {
  auto const r = solver::solve(quadratic(3));
  EXPECT_EQ(r.status, solver::SolverStatus::kConverged);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.x[i], 1.0, 1e-7);
  EXPECT_LE(r.duality_gap, 1e-8);
}

TEST(Solve, ActiveConstraintAndEquality) {
  // minimize (x0 - 3)^2 + (x1 - 3)^2 s.t. x0 <= 0.5, x0 + x1 = 2.
  solver::ConvexProgram p;
  p.variables = 2;
  p.objective = std::make_shared<solver::CallbackFunction>(
      [](const Vector& x) { return (x.array() - 3.0).square().sum(); },
      [](const Vector& x) -> Vector { return 2.0 * (x.array() - 3.0); },
      [](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(2, 2); });
  p.inequalities.push_back(std::make_shared<solver::LinearFunction>(
      std::vector<std::pair<int, double>>{{0, 1.0}}, -0.5));
  p.equality_matrix = Matrix::Ones(1, 2);
  p.equality_rhs = Vector::Constant(1, 2.0);
  p.start = Vector(2);
  p.start << 0.0, 2.0;
  auto const r = solver::solve(p);
  EXPECT_EQ(r.status, solver::SolverStatus::kConverged);
  EXPECT_NEAR(r.x[0], 0.5, 1e-7);
  EXPECT_NEAR(r.x[1], 1.5, 1e-7);
  EXPECT_NEAR(r.x[0] + r.x[1], 2.0, 1e-12);
}

TEST(Solve, RejectsStartOffTheEqualities) {
  auto p = quadratic(2);
  p.equality_matrix = solver::Matrix::Ones(1, 2);
  p.equality_rhs = Vector::Constant(1, 3.0);
  EXPECT_THROW(solver::solve(p), SolverError);
}

TEST(Solve, RejectsInfeasibleStart) {
  auto p = quadratic(2);
  p.start = Vector::Constant(2, 10.0);
  EXPECT_THROW(solver::solve(p), SolverError);
}

TEST(Solve, SingleUserSumCapacityUsesEverything) {
  auto const program = programs::sum_capacity_program(single_source({3.0}, 20.0, 10.0));
  auto const r = solver::solve(program.program);
  EXPECT_EQ(r.status, solver::SolverStatus::kConverged);
  double const expect = 10.0 * std::log(1.0 + 3.0 * 20.0 / 10.0);
  EXPECT_NEAR(-r.objective, expect, 1e-5 * expect);
}

TEST(Solve, TwoUserSumCapacityMatchesGrid) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> h(0.05, 5.0), p(1.0, 30.0), w(1.0, 20.0);
  for (int k = 0; k < 5; ++k) {
    double const h1 = h(rng), h2 = h(rng), budget = p(rng), band = w(rng);
    auto const program = programs::sum_capacity_program(single_source({h1, h2}, budget, band));
    auto const r = solver::solve(program.program);
    double const grid = oracle::grid_sum_capacity(h1, h2, budget, band);
    EXPECT_NEAR(-r.objective, grid, 1e-3 * grid) << k;
  }
}

TEST(Solve, BarrierPathIsMonotone) {
  auto const program = programs::sum_capacity_program(single_source({4.0, 2.0, 1.0}, 20.0, 10.0));
  auto const r = solver::solve(program.program);
  ASSERT_GE(r.outer_objectives.size(), 2u);
  for (std::size_t k = 1; k < r.outer_objectives.size(); ++k) {
    EXPECT_LE(r.outer_objectives[k], r.outer_objectives[k - 1] + 1e-12);
  }
  for (const auto& g : program.program.inequalities) EXPECT_LT(g->value(r.x), 0.0);
}

TEST(Solve, Deterministic) {
  auto const program = programs::sum_capacity_program(single_source({4.0, 2.0, 1.0}, 20.0, 10.0));
  auto const a = solver::solve(program.program);
  auto const b = solver::solve(program.program);
  ASSERT_EQ(a.x.size(), b.x.size());
  EXPECT_EQ(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * a.x.size()), 0);
  EXPECT_EQ(a.newton_iterations, b.newton_iterations);
}

TEST(GradientCheck, QuadraticIsExact) {
  auto const p = quadratic(3);
  Vector x(3);
  x << 0.3, -2.0, 4.0;
  EXPECT_LE(solver::gradient_check(p, x), 1e-9);
}

TEST(GradientCheck, CapacityConstraint) {
  solver::ConvexProgram p;
  p.variables = 2;
  p.objective = std::make_shared<solver::LinearFunction>(
      std::vector<std::pair<int, double>>{{0, 1.0}}, 0.0);
  programs::CapacityBound::Spec spec;
  spec.power = 0;
  spec.bandwidth = 1;
  spec.threshold = 0.5;
  spec.gain = 3.0;
  p.inequalities.push_back(std::make_shared<programs::CapacityBound>(spec));
  Vector x(2);
  x << 2.0, 1.0;
  EXPECT_LE(solver::gradient_check(p, x), 1e-6);
}

TEST(GradientCheck, RelayEpigraphProgram) {
  Hop first = single_source({2.0, 1.5, 0.7}, 20.0, 10.0);
  first.budgets = {20.0, 20.0};
  first.transmitter_of = {0, 1, 1};
  Hop second = single_source({0.9, 3.0, 1.1}, 40.0, 10.0);
  std::vector<std::size_t> const active{0, 1, 2};
  auto const program = programs::relay_sum_capacity_program(first, second, active);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  Vector x = program.program.start;
  for (int i = 0; i < x.size(); ++i) x[i] *= jitter(rng);
  EXPECT_LE(solver::gradient_check(program.program, x), 1e-5);
}

}  // namespace
