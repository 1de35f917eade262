#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bwalloc::solver {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A twice-differentiable function of the full variable vector. Gradients
/// are written (overwriting `out`, already sized); Hessians are accumulated
/// as `hessian += scale * H(x)` so sparse terms only touch their block.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual double value(const Vector& x) const = 0;
  virtual void gradient(const Vector& x, Vector& out) const = 0;
  virtual void add_hessian(const Vector& x, double scale,
                           Matrix& hessian) const = 0;
};

using FunctionPtr = std::shared_ptr<const SmoothFunction>;

/// sum_k coefficient_k * x[index_k] + constant.
class LinearFunction final : public SmoothFunction {
 public:
  LinearFunction(std::vector<std::pair<int, double>> terms, double constant)
      : terms_(std::move(terms)), constant_(constant) {}

  double value(const Vector& x) const override;
  void gradient(const Vector& x, Vector& out) const override;
  void add_hessian(const Vector&, double, Matrix&) const override {}

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_;
};

/// Wraps three callables; convenient for tests and one-off programs.
class CallbackFunction final : public SmoothFunction {
 public:
  CallbackFunction(std::function<double(const Vector&)> value,
                   std::function<Vector(const Vector&)> gradient,
                   std::function<Matrix(const Vector&)> hessian)
      : value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)) {}

  double value(const Vector& x) const override { return value_(x); }
  void gradient(const Vector& x, Vector& out) const override {
    out = gradient_(x);
  }
  void add_hessian(const Vector& x, double scale,
                   Matrix& hessian) const override {
    hessian += scale * hessian_(x);
  }

 private:
  std::function<double(const Vector&)> value_;
  std::function<Vector(const Vector&)> gradient_;
  std::function<Matrix(const Vector&)> hessian_;
};

/// minimize objective(x) s.t. g_k(x) <= 0, A x = b. The objective and every
/// g_k must be convex (caller contract); `start` must satisfy every
/// inequality strictly and the equalities exactly.
struct ConvexProgram {
  int variables = 0;
  FunctionPtr objective;
  std::vector<FunctionPtr> inequalities;
  Matrix equality_matrix;  // 0 rows when there are no equalities
  Vector equality_rhs;
  Vector start;
};

struct SolverConfig {
  double initial_t = 1.0;
  double t_growth = 10.0;
  double tolerance = 1e-8;  // on the m/t duality-gap bound
  int max_outer_iterations = 60;
  int max_newton_iterations = 200;
  double newton_tolerance = 1e-12;  // on half the squared Newton decrement
  double armijo = 0.01;
  double backtrack = 0.5;
};

enum class SolverStatus { kConverged, kMaxIterations, kNumericalFailure };

struct SolverResult {
  Vector x;
  double objective = 0.0;
  double duality_gap = 0.0;
  int outer_iterations = 0;
  int newton_iterations = 0;
  SolverStatus status = SolverStatus::kConverged;
  std::vector<double> outer_objectives;  // objective after each centering
};

/// Log-barrier interior-point method: centering by damped Newton (in the
/// null space of the equality constraints) with backtracking that keeps iterates
/// strictly feasible, then t *= t_growth until m/t <= tolerance. A Newton
/// matrix that fails to factor is regularized with eps*I, escalating up to
/// three times before the solve reports kNumericalFailure.
///
/// Throws SolverError when the start is not strictly feasible or violates
/// the equalities.
SolverResult solve(const ConvexProgram& program, const SolverConfig& config = {});

/// Largest relative error between analytic and central-difference first and
/// second derivatives, over the objective and every inequality, at `point`.
/// Each function's error is scaled by max(1, |analytic|_inf).
double gradient_check(const ConvexProgram& program, const Vector& point,
                      double step = 1e-5);

}  // namespace bwalloc::solver
