#include "bwalloc/solver_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bwalloc/errors.hpp"

namespace bwalloc::solver {

double LinearFunction::value(const Vector& x) const {
  double sum = constant_;
  for (const auto& [index, coefficient] : terms_) sum += coefficient * x[index];
  return sum;
}

void LinearFunction::gradient(const Vector& x, Vector& out) const {
  out.setZero(x.size());
  for (const auto& [index, coefficient] : terms_) out[index] += coefficient;
}

namespace {

constexpr int kMaxRegularizations = 3;

class BarrierProblem {
 public:
  BarrierProblem(const ConvexProgram& program) : program_(program) {
    int const n = program.variables;
    gradient_.resize(n);
    hessian_.resize(n, n);
    scratch_.resize(n);
    if (program.equality_matrix.rows() > 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(program.equality_matrix.transpose());
      Matrix const q = qr.householderQ();
      null_space_ = q.rightCols(n - qr.rank());
    }
  }

  // t*f0(x) - sum log(-g_k(x)); nullopt outside the strict interior.
  std::optional<double> value(const Vector& x, double t) const {
    double sum = t * program_.objective->value(x);
    for (const auto& g : program_.inequalities) {
      double const slack = -g->value(x);
      if (!(slack > 0.0)) return std::nullopt;
      sum -= std::log(slack);
    }
    if (!std::isfinite(sum)) return std::nullopt;
    return sum;
  }

  void linearize(const Vector& x, double t) {
    program_.objective->gradient(x, scratch_);
    gradient_ = t * scratch_;
    hessian_.setZero();
    program_.objective->add_hessian(x, t, hessian_);
    for (const auto& g : program_.inequalities) {
      double const slack = -g->value(x);
      g->gradient(x, scratch_);
      gradient_ += scratch_ / slack;
      hessian_.noalias() += (scratch_ / (slack * slack)) * scratch_.transpose();
      g->add_hessian(x, 1.0 / slack, hessian_);
    }
  }

  // Newton direction; nullopt when every regularization fails. Equality
  // constraints are eliminated through a basis of the null space of A, so
  // steps from a point satisfying A x = b keep satisfying it.
  std::optional<Vector> direction() const {
    Matrix reduced;
    Vector rhs;
    if (null_space_) {
      reduced = null_space_->transpose() * hessian_ * *null_space_;
      rhs = -(null_space_->transpose() * gradient_);
    } else {
      reduced = hessian_;
      rhs = -gradient_;
    }
    if (reduced.rows() == 0) return Vector::Zero(program_.variables);
    double const scale =
        std::max(1.0, std::abs(reduced.trace()) / static_cast<double>(reduced.rows()));
    double epsilon = 0.0;
    for (int attempt = 0; attempt <= kMaxRegularizations; ++attempt) {
      Matrix h = reduced;
      if (epsilon > 0.0) h.diagonal().array() += epsilon;
      Eigen::LDLT<Matrix> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
          (ldlt.vectorD().array() > 0.0).all()) {
        Vector step = ldlt.solve(rhs);
        if (step.allFinite()) {
          return null_space_ ? Vector(*null_space_ * step) : step;
        }
      }
      epsilon = epsilon == 0.0 ? 1e-10 * scale : epsilon * 100.0;
    }
    return std::nullopt;
  }

  const Vector& gradient() const { return gradient_; }

 private:
  const ConvexProgram& program_;
  Vector gradient_;
  Matrix hessian_;
  Vector scratch_;
  std::optional<Matrix> null_space_;
};

}  // namespace

SolverResult solve(const ConvexProgram& program, const SolverConfig& config) {
  if (program.start.size() != program.variables || !program.objective) {
    throw SolverError("solve: malformed program");
  }
  for (const auto& g : program.inequalities) {
    double const v = g->value(program.start);
    if (!(v < 0.0)) throw SolverError("solve: start is not strictly feasible");
  }
  if (program.equality_matrix.rows() > 0) {
    Vector const residual = program.equality_matrix * program.start - program.equality_rhs;
    double const scale = std::max(1.0, program.equality_rhs.lpNorm<Eigen::Infinity>());
    if (!(residual.lpNorm<Eigen::Infinity>() <= 1e-9 * scale)) {
      throw SolverError("solve: start violates the equality constraints");
    }
  }

  BarrierProblem barrier(program);
  SolverResult result;
  result.x = program.start;
  double const m = static_cast<double>(program.inequalities.size());
  double t = config.initial_t;

  for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
    ++result.outer_iterations;
    for (int step = 0; step < config.max_newton_iterations; ++step) {
      barrier.linearize(result.x, t);
      auto direction = barrier.direction();
      if (!direction) {
        result.status = SolverStatus::kNumericalFailure;
        result.objective = program.objective->value(result.x);
        result.duality_gap = m / t;
        return result;
      }
      ++result.newton_iterations;
      double const slope = barrier.gradient().dot(*direction);
      if (-slope / 2.0 <= config.newton_tolerance) break;

      double const current = *barrier.value(result.x, t);
      double s = 1.0;
      bool accepted = false;
      while (s > 1e-16) {
        Vector const trial = result.x + s * *direction;
        auto const next = barrier.value(trial, t);
        if (next && *next <= current + config.armijo * s * slope) {
          result.x = trial;
          accepted = true;
          break;
        }
        s *= config.backtrack;
      }
      // Roundoff-limited: no representable descent left at this t.
      if (!accepted) break;
    }
    result.objective = program.objective->value(result.x);
    result.outer_objectives.push_back(result.objective);
    result.duality_gap = m / t;
    if (m == 0.0 || m / t <= config.tolerance) {
      result.status = SolverStatus::kConverged;
      return result;
    }
    t *= config.t_growth;
  }
  result.status = SolverStatus::kMaxIterations;
  return result;
}

double gradient_check(const ConvexProgram& program, const Vector& point,
                      double step) {
  int const n = program.variables;
  double worst = 0.0;
  auto check = [&](const SmoothFunction& f) {
    Vector analytic(n), plus(n), minus(n);
    f.gradient(point, analytic);
    Matrix hessian = Matrix::Zero(n, n);
    f.add_hessian(point, 1.0, hessian);
    Vector numeric(n);
    Matrix numeric_hessian(n, n);
    for (int i = 0; i < n; ++i) {
      Vector up = point, down = point;
      up[i] += step;
      down[i] -= step;
      numeric[i] = (f.value(up) - f.value(down)) / (2.0 * step);
      f.gradient(up, plus);
      f.gradient(down, minus);
      numeric_hessian.col(i) = (plus - minus) / (2.0 * step);
    }
    double const g_scale = std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
    double const h_scale = std::max(1.0, hessian.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (numeric - analytic).lpNorm<Eigen::Infinity>() / g_scale);
    worst = std::max(worst,
                     (numeric_hessian - hessian).lpNorm<Eigen::Infinity>() / h_scale);
  };
  check(*program.objective);
  for (const auto& g : program.inequalities) check(*g);
  return worst;
}

}  // namespace bwalloc::solver
