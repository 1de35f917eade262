#pragma once

#include <cmath>
#include <utility>

namespace bwalloc::numerics {

/// Root of an increasing function on a bracket [lo, hi] with f(lo) <= 0 <=
/// f(hi). `f` returns {value, derivative}. Newton steps are taken while they
/// stay inside the shrinking bracket; otherwise the bracket is bisected
/// (geometrically when it spans more than a factor of four on the positive
/// axis). Stops when the step or the bracket is within `rel_tol` of the
/// iterate. Deterministic: the same inputs always take the same path.
template <class Function>
double solve_increasing(Function&& f, double lo, double hi, double rel_tol,
                        int max_iterations = 400) {
  auto split = [](double a, double b) {
    if (a > 0.0 && b > 4.0 * a) return std::sqrt(a) * std::sqrt(b);
    return 0.5 * (a + b);
  };
  double x = split(lo, hi);
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    auto [value, slope] = f(x);
    if (value == 0.0) return x;
    if (value < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - value / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi) || !std::isfinite(next)) {
      next = split(lo, hi);
    }
    double const scale = std::abs(next);
    if (std::abs(next - x) <= rel_tol * scale || hi - lo <= rel_tol * scale) {
      return next;
    }
    x = next;
  }
  return x;
}

/// Largest x in [lo, hi] (to relative width `rel_tol`) for which the
/// monotone predicate holds, given feasible(lo) is true. Returns lo when the
/// predicate fails everywhere above it.
template <class Predicate>
double bisect_last_true(Predicate&& feasible, double lo, double hi,
                        double rel_tol, int max_iterations = 200) {
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    if (hi - lo <= rel_tol * std::abs(hi)) break;
    double const mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace bwalloc::numerics
