#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double capacity(double p, double w, double h) {
  if (p <= 0.0 || w <= 0.0) return 0.0;
  return w * std::log(1.0 + h * p / w);
}

double min_bandwidth(double p, double h, double c) {
  if (p <= c / h) return kInf;
  double lo = 1e-12, hi = 1.0;
  while (capacity(p, hi, h) < c) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    double const mid = 0.5 * (lo + hi);
    if (capacity(p, mid, h) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double inv_min_bandwidth(double w, double h, double c) {
  return (std::exp(c / w) - 1.0) * w / h;
}

double grid_min_bandwidth(const std::vector<UserHC>& users, double budget,
                          double step) {
  auto table = [&](const UserHC& u, double s, double origin, std::size_t count) {
    std::vector<double> f(count);
    for (std::size_t k = 0; k < count; ++k) {
      f[k] = min_bandwidth(origin + s * static_cast<double>(k), u.h, u.c);
    }
    return f;
  };
  if (users.size() == 1) return min_bandwidth(budget, users[0].h, users[0].c);
  if (users.size() == 2) {
    auto const count = static_cast<std::size_t>(std::floor(budget / step));
    auto const a = table(users[0], step, 0.0, count + 1);
    double best = kInf;
    for (std::size_t k = 0; k <= count; ++k) {
      double const p1 = step * static_cast<double>(k);
      best = std::min(best, a[k] + min_bandwidth(budget - p1, users[1].h, users[1].c));
    }
    return best;
  }
  // Three users: coarse grid with 10x the step, then the fine step around
  // the coarse optimum.
  double const coarse = 10.0 * step;
  auto const count = static_cast<std::size_t>(std::floor(budget / coarse));
  auto const f0 = table(users[0], coarse, 0.0, count + 1);
  auto const f1 = table(users[1], coarse, 0.0, count + 1);
  double best = kInf, best_p0 = 0.0, best_p1 = 0.0;
  for (std::size_t a = 0; a <= count; ++a) {
    if (!std::isfinite(f0[a])) continue;
    for (std::size_t b = 0; a + b <= count; ++b) {
      if (!std::isfinite(f1[b])) continue;
      double const p0 = coarse * static_cast<double>(a);
      double const p1 = coarse * static_cast<double>(b);
      double const v = f0[a] + f1[b] + min_bandwidth(budget - p0 - p1, users[2].h, users[2].c);
      if (v < best) {
        best = v;
        best_p0 = p0;
        best_p1 = p1;
      }
    }
  }
  int const span = 30;
  for (int a = -span; a <= span; ++a) {
    for (int b = -span; b <= span; ++b) {
      double const p0 = best_p0 + step * a;
      double const p1 = best_p1 + step * b;
      double const p2 = budget - p0 - p1;
      if (p0 <= 0.0 || p1 <= 0.0 || p2 <= 0.0) continue;
      best = std::min(best, min_bandwidth(p0, users[0].h, users[0].c) +
                                min_bandwidth(p1, users[1].h, users[1].c) +
                                min_bandwidth(p2, users[2].h, users[2].c));
    }
  }
  return best;
}

double grid_power_min(const UserHC& a, const UserHC& b, double bandwidth,
                      double budget) {
  auto power = [&](double w1) {
    double const p = inv_min_bandwidth(w1, a.h, a.c) +
                     inv_min_bandwidth(bandwidth - w1, b.h, b.c);
    return p <= budget ? p : kInf;
  };
  double lo = 0.0, hi = bandwidth;
  double best = kInf, best_w = 0.5 * bandwidth;
  for (int round = 0; round < 6; ++round) {
    int const points = 2000;
    double const step = (hi - lo) / points;
    for (int k = 1; k < points; ++k) {
      double const w1 = lo + step * k;
      double const v = power(w1);
      if (v < best) {
        best = v;
        best_w = w1;
      }
    }
    lo = std::max(0.0, best_w - 2.0 * step);
    hi = std::min(bandwidth, best_w + 2.0 * step);
  }
  return best;
}

double grid_sum_capacity(double h1, double h2, double budget, double bandwidth) {
  auto value = [&](double p1, double w1) {
    return capacity(p1, w1, h1) + capacity(budget - p1, bandwidth - w1, h2);
  };
  double p_lo = 0.0, p_hi = budget, w_lo = 0.0, w_hi = bandwidth;
  double best = -kInf, bp = 0.0, bw = 0.0;
  for (int round = 0; round < 6; ++round) {
    double const dp = (p_hi - p_lo) / 200.0, dw = (w_hi - w_lo) / 200.0;
    for (int i = 0; i <= 200; ++i) {
      for (int j = 0; j <= 200; ++j) {
        double const p1 = p_lo + dp * i, w1 = w_lo + dw * j;
        double const v = value(p1, w1);
        if (v > best) {
          best = v;
          bp = p1;
          bw = w1;
        }
      }
    }
    p_lo = std::max(0.0, bp - 2.0 * dp);
    p_hi = std::min(budget, bp + 2.0 * dp);
    w_lo = std::max(0.0, bw - 2.0 * dw);
    w_hi = std::min(bandwidth, bw + 2.0 * dw);
  }
  return best;
}

double grid_relay_sum_capacity(double h1_sr, double h1_rd, double h2_sr,
                               double h2_rd, double source_budget,
                               double relay_budget, double bandwidth) {
  // x = (source power share, phase-1 bandwidth share, relay power share,
  // phase-2 bandwidth share) of user 1; user 2 gets the rest.
  auto value = [&](const std::array<double, 4>& x) {
    double const ps = source_budget * x[0], ws = bandwidth * x[1];
    double const pr = relay_budget * x[2], wr = bandwidth * x[3];
    double const u1 = std::min(capacity(ps, ws, h1_sr), capacity(pr, wr, h1_rd));
    double const u2 = std::min(capacity(source_budget - ps, bandwidth - ws, h2_sr),
                               capacity(relay_budget - pr, bandwidth - wr, h2_rd));
    return u1 + u2;
  };
  int const points = 21;
  std::array<double, 4> best_x{};
  double best = -kInf;
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b)
      for (int c = 0; c < points; ++c)
        for (int d = 0; d < points; ++d) {
          std::array<double, 4> const x{a / 20.0, b / 20.0, c / 20.0, d / 20.0};
          double const v = value(x);
          if (v > best) {
            best = v;
            best_x = x;
          }
        }
  // Compass search, including diagonal moves so the coupled min() terms can
  // be followed.
  double step = 0.05;
  while (step > 1e-9) {
    bool improved = false;
    for (int mask = 1; mask < 81; ++mask) {
      std::array<double, 4> x = best_x;
      int code = mask;
      for (int k = 0; k < 4; ++k) {
        x[k] = std::clamp(x[k] + step * ((code % 3) - 1), 0.0, 1.0);
        code /= 3;
      }
      double const v = value(x);
      if (v > best + 1e-15) {
        best = v;
        best_x = x;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

SignScan scan_sign(const UserHC& i, const UserHC& j, double lo, double hi,
                   int samples) {
  SignScan scan;
  int previous = 0;
  for (int k = 1; k <= samples; ++k) {
    double const p = lo + (hi - lo) * k / (samples + 1.0);
    double const diff = min_bandwidth(p, i.h, i.c) - min_bandwidth(p, j.h, j.c);
    int const sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (scan.first_sign == 0) scan.first_sign = sign;
    if (previous != 0 && sign != previous) {
      ++scan.changes;
      scan.crossing = p;
    }
    previous = sign;
  }
  return scan;
}

}  // namespace oracle
