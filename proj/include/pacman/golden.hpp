// Scalar minimization: golden-section search inside a bracket, optionally
// seeded from a log-spaced grid scan.
#pragma once

#include <cmath>
#include <utility>

namespace pacman {

struct MinimizeResult {
  double x = 0.0;
  double value = 0.0;
  bool at_upper_boundary = false;
};

// Golden-section search on (lo, hi); assumes f is unimodal on the bracket.
template <typename F>
MinimizeResult golden_section_min(F&& f, double lo, double hi, double tol = 1e-10,
                                  int max_iter = 300) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol * (std::abs(x1) + std::abs(x2) + 1e-30);
       ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? MinimizeResult{x1, f1, false} : MinimizeResult{x2, f2, false};
}

// Seeds golden-section from a log-spaced scan of (lo, hi]; requires lo > 0.
// Flags the result when the minimum sits on the upper boundary.
template <typename F>
MinimizeResult minimize_log_grid(F&& f, double lo, double hi, int grid_points = 64,
                                 double tol = 1e-10) {
  const double llo = std::log(lo), lhi = std::log(hi);
  double best_x = lo, best_f = f(lo);
  int best_i = 0;
  for (int i = 1; i < grid_points; ++i) {
    const double x = std::exp(llo + (lhi - llo) * i / (grid_points - 1));
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
      best_i = i;
    }
  }
  const double bracket_lo =
      best_i == 0 ? lo : std::exp(llo + (lhi - llo) * (best_i - 1) / (grid_points - 1));
  const double bracket_hi =
      best_i == grid_points - 1
          ? hi
          : std::exp(llo + (lhi - llo) * (best_i + 1) / (grid_points - 1));
  MinimizeResult refined = golden_section_min(f, bracket_lo, bracket_hi, tol);
  if (best_f < refined.value) refined = {best_x, best_f, false};
  refined.at_upper_boundary = refined.x >= hi * (1.0 - 1e-9);
  return refined;
}

}  // namespace pacman
