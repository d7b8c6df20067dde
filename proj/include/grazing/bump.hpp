#pragma once

#include <cmath>

namespace grazing {

// h(t) = exp(-1/t) for t > 0, else 0; C-infinity at 0.
inline double bump_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth step g(t) = h(t) / (h(t) + h(1-t)): 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = bump_h(t);
  return a / (a + bump_h(1.0 - t));
}

// Radial cutoff: 1 on [0, 3/4], 0 on [4/3, inf), smooth and non-increasing.
inline double cutoff_bump(double r) { return smooth_step((4.0 / 3.0 - r) / (7.0 / 12.0)); }

// Generic smooth plateau cutoff: 1 for r <= r_in, 0 for r >= r_out.
inline double plateau_cutoff(double r, double r_in, double r_out) {
  return smooth_step((r_out - r) / (r_out - r_in));
}

// C-infinity radial bump supported on |r| < R, value 1 at the origin.
inline double radial_bump(double r, double R) {
  double t = r / R;
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

}  // namespace grazing
