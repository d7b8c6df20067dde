#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "grazing/vec3.hpp"

namespace grazing {

// Post-collision velocities:
//   v'  = (v + v*)/2 + (|v - v*|/2) sigma
//   v'* = (v + v*)/2 - (|v - v*|/2) sigma
// Momentum and kinetic energy are conserved identically.
inline std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& v_star, const Vec3& sigma) {
  Vec3 mid = (v + v_star) * 0.5;
  double half_u = 0.5 * norm(v - v_star);
  return {mid + sigma * half_u, mid - sigma * half_u};
}

// Velocity jump split h = v' - v = h1 + h2 with h1 parallel to u = v - v*
// and h2 perpendicular:
//   h1 = -u sin^2(theta/2),  h2 = |u| sin(theta/2) cos(theta/2) w,  w _|_ u.
struct HDecomposition {
  Vec3 h1{}, h2{};
  double theta = 0.0;
};

inline HDecomposition h_decompose(const Vec3& u, const Vec3& sigma) {
  double un = norm(u);
  if (un == 0.0) throw std::domain_error("h_decompose: |u| = 0 is degenerate");
  Vec3 uhat = u / un;
  double c = std::max(-1.0, std::min(1.0, dot(uhat, sigma)));
  double theta = std::acos(c);
  HDecomposition d;
  d.theta = theta;
  double s2 = std::sin(0.5 * theta);
  d.h1 = uhat * (-un * s2 * s2);
  Vec3 perp = sigma - uhat * c;  // sin(theta) * w
  d.h2 = perp * (0.5 * un);
  return d;
}

// Jacobian of d sigma -> d h2 at |h2| = r:  4/|u|^2 (1 - 4 r^2/|u|^2)^(-1/2).
inline double jacobian_sigma_to_h2(const Vec3& u, double r) {
  double un = norm(u);
  if (!(r >= 0.0 && r < 0.5 * un))
    throw std::domain_error("jacobian_sigma_to_h2: need 0 <= r < |u|/2");
  double q = 1.0 - 4.0 * r * r / (un * un);
  return 4.0 / (un * un) / std::sqrt(q);
}

}  // namespace grazing
