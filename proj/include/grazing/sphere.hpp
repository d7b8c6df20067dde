#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grazing/kernel.hpp"
#include "grazing/vec3.hpp"

namespace grazing {

struct SigmaNode {
  Vec3 sigma{};
  double weight = 0.0;
  double theta = 0.0;
};

// 1D polar rule: theta cells graded toward theta_min, node at the cell's theta
// midpoint, weight = cos(left) - cos(right). Cell weights are exact for the
// sin(theta) d theta measure, so the total weight telescopes to
// cos(theta_min) - cos(theta_max) regardless of resolution.
struct PolarRule {
  std::vector<double> theta, weight;

  static PolarRule graded(double theta_min, double theta_max, int n_theta, double grading) {
    if (!(theta_min >= 0.0 && theta_min < theta_max && theta_max <= kPi / 2.0 + 1e-15))
      throw std::invalid_argument("PolarRule: need 0 <= theta_min < theta_max <= pi/2");
    if (n_theta < 1) throw std::invalid_argument("PolarRule: n_theta >= 1");
    PolarRule r;
    r.theta.resize(n_theta);
    r.weight.resize(n_theta);
    double prev = theta_min;
    for (int j = 1; j <= n_theta; ++j) {
      double edge = theta_min + (theta_max - theta_min) *
                                    std::pow(static_cast<double>(j) / n_theta, grading);
      r.theta[j - 1] = 0.5 * (prev + edge);
      r.weight[j - 1] = std::cos(prev) - std::cos(edge);
      prev = edge;
    }
    return r;
  }
};

struct SphereQuadrature {
  std::vector<SigmaNode> nodes;
  int n_theta = 0, n_phi = 0;
  double grading = 1.0;
  double theta_min = 0.0, theta_max = kPi / 2.0;
};

// Product theta x phi mesh on the polar cap [theta_min, theta_max] around
// k_dir; phi nodes equi-weighted midpoints. Sum of weights equals
// 2 pi (cos theta_min - cos theta_max) exactly.
inline SphereQuadrature build_sphere_quadrature(const Vec3& k_dir, int n_theta, int n_phi,
                                                double theta_min = 0.0,
                                                double theta_max = kPi / 2.0,
                                                double grading = 1.0) {
  if (n_phi < 1) throw std::invalid_argument("build_sphere_quadrature: n_phi >= 1");
  PolarRule polar = PolarRule::graded(theta_min, theta_max, n_theta, grading);
  Vec3 k = normalized(k_dir), e1, e2;
  orthonormal_frame(k, e1, e2);
  SphereQuadrature q;
  q.n_theta = n_theta;
  q.n_phi = n_phi;
  q.grading = grading;
  q.theta_min = theta_min;
  q.theta_max = theta_max;
  q.nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  double wphi = 2.0 * kPi / n_phi;
  for (int t = 0; t < n_theta; ++t) {
    double ct = std::cos(polar.theta[t]), st = std::sin(polar.theta[t]);
    for (int p = 0; p < n_phi; ++p) {
      double phi = (p + 0.5) * 2.0 * kPi / n_phi;
      Vec3 s = k * ct + (e1 * std::cos(phi) + e2 * std::sin(phi)) * st;
      q.nodes.push_back({s, polar.weight[t] * wphi, polar.theta[t]});
    }
  }
  return q;
}

template <class F>
double integrate_sphere(const SphereQuadrature& q, F&& f) {
  double s = 0.0;
  for (const auto& node : q.nodes) s += node.weight * f(node);
  return s;
}

}  // namespace grazing
