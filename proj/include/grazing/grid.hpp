#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grazing/parallel.hpp"
#include "grazing/vec3.hpp"

namespace grazing {

// Uniform cell-centered velocity lattice on [-v_max, v_max]^3, symmetric
// about the origin. Node i carries v_i = -v_max + (i + 1/2) spacing.
struct VelocityGrid {
  double v_max = 6.0;
  int n = 24;

  VelocityGrid() = default;
  VelocityGrid(double v_max_, int n_) : v_max(v_max_), n(n_) {
    if (n < 8) throw std::invalid_argument("VelocityGrid: n_per_axis >= 8 required");
    if (!(v_max > 0.0)) throw std::invalid_argument("VelocityGrid: v_max > 0 required");
  }

  double spacing() const { return 2.0 * v_max / n; }
  double cell_volume() const {
    double h = spacing();
    return h * h * h;
  }
  size_t size() const { return static_cast<size_t>(n) * n * n; }

  double coord(int i) const { return -v_max + (i + 0.5) * spacing(); }
  Vec3 node(int ix, int iy, int iz) const { return {coord(ix), coord(iy), coord(iz)}; }
  size_t index(int ix, int iy, int iz) const {
    return (static_cast<size_t>(ix) * n + iy) * n + iz;
  }
  Vec3 node(size_t idx) const {
    int iz = static_cast<int>(idx % n);
    int iy = static_cast<int>((idx / n) % n);
    int ix = static_cast<int>(idx / (static_cast<size_t>(n) * n));
    return node(ix, iy, iz);
  }

  bool operator==(const VelocityGrid& o) const { return v_max == o.v_max && n == o.n; }
};

// Non-negative density sampled on the lattice.
struct Distribution {
  VelocityGrid grid;
  std::vector<double> values;

  Distribution() = default;
  explicit Distribution(const VelocityGrid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& at(int ix, int iy, int iz) { return values[grid.index(ix, iy, iz)]; }
  double at(int ix, int iy, int iz) const { return values[grid.index(ix, iy, iz)]; }

  void validate() const {
    for (double v : values)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("Distribution: values must be finite and >= 0");
  }

  double mass() const {
    return grid.cell_volume() *
           pairwise_sum(values.size(), [&](size_t i) { return values[i]; });
  }

  double max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }

  template <class Fn>
  void fill(Fn&& fn) {
    for (int ix = 0; ix < grid.n; ++ix)
      for (int iy = 0; iy < grid.n; ++iy)
        for (int iz = 0; iz < grid.n; ++iz) values[grid.index(ix, iy, iz)] = fn(grid.node(ix, iy, iz));
  }
};

// Trilinear sample of a grid field at an arbitrary point; zero outside the
// box (compact-support extension).
inline double sample_trilinear(const VelocityGrid& g, const std::vector<double>& f, const Vec3& p) {
  double h = g.spacing();
  double fx = (p.x + g.v_max) / h - 0.5;
  double fy = (p.y + g.v_max) / h - 0.5;
  double fz = (p.z + g.v_max) / h - 0.5;
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  int iz = static_cast<int>(std::floor(fz));
  double tx = fx - ix, ty = fy - iy, tz = fz - iz;
  double acc = 0.0;
  for (int cx = 0; cx < 2; ++cx) {
    int jx = ix + cx;
    if (jx < 0 || jx >= g.n) continue;
    double wx = cx ? tx : 1.0 - tx;
    for (int cy = 0; cy < 2; ++cy) {
      int jy = iy + cy;
      if (jy < 0 || jy >= g.n) continue;
      double wy = cy ? ty : 1.0 - ty;
      for (int cz = 0; cz < 2; ++cz) {
        int jz = iz + cz;
        if (jz < 0 || jz >= g.n) continue;
        double wz = cz ? tz : 1.0 - tz;
        acc += wx * wy * wz * f[g.index(jx, jy, jz)];
      }
    }
  }
  return acc;
}

// Radial envelope: env(r) >= f(v) for all |v| >= r (non-increasing in r).
// Used by sweep pruning to bound values reachable on post-collision spheres.
struct RadialEnvelope {
  double dr = 0.0;
  std::vector<double> env;

  static RadialEnvelope build(const Distribution& f, int bins = 256) {
    RadialEnvelope e;
    double rmax = f.grid.v_max * std::sqrt(3.0) + f.grid.spacing();
    e.dr = rmax / bins;
    e.env.assign(bins + 1, 0.0);
    for (size_t i = 0; i < f.values.size(); ++i) {
      double r = norm(f.grid.node(i));
      int b = std::min(bins, static_cast<int>(r / e.dr));
      e.env[b] = std::max(e.env[b], f.values[i]);
    }
    for (int b = bins - 1; b >= 0; --b) e.env[b] = std::max(e.env[b], e.env[b + 1]);
    return e;
  }

  double operator()(double r) const {
    if (r <= 0.0) return env[0];
    size_t b = static_cast<size_t>(r / dr);
    return b < env.size() ? env[b] : 0.0;
  }
};

}  // namespace grazing
