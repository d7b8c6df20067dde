#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "grazing/grid.hpp"
#include "grazing/kernel.hpp"
#include "grazing/parallel.hpp"
#include "grazing/sphere.hpp"
#include "grazing/vec3.hpp"

namespace grazing {

// Shared engine for the double collision integrals
//   sum_{v_*} sum_{sigma} w B(|v - v_*|, theta) G(f(v), f(v_*), f(v'), f(v'_*))
// evaluated for every lattice node v. Pairs are enumerated as v and
// v_* = v - u with u on the difference lattice; only a lexicographic half of
// the u values is visited and each node contributes to both orientations of
// the pair (the mirrored sigma node belongs to the rule built for -u, so the
// fold is exact, not an approximation).
//
// Work is split into kSweepChunks fixed u-ranges with chunk-local output
// buffers merged in chunk order, so results are identical for any worker
// count.

struct NodeVals {
  double wB;            // quadrature weight x kernel x cell volume (one v_*-integral)
  double fv, fvu;       // primary field at v and v - u
  double fpA, fpB;      // primary field at v' and v'_* (trilinear)
  double Fv, Fvu;       // secondary field at v and v - u (if present)
  double FpA, FpB;      // secondary field at v' and v'_* (if present)
  size_t iv, ivu;       // linear indices of v and v - u
};

struct SweepRule {
  std::vector<double> theta;   // polar nodes
  std::vector<double> wtheta;  // cos-exact polar weights
  std::vector<double> btheta;  // angular kernel factor at the nodes
  int n_phi = 4;
  double gamma = 0.0;          // radial exponent |u|^gamma
};

enum class PruneMode { None, PairProduct, SphereReach, MaxValue };

struct SweepPrune {
  PruneMode mode = PruneMode::None;
  double rel = 1e-9;
};

namespace detail {

struct Stencil {
  // linear offset of corner (0,0,0) relative to the v node, per-corner adds,
  // and trilinear weights; fast path valid when all 8 corners are in the box.
  long base_lin = 0;
  int bx = 0, by = 0, bz = 0;
  double w[8] = {};
  double tx = 0, ty = 0, tz = 0;
};

inline Stencil make_stencil(double sx, double sy, double sz, int n) {
  Stencil s;
  double fx = std::floor(sx), fy = std::floor(sy), fz = std::floor(sz);
  s.bx = static_cast<int>(fx);
  s.by = static_cast<int>(fy);
  s.bz = static_cast<int>(fz);
  s.tx = sx - fx;
  s.ty = sy - fy;
  s.tz = sz - fz;
  s.base_lin = (static_cast<long>(s.bx) * n + s.by) * n + s.bz;
  double wx[2] = {1.0 - s.tx, s.tx};
  double wy[2] = {1.0 - s.ty, s.ty};
  double wz[2] = {1.0 - s.tz, s.tz};
  int c = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int d = 0; d < 2; ++d) s.w[c++] = wx[a] * wy[b] * wz[d];
  return s;
}

inline double gather_fast(const double* f, size_t iv, const Stencil& s, const long* corner) {
  const double* p = f + static_cast<long>(iv) + s.base_lin;
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) acc += s.w[c] * p[corner[c]];
  return acc;
}

// Bounds-checked gather with zero extension outside the box.
inline double gather_slow(const std::vector<double>& f, int ix, int iy, int iz, const Stencil& s,
                          int n) {
  double acc = 0.0;
  int c = 0;
  for (int a = 0; a < 2; ++a) {
    int jx = ix + s.bx + a;
    for (int b = 0; b < 2; ++b) {
      int jy = iy + s.by + b;
      for (int d = 0; d < 2; ++d, ++c) {
        int jz = iz + s.bz + d;
        if (jx < 0 || jx >= n || jy < 0 || jy >= n || jz < 0 || jz >= n) continue;
        acc += s.w[c] * f[(static_cast<size_t>(jx) * n + jy) * n + jz];
      }
    }
  }
  return acc;
}

struct PairBound {
  double ds = 0.0;
  std::vector<double> bound;  // max of env(a) env(b) over a^2 + b^2 = s

  static PairBound build(const RadialEnvelope& env, double s_max, int bins = 256) {
    PairBound pb;
    pb.ds = s_max / bins;
    pb.bound.assign(bins + 1, 0.0);
    for (int i = 0; i <= bins; ++i) {
      double s = i * pb.ds;
      double rmax = std::sqrt(s);
      double best = 0.0;
      for (int j = 0; j <= 64; ++j) {
        double a = rmax * j / 64.0;
        double b = std::sqrt(std::max(0.0, s - a * a));
        best = std::max(best, env(a) * env(b));
      }
      pb.bound[i] = best;
    }
    return pb;
  }

  double operator()(double s) const {
    size_t b = static_cast<size_t>(s / ds);
    return b < bound.size() ? bound[b] : 0.0;
  }
};

}  // namespace detail

inline constexpr int kSweepMaxScalars = 8;

template <bool HasSecond, class Op>
void pair_sphere_sweep(const VelocityGrid& g, const std::vector<double>& f,
                       const std::vector<double>* second, const SweepRule& rule,
                       const SweepPrune& prune, std::vector<double>* out_field,
                       std::span<double> out_scalars, Op&& op) {
  const int n = g.n;
  const double h = g.spacing();
  const double cell = g.cell_volume();
  const size_t nn = g.size();
  const int nd = 2 * n - 1;
  const size_t n_u = static_cast<size_t>(nd) * nd * nd;

  // squared radius per node
  std::vector<double> rsq(nn);
  for (size_t i = 0; i < nn; ++i) rsq[i] = norm2(g.node(i));

  RadialEnvelope env;
  detail::PairBound pb;
  double tau = 0.0, tau2 = 0.0;
  if (prune.mode != PruneMode::None) {
    Distribution tmp;  // envelope wants a Distribution; borrow the field
    tmp.grid = g;
    tmp.values = f;
    env = RadialEnvelope::build(tmp);
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, v);
    tau = prune.rel * fmax;
    tau2 = prune.rel * fmax * fmax;
    if (prune.mode == PruneMode::PairProduct)
      pb = detail::PairBound::build(env, 6.0 * g.v_max * g.v_max + 1.0);
  }

  // active sigma nodes: (theta index, phi index) with nonzero kernel factor
  struct SigmaDir {
    double ct, st, cp, sp;
    int t;
  };
  std::vector<SigmaDir> dirs;
  const int n_phi = rule.n_phi;
  for (size_t t = 0; t < rule.theta.size(); ++t) {
    if (rule.btheta[t] == 0.0) continue;
    for (int p = 0; p < n_phi; ++p) {
      double phi = (p + 0.5) * 2.0 * kPi / n_phi;
      dirs.push_back({std::cos(rule.theta[t]), std::sin(rule.theta[t]), std::cos(phi),
                      std::sin(phi), static_cast<int>(t)});
    }
  }
  const double wphi = 2.0 * kPi / n_phi;

  const int n_chunks = kSweepChunks;
  std::vector<std::vector<double>> chunk_fields;
  if (out_field) chunk_fields.assign(n_chunks, std::vector<double>(nn, 0.0));
  std::vector<std::array<double, kSweepMaxScalars>> chunk_scalars(
      n_chunks, std::array<double, kSweepMaxScalars>{});

  const double* fp = f.data();
  const double* Fp = second ? second->data() : nullptr;

  run_chunks(n_chunks, [&](int chunk) {
    size_t u_lo = n_u * chunk / n_chunks;
    size_t u_hi = n_u * (chunk + 1) / n_chunks;
    double* out = out_field ? chunk_fields[chunk].data() : nullptr;
    double* sc = chunk_scalars[chunk].data();
    std::vector<uint32_t> vlist;
    vlist.reserve(nn);

    for (size_t lu = u_lo; lu < u_hi; ++lu) {
      int dz = static_cast<int>(lu % nd) - (n - 1);
      int dy = static_cast<int>((lu / nd) % nd) - (n - 1);
      int dx = static_cast<int>(lu / (static_cast<size_t>(nd) * nd)) - (n - 1);
      // lexicographic half-space; u = 0 never contributes
      if (dx < 0 || (dx == 0 && (dy < 0 || (dy == 0 && dz <= 0)))) continue;

      Vec3 u{dx * h, dy * h, dz * h};
      double un2 = norm2(u);
      double un = std::sqrt(un2);
      long dlin = (static_cast<long>(dx) * n + dy) * n + dz;

      int lox = std::max(0, dx), hix = std::min(n - 1, n - 1 + dx);
      int loy = std::max(0, dy), hiy = std::min(n - 1, n - 1 + dy);
      int loz = std::max(0, dz), hiz = std::min(n - 1, n - 1 + dz);
      if (lox > hix || loy > hiy || loz > hiz) continue;

      // collect active v nodes for this u
      vlist.clear();
      for (int ix = lox; ix <= hix; ++ix) {
        for (int iy = loy; iy <= hiy; ++iy) {
          size_t row = (static_cast<size_t>(ix) * n + iy) * n;
          for (int iz = loz; iz <= hiz; ++iz) {
            size_t iv = row + iz;
            size_t ivu = iv - dlin;
            bool active = true;
            switch (prune.mode) {
              case PruneMode::None:
                break;
              case PruneMode::PairProduct: {
                double s = rsq[iv] + rsq[ivu];
                active = fp[iv] * fp[ivu] > tau2 || pb(s) > tau2;
                break;
              }
              case PruneMode::SphereReach: {
                double s = rsq[iv] + rsq[ivu];
                double mid2 = std::max(0.0, 0.5 * (s - 0.5 * un2));
                double reach = std::max(0.0, std::sqrt(mid2) - 0.5 * un);
                active = fp[ivu] > tau || fp[iv] > tau || env(reach) > tau;
                break;
              }
              case PruneMode::MaxValue:
                active = fp[iv] > tau || fp[ivu] > tau;
                break;
            }
            if (active) vlist.push_back(static_cast<uint32_t>(iv));
          }
        }
      }
      if (vlist.empty()) continue;

      Vec3 uhat = u / un, e1, e2;
      orthonormal_frame(uhat, e1, e2);
      double rgam = rule.gamma == 0.0 ? 1.0 : std::pow(un, rule.gamma);

      for (const auto& d : dirs) {
        Vec3 sigma = uhat * d.ct + (e1 * d.cp + e2 * d.sp) * d.st;
        // v' = v - (u - |u| sigma)/2, v'_* = v - (u + |u| sigma)/2
        Vec3 A = (u - sigma * un) * 0.5;
        Vec3 B = (u + sigma * un) * 0.5;
        detail::Stencil stA = detail::make_stencil(-A.x / h, -A.y / h, -A.z / h, n);
        detail::Stencil stB = detail::make_stencil(-B.x / h, -B.y / h, -B.z / h, n);
        long corner[8];
        int c = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int dd = 0; dd < 2; ++dd)
              corner[c++] = (static_cast<long>(a) * n + b) * n + dd;

        // per-axis index range where both stencils' corners stay in the box
        int fxlo = std::max({lox, -stA.bx, -stB.bx});
        int fxhi = std::min({hix, n - 2 - stA.bx, n - 2 - stB.bx});
        int fylo = std::max({loy, -stA.by, -stB.by});
        int fyhi = std::min({hiy, n - 2 - stA.by, n - 2 - stB.by});
        int fzlo = std::max({loz, -stA.bz, -stB.bz});
        int fzhi = std::min({hiz, n - 2 - stA.bz, n - 2 - stB.bz});

        double wB = rule.wtheta[d.t] * wphi * rule.btheta[d.t] * rgam * cell;

        for (uint32_t ivu32 : vlist) {
          size_t iv = ivu32;
          int iz = static_cast<int>(iv % n);
          int iy = static_cast<int>((iv / n) % n);
          int ix = static_cast<int>(iv / (static_cast<size_t>(n) * n));
          size_t ivu = iv - dlin;
          NodeVals nv;
          nv.wB = wB;
          nv.iv = iv;
          nv.ivu = ivu;
          nv.fv = fp[iv];
          nv.fvu = fp[ivu];
          bool fast = ix >= fxlo && ix <= fxhi && iy >= fylo && iy <= fyhi && iz >= fzlo &&
                      iz <= fzhi;
          if (fast) {
            nv.fpA = detail::gather_fast(fp, iv, stA, corner);
            nv.fpB = detail::gather_fast(fp, iv, stB, corner);
          } else {
            nv.fpA = detail::gather_slow(f, ix, iy, iz, stA, n);
            nv.fpB = detail::gather_slow(f, ix, iy, iz, stB, n);
          }
          if constexpr (HasSecond) {
            nv.Fv = Fp[iv];
            nv.Fvu = Fp[ivu];
            if (fast) {
              nv.FpA = detail::gather_fast(Fp, iv, stA, corner);
              nv.FpB = detail::gather_fast(Fp, iv, stB, corner);
            } else {
              nv.FpA = detail::gather_slow(*second, ix, iy, iz, stA, n);
              nv.FpB = detail::gather_slow(*second, ix, iy, iz, stB, n);
            }
          }
          op(nv, out, sc);
        }
      }
    }
  });

  if (out_field) {
    for (size_t i = 0; i < nn; ++i) {
      double s = 0.0;
      for (int c = 0; c < n_chunks; ++c) s += chunk_fields[c][i];
      (*out_field)[i] += s;
    }
  }
  for (size_t j = 0; j < out_scalars.size() && j < kSweepMaxScalars; ++j) {
    double s = 0.0;
    for (int c = 0; c < n_chunks; ++c) s += chunk_scalars[c][j];
    out_scalars[j] += s;
  }
}

// Polar rule for sweeps over the kernel mode's angular support.
inline SweepRule make_sweep_rule(const KernelSpec& spec, const KernelMode& mode, int n_theta,
                                 int n_phi) {
  double lo = 1e-7, hi = kPi / 2.0;
  double grading = 2.0 / (1.0 - spec.nu);
  if (mode.mode == BMode::Truncated || mode.mode == BMode::SplitNear) lo = theta_zero(mode.n);
  if (mode.mode == BMode::SplitFar || mode.mode == BMode::Capped)
    lo = std::max(lo, 1.0 / (mode.mode == BMode::SplitFar ? mode.k : mode.cap));
  if (mode.mode == BMode::SplitNear) hi = std::min(hi, 1.0 / mode.k);
  SweepRule rule;
  rule.gamma = spec.gamma;
  rule.n_phi = n_phi;
  if (lo >= hi) return rule;  // empty support
  PolarRule polar = PolarRule::graded(lo, hi, n_theta, grading);
  rule.theta = polar.theta;
  rule.wtheta = polar.weight;
  rule.btheta.resize(rule.theta.size());
  for (size_t t = 0; t < rule.theta.size(); ++t)
    rule.btheta[t] = angular_factor(spec, mode, rule.theta[t]);
  return rule;
}

}  // namespace grazing
