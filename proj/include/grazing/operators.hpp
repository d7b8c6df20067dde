#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "grazing/bump.hpp"
#include "grazing/grid.hpp"
#include "grazing/kernel.hpp"
#include "grazing/sphere.hpp"
#include "grazing/sweep.hpp"

namespace grazing {

// Renormalization beta_delta(s) = s / (1 + delta s).
struct RenormParams {
  double delta = 1.0;
  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("RenormParams: delta > 0 required");
  }
};

struct BetaValue {
  double beta, beta_prime;
};

inline BetaValue beta_and_derivative(double s, const RenormParams& p) {
  if (s < 0.0) throw std::domain_error("beta_and_derivative: s >= 0 required");
  double d = 1.0 + p.delta * s;
  return {s / d, 1.0 / (d * d)};
}

// Gamma(f, f') = beta(f') - beta(f) - beta'(f)(f' - f) <= 0 by concavity;
// in closed form -delta (f'-f)^2 / ((1+delta f)^2 (1+delta f')).
inline double Gamma_defect(double f_val, double f_prime_val, const RenormParams& p) {
  if (f_val < 0.0 || f_prime_val < 0.0) throw std::domain_error("Gamma_defect: values >= 0 required");
  double df = f_prime_val - f_val;
  double a = 1.0 + p.delta * f_val;
  double b = 1.0 + p.delta * f_prime_val;
  return -p.delta * df * df / (a * a * b);
}

// Default angular resolutions. `oracle` doubles them for refined reference runs.
struct AngularRes {
  int n_theta = 12;
  int n_phi = 6;
  AngularRes() = default;
  AngularRes(int t, int p) : n_theta(t), n_phi(p) {}
  AngularRes doubled() const { return {2 * n_theta, 2 * n_phi}; }
};

// (f * S_n)(v) = sum_* f(v_*) S_n(|v - v_*|) h^3. S_n(r) = c r^gamma exactly,
// so the kernel needs no table. For gamma < 0 the r = 0 cell uses the
// cell-averaged kernel (finite for gamma > -3).
inline std::vector<double> S_op_convolution(const Distribution& f, const KernelSpec& spec,
                                            int trunc_n = 0) {
  const VelocityGrid& g = f.grid;
  double c = cancellation_coefficient(spec, trunc_n);
  double h = g.spacing();
  double cell = g.cell_volume();
  int n = g.n;

  double self_kernel = 0.0;
  if (spec.gamma < 0.0) {
    // cell average of |z|^gamma over the cube [-h/2, h/2]^3 by midpoint subsampling
    const int m = 12;
    double acc = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int d = 0; d < m; ++d) {
          Vec3 z{(a + 0.5) / m - 0.5, (b + 0.5) / m - 0.5, (d + 0.5) / m - 0.5};
          acc += std::pow(h * norm(z), spec.gamma);
        }
    self_kernel = c * acc / (m * m * m);
  }

  // radial kernel values per difference vector, folded over +-u
  std::vector<double> out(g.size(), 0.0);
  const int nd = 2 * n - 1;
  const size_t n_u = static_cast<size_t>(nd) * nd * nd;
  std::vector<std::vector<double>> chunk_out(kSweepChunks, std::vector<double>(g.size(), 0.0));
  run_chunks(kSweepChunks, [&](int chunk) {
    size_t u_lo = n_u * chunk / kSweepChunks;
    size_t u_hi = n_u * (chunk + 1) / kSweepChunks;
    auto& buf = chunk_out[chunk];
    const double* fp = f.values.data();
    for (size_t lu = u_lo; lu < u_hi; ++lu) {
      int dz = static_cast<int>(lu % nd) - (n - 1);
      int dy = static_cast<int>((lu / nd) % nd) - (n - 1);
      int dx = static_cast<int>(lu / (static_cast<size_t>(nd) * nd)) - (n - 1);
      if (dx < 0 || (dx == 0 && (dy < 0 || (dy == 0 && dz <= 0)))) continue;
      double r = h * std::sqrt(double(dx) * dx + double(dy) * dy + double(dz) * dz);
      double ker = c * std::pow(r, spec.gamma) * cell;
      long dlin = (static_cast<long>(dx) * n + dy) * n + dz;
      int lox = std::max(0, dx), hix = std::min(n - 1, n - 1 + dx);
      int loy = std::max(0, dy), hiy = std::min(n - 1, n - 1 + dy);
      int loz = std::max(0, dz), hiz = std::min(n - 1, n - 1 + dz);
      for (int ix = lox; ix <= hix; ++ix)
        for (int iy = loy; iy <= hiy; ++iy) {
          size_t row = (static_cast<size_t>(ix) * n + iy) * n;
          for (int iz = loz; iz <= hiz; ++iz) {
            size_t iv = row + iz;
            size_t ivu = iv - dlin;
            buf[iv] += ker * fp[ivu];
            buf[ivu] += ker * fp[iv];
          }
        }
    }
  });
  for (size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c2 = 0; c2 < kSweepChunks; ++c2) s += chunk_out[c2][i];
    out[i] = s + self_kernel * cell * f.values[i];
  }
  return out;
}

// Brute-force (f * S)(v) = int int B_n (f(v'_*) - f(v_*)) dv_* dsigma; the
// independent counterpart of S_op_convolution.
inline std::vector<double> S_op_direct(const Distribution& f, const KernelSpec& spec, int trunc_n,
                                       AngularRes res = {}, double prune_rel = 1e-10) {
  SweepRule rule = make_sweep_rule(spec, KernelMode::truncated(trunc_n), res.n_theta, res.n_phi);
  std::vector<double> out(f.grid.size(), 0.0);
  SweepPrune prune{PruneMode::SphereReach, prune_rel};
  pair_sphere_sweep<false>(f.grid, f.values, nullptr, rule, prune, &out, {},
                           [](const NodeVals& nv, double* o, double*) {
                             o[nv.iv] += nv.wB * (nv.fpB - nv.fvu);
                             o[nv.ivu] += nv.wB * (nv.fpA - nv.fv);
                           });
  return out;
}

// Q_n(f,f)(v) = int int B_n (f' f'_* - f f_*) dv_* dsigma; quasilinear divides
// by (1 + mass/n).
inline std::vector<double> Q_collision(const Distribution& f, const KernelSpec& spec, int trunc_n,
                                       bool quasilinear, AngularRes res = {},
                                       double prune_rel = 1e-9) {
  if (trunc_n < 1) throw std::invalid_argument("Q_collision: truncation n >= 1 required");
  SweepRule rule = make_sweep_rule(spec, KernelMode::truncated(trunc_n), res.n_theta, res.n_phi);
  std::vector<double> out(f.grid.size(), 0.0);
  SweepPrune prune{PruneMode::PairProduct, prune_rel};
  pair_sphere_sweep<false>(f.grid, f.values, nullptr, rule, prune, &out, {},
                           [](const NodeVals& nv, double* o, double*) {
                             double gflux = nv.wB * (nv.fpA * nv.fpB - nv.fv * nv.fvu);
                             o[nv.iv] += gflux;
                             o[nv.ivu] += gflux;
                           });
  if (quasilinear) {
    double damp = 1.0 / (1.0 + f.mass() / trunc_n);
    for (double& v : out) v *= damp;
  }
  return out;
}

// Test function in a Holder class: callable, exponent, measured norm bound,
// compact support radius.
struct HolderTestFn {
  std::function<double(const Vec3&)> fn;
  double alpha = 0.5;
  double holder_norm = 0.0;
  double support_radius = 0.0;

  double operator()(const Vec3& v) const { return fn(v); }
};

// Smooth compactly supported bump with its Holder norm measured by seeded
// random sampling (sup + alpha-quotient).
inline HolderTestFn make_holder_bump(double R, double alpha, uint64_t seed = 12345,
                                     int samples = 20000) {
  HolderTestFn h;
  h.alpha = alpha;
  h.support_radius = R;
  h.fn = [R](const Vec3& v) { return radial_bump(norm(v), R); };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.2 * R, 1.2 * R);
  double sup = 1.0;  // value at the origin
  double quot = 0.0;
  for (int i = 0; i < samples; ++i) {
    Vec3 a{U(rng), U(rng), U(rng)}, b{U(rng), U(rng), U(rng)};
    double d = norm(a - b);
    if (d < 1e-12) continue;
    double q = std::fabs(h.fn(a) - h.fn(b)) / std::pow(d, alpha);
    quot = std::max(quot, q);
    sup = std::max(sup, std::fabs(h.fn(a)));
  }
  h.holder_norm = 1.02 * (sup + quot);  // small headroom over the sampled norm
  return h;
}

// (T phi)(v; v_*) = int_{S^2} B(v - v_*, sigma) (phi(v') - phi(v)) dsigma.
// Requires alpha > nu; the graded polar rule resolves the theta -> 0 density
// theta^(alpha - nu - 1).
inline double T_op(const HolderTestFn& phi, const Vec3& v_star, const Vec3& v,
                   const KernelSpec& spec, int trunc_n = 0, int n_theta = 48, int n_phi = 12) {
  if (!(phi.alpha > spec.nu))
    throw std::invalid_argument("T_op: Holder exponent must exceed nu");
  Vec3 u = v - v_star;
  double un = norm(u);
  if (un == 0.0) return 0.0;
  double lo = trunc_n > 0 ? theta_zero(trunc_n) : 1e-9;
  if (lo >= kPi / 2.0) return 0.0;
  double grading = 2.0 / (1.0 - spec.nu);
  PolarRule polar = PolarRule::graded(lo, kPi / 2.0, n_theta, grading);
  Vec3 uhat = u / un, e1, e2;
  orthonormal_frame(uhat, e1, e2);
  double rgam = std::pow(un, spec.gamma);
  double phiv = phi(v);
  Vec3 mid = (v + v_star) * 0.5;
  double acc = 0.0;
  for (size_t t = 0; t < polar.theta.size(); ++t) {
    double th = polar.theta[t];
    double b = angular_b(spec, th);
    if (trunc_n > 0) b *= truncation_factor(th, trunc_n);
    if (b == 0.0) continue;
    double ct = std::cos(th), st = std::sin(th);
    double inner = 0.0;
    for (int p = 0; p < n_phi; ++p) {
      double ph = (p + 0.5) * 2.0 * kPi / n_phi;
      Vec3 sigma = uhat * ct + (e1 * std::cos(ph) + e2 * std::sin(ph)) * st;
      Vec3 vp = mid + sigma * (0.5 * un);
      inner += phi(vp) - phiv;
    }
    acc += polar.weight[t] * (2.0 * kPi / n_phi) * b * inner;
  }
  return rgam * acc;
}

// Renormalized collision decomposition for the truncated kernel:
//   R1(v) = [f beta'(f) - beta(f)] (f * S_n)(v)
//   R3(v) = int int B_n f'_* delta (f'-f)^2 / ((1+delta f)^2 (1+delta f')) >= 0
//   R2    = pairing value  sum f_* beta(f) (T phi)(v; v_*)  (needs phi)
struct RDecomposition {
  std::vector<double> R1;
  std::vector<double> R3;
  std::optional<double> R2;
};

inline std::vector<double> R3_field(const Distribution& f, const KernelSpec& spec, int trunc_n,
                                    const RenormParams& params, AngularRes res = {},
                                    double prune_rel = 1e-10) {
  SweepRule rule = make_sweep_rule(spec, KernelMode::truncated(trunc_n), res.n_theta, res.n_phi);
  std::vector<double> out(f.grid.size(), 0.0);
  SweepPrune prune{PruneMode::PairProduct, prune_rel};
  double delta = params.delta;
  pair_sphere_sweep<false>(f.grid, f.values, nullptr, rule, prune, &out, {},
                           [delta](const NodeVals& nv, double* o, double*) {
                             double d1 = nv.fpA - nv.fv;
                             double a1 = 1.0 + delta * nv.fv;
                             double o1 = nv.fpB * delta * d1 * d1 /
                                         (a1 * a1 * (1.0 + delta * nv.fpA));
                             double d2 = nv.fpB - nv.fvu;
                             double a2 = 1.0 + delta * nv.fvu;
                             double o2 = nv.fpA * delta * d2 * d2 /
                                         (a2 * a2 * (1.0 + delta * nv.fpB));
                             o[nv.iv] += nv.wB * o1;
                             o[nv.ivu] += nv.wB * o2;
                           });
  return out;
}

inline RDecomposition R_decomposition(const Distribution& f, const KernelSpec& spec, int trunc_n,
                                      const RenormParams& params,
                                      const HolderTestFn* phi = nullptr, AngularRes res = {}) {
  params.validate();
  RDecomposition out;
  std::vector<double> conv = S_op_convolution(f, spec, trunc_n);
  out.R1.resize(f.grid.size());
  for (size_t i = 0; i < out.R1.size(); ++i) {
    auto b = beta_and_derivative(f.values[i], params);
    out.R1[i] = (f.values[i] * b.beta_prime - b.beta) * conv[i];
  }
  out.R3 = R3_field(f, spec, trunc_n, params, res);
  if (phi) {
    // R2 = sum_{v, v_*} f_* beta(f(v)) (T phi)(v; v_*) h^6, pairing form only
    const VelocityGrid& g = f.grid;
    double cell = g.cell_volume();
    size_t nn = g.size();
    std::vector<double> beta_f(nn);
    for (size_t i = 0; i < nn; ++i) beta_f[i] = beta_and_derivative(f.values[i], params).beta;
    std::vector<double> partial(kSweepChunks, 0.0);
    double fmax = f.max_value();
    run_chunks(kSweepChunks, [&](int chunk) {
      size_t lo = nn * chunk / kSweepChunks;
      size_t hi = nn * (chunk + 1) / kSweepChunks;
      double acc = 0.0;
      for (size_t iv = lo; iv < hi; ++iv) {
        if (beta_f[iv] <= 0.0) continue;
        Vec3 v = g.node(iv);
        if (norm(v) > phi->support_radius + g.v_max * 1.8) continue;
        for (size_t is = 0; is < nn; ++is) {
          double fs = f.values[is];
          if (fs < 1e-14 * fmax) continue;
          double t = T_op(*phi, g.node(is), v, spec, trunc_n, res.n_theta, res.n_phi);
          acc += fs * beta_f[iv] * t;
        }
      }
      partial[chunk] = acc;
    });
    double r2 = 0.0;
    for (double p : partial) r2 += p;
    out.R2 = r2 * cell * cell;
  }
  return out;
}

// Consistency of the decomposition against beta'(f) Q_n(f, f) paired with phi:
// sum (R1 + R3) phi h^3 + R2  vs  sum beta'(f) Q_n(f,f) phi h^3.
struct DecompositionCheck {
  double lhs, rhs, rel_residual;
};

inline DecompositionCheck decomposition_consistency(const Distribution& f, const KernelSpec& spec,
                                                    int trunc_n, const RenormParams& params,
                                                    const HolderTestFn& phi, AngularRes res = {}) {
  RDecomposition rd = R_decomposition(f, spec, trunc_n, params, &phi, res);
  std::vector<double> q = Q_collision(f, spec, trunc_n, /*quasilinear=*/false, res);
  const VelocityGrid& g = f.grid;
  double cell = g.cell_volume();
  double lhs = *rd.R2, rhs = 0.0, scale = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    double ph = phi(g.node(i));
    lhs += (rd.R1[i] + rd.R3[i]) * ph * cell;
    double bp = beta_and_derivative(f.values[i], params).beta_prime;
    rhs += bp * q[i] * ph * cell;
    scale += std::fabs(bp * q[i] * ph) * cell;
  }
  double denom = std::max(scale, 1e-300);
  return {lhs, rhs, std::fabs(lhs - rhs) / denom};
}

}  // namespace grazing
