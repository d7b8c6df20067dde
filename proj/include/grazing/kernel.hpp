#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "grazing/bump.hpp"
#include "grazing/quad1d.hpp"
#include "grazing/vec3.hpp"

namespace grazing {

inline constexpr double kPi = 3.14159265358979323846;

// Collision kernel B(z, sigma) = |z|^gamma b(k . sigma), supported on
// deflection angles theta in [0, pi/2]. The angular profile is pinned to
// b(cos theta) = K theta^(-1-nu) / sin(theta), so sin(theta) b(cos theta)
// equals K theta^(-1-nu) exactly.
struct KernelSpec {
  double gamma = 1.0;
  double nu = 0.25;
  double K = 1.0;
  // Inverse-power exponent when the kernel comes from an s-power law;
  // infinity = hard spheres.
  std::optional<double> s_param{};

  // Floor applied to nu for hard spheres (s = infinity), where the nominal
  // nu = 0 would degenerate the graded quadrature meshes.
  static constexpr double kNuFloor = 1e-6;

  static KernelSpec from_s(double s, double K = 1.0) {
    KernelSpec spec;
    if (std::isinf(s)) {
      spec.gamma = 1.0;
      spec.nu = kNuFloor;
    } else {
      if (s < 5.0) throw std::invalid_argument("KernelSpec: s_param must be >= 5");
      spec.gamma = 1.0 - 4.0 / (s - 1.0);
      spec.nu = 2.0 / (s - 1.0);
    }
    spec.K = K;
    spec.s_param = s;
    return spec;
  }

  void validate() const {
    if (!(gamma >= -3.0 && gamma <= 1.0)) throw std::invalid_argument("KernelSpec: gamma outside [-3, 1]");
    if (!(nu > 0.0 && nu <= 0.5)) throw std::invalid_argument("KernelSpec: nu outside (0, 1/2]");
    if (!(K > 0.0)) throw std::invalid_argument("KernelSpec: K must be positive");
    if (s_param && !std::isinf(*s_param)) {
      double s = *s_param;
      if (s < 5.0) throw std::invalid_argument("KernelSpec: s_param must be >= 5");
      if (std::fabs(gamma - (1.0 - 4.0 / (s - 1.0))) > 1e-12 ||
          std::fabs(nu - 2.0 / (s - 1.0)) > 1e-12)
        throw std::invalid_argument("KernelSpec: gamma/nu inconsistent with s_param");
    }
  }
};

struct TruncationParams {
  int n = 8;     // grazing truncation index
  int k = 8;     // angular split index
  double R = 8;  // cap level for the capped kernel

  void validate() const {
    if (n < 1) throw std::invalid_argument("TruncationParams: n >= 1 required");
    if (k < 1) throw std::invalid_argument("TruncationParams: k >= 1 required");
    if (!(R > 1.0)) throw std::invalid_argument("TruncationParams: R > 1 required");
  }
};

// Angular profile b(cos theta) on (0, pi/2]; 0 beyond pi/2.
inline double angular_b(const KernelSpec& spec, double theta) {
  if (!(theta > 0.0)) throw std::domain_error("angular_b: theta must be positive");
  if (theta > kPi / 2.0) return 0.0;
  return spec.K * std::pow(theta, -1.0 - spec.nu) / std::sin(theta);
}

// sin(theta) * b(cos theta) = K theta^(-1-nu); the form quadratures use.
inline double sin_times_b(const KernelSpec& spec, double theta) {
  return spec.K * std::pow(theta, -1.0 - spec.nu);
}

// Grazing truncation factor 1 - phi(n sin(theta/2)); b_n = b * this.
inline double truncation_factor(double theta, int n) {
  return 1.0 - cutoff_bump(n * std::sin(0.5 * theta));
}

// b_n vanishes identically for theta <= theta_zero(n), i.e. whenever
// sin(theta/2) <= 3/(4n), equivalently cos(theta) >= 1 - 9/(8 n^2).
inline double theta_zero(int n) { return 2.0 * std::asin(std::min(1.0, 3.0 / (4.0 * n))); }

// The truncation factor is exactly 1 beyond theta_one(n) (b_n = b there).
inline double theta_one(int n) { return 2.0 * std::asin(std::min(1.0, 4.0 / (3.0 * n))); }

enum class BMode { Full, Truncated, SplitFar, SplitNear, Capped };

struct KernelMode {
  BMode mode = BMode::Full;
  int n = 0;
  int k = 0;
  double cap = 0.0;

  static KernelMode full() { return {BMode::Full}; }
  static KernelMode truncated(int n) { return {BMode::Truncated, n}; }
  static KernelMode split_far(int n, int k) { return {BMode::SplitFar, n, k}; }
  static KernelMode split_near(int n, int k) { return {BMode::SplitNear, n, k}; }
  static KernelMode capped(double R) { return {BMode::Capped, 0, 0, R}; }
};

// Angular factor of the mode at angle theta (radial part excluded; the capped
// mode cannot be factored and is handled inside kernel_B).
inline double angular_factor(const KernelSpec& spec, const KernelMode& m, double theta) {
  if (!(theta > 0.0)) throw std::domain_error("angular_factor: theta must be positive");
  if (theta > kPi / 2.0) return 0.0;
  switch (m.mode) {
    case BMode::Full:
      return angular_b(spec, theta);
    case BMode::Truncated:
      return angular_b(spec, theta) * truncation_factor(theta, m.n);
    case BMode::SplitFar:
      return theta >= 1.0 / m.k ? angular_b(spec, theta) : 0.0;
    case BMode::SplitNear:
      return theta <= 1.0 / m.k ? angular_b(spec, theta) * truncation_factor(theta, m.n) : 0.0;
    case BMode::Capped:
      throw std::invalid_argument("angular_factor: capped mode has no radial/angular split");
  }
  return 0.0;
}

inline double kernel_B(const KernelSpec& spec, const Vec3& z, const Vec3& sigma,
                       const KernelMode& m = KernelMode::full()) {
  if (std::fabs(norm(sigma) - 1.0) > 1e-12)
    throw std::invalid_argument("kernel_B: sigma must be a unit vector");
  double r = norm(z);
  if (r == 0.0) {
    if (spec.gamma > 0.0) return 0.0;
    throw std::domain_error("kernel_B: |z| = 0 is singular for gamma <= 0");
  }
  double c = dot(z, sigma) / r;
  c = std::max(-1.0, std::min(1.0, c));
  if (c < 0.0) return 0.0;  // support restriction theta <= pi/2
  double theta = std::acos(c);
  double radial = std::pow(r, spec.gamma);
  if (m.mode == BMode::Capped) {
    if (theta < 1.0 / m.cap) return 0.0;
    if (theta == 0.0) return m.cap;
    return std::min(radial * angular_b(spec, theta), m.cap);
  }
  if (theta == 0.0) {
    // b diverges at exact zero deflection unless the truncation kills it.
    bool truncated = m.mode == BMode::Truncated || m.mode == BMode::SplitNear;
    return truncated ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return radial * angular_factor(spec, m, theta);
}

namespace detail {
// Recommended grading exponent for meshes resolving theta^(-1-nu) weights.
inline double grading_for(const KernelSpec& spec) { return 2.0 / (1.0 - spec.nu); }

// Angular integral I = int_0^{pi/2} theta^(-1-nu) (1 - cos t) [trunc] dt,
// so that M(r) = 2 pi K I r^gamma.
inline double momentum_angular_integral(const KernelSpec& spec, int n, double rel_tol) {
  double lo = n > 0 ? theta_zero(n) : 0.0;
  auto f = [&](double t) {
    double w = std::pow(t, -1.0 - spec.nu) * (1.0 - std::cos(t));
    return n > 0 ? w * truncation_factor(t, n) : w;
  };
  return integrate_graded(f, lo, kPi / 2.0, grading_for(spec), rel_tol);
}

// Angular integral for the cancellation kernel:
// S(r) = 2 pi K r^gamma int theta^(-1-nu) [trunc] (cos(t/2)^-(3+gamma) - 1) dt.
// Exactly homogeneous of degree gamma because the profile is a pure product.
inline double cancellation_angular_integral(const KernelSpec& spec, int n, double rel_tol) {
  double lo = n > 0 ? theta_zero(n) : 0.0;
  double p = 3.0 + spec.gamma;
  auto f = [&](double t) {
    double w = std::pow(t, -1.0 - spec.nu) * (std::pow(std::cos(0.5 * t), -p) - 1.0);
    return n > 0 ? w * truncation_factor(t, n) : w;
  };
  return integrate_graded(f, lo, kPi / 2.0, grading_for(spec), rel_tol);
}
}  // namespace detail

enum class Transfer { M, Mprime };

// Momentum transfer M(r) = 2 pi int_0^{pi/2} B(r, cos t)(1 - cos t) sin t dt.
// M' replaces B by the sup quotient over lambda in (1, sqrt 2]; for the
// power-law radial part that supremum is the lambda -> 1+ limit |gamma|,
// giving M'(r) = |gamma| r^(gamma-1) * (angular part of M).
// n > 0 evaluates the b_n-truncated version.
inline double momentum_transfer(const KernelSpec& spec, double r, Transfer which = Transfer::M,
                                int n = 0, double rel_tol = 1e-9) {
  if (r < 0.0 || (r == 0.0 && spec.gamma < 0.0))
    throw std::domain_error("momentum_transfer: r > 0 required for gamma < 0");
  double I = detail::momentum_angular_integral(spec, n, rel_tol);
  double c = 2.0 * kPi * spec.K * I;
  if (which == Transfer::M) return c * std::pow(r, spec.gamma);
  return std::fabs(spec.gamma) * c * std::pow(r, spec.gamma - 1.0);
}

// Radial sup quotient sup_{1 < lambda <= sqrt 2} (lambda^gamma - 1)/(lambda - 1)
// evaluated on a lambda grid; used to cross-check the closed form |gamma|.
inline double radial_sup_quotient_grid(double gamma, int points = 64) {
  double sup = 0.0;
  for (int i = 0; i < points; ++i) {
    double t = static_cast<double>(i) / (points - 1);
    double lam = 1.0 + 1e-9 + (std::sqrt(2.0) - 1.0 - 1e-9) * t;
    sup = std::max(sup, std::fabs(std::pow(lam, gamma) - 1.0) / (lam - 1.0));
  }
  return sup;
}

// Cancellation kernel S(r); n > 0 gives S_n built from B_n.
inline double cancellation_S(const KernelSpec& spec, double r, int n = 0, double rel_tol = 1e-9) {
  if (!(r > 0.0)) throw std::domain_error("cancellation_S: r > 0 required");
  double I = detail::cancellation_angular_integral(spec, n, rel_tol);
  return 2.0 * kPi * spec.K * I * std::pow(r, spec.gamma);
}

// Coefficient c with S_[n](r) = c r^gamma (exact homogeneity of the product
// kernel makes this the whole function).
inline double cancellation_coefficient(const KernelSpec& spec, int n = 0, double rel_tol = 1e-9) {
  return 2.0 * kPi * spec.K * detail::cancellation_angular_integral(spec, n, rel_tol);
}

inline double momentum_coefficient(const KernelSpec& spec, int n = 0, double rel_tol = 1e-9) {
  return 2.0 * kPi * spec.K * detail::momentum_angular_integral(spec, n, rel_tol);
}

// Z_n(a) = 2 pi int_a^{pi/2} b_n(cos t) sin t dt.
inline double Zn(const KernelSpec& spec, double a, int n, double rel_tol = 1e-9) {
  if (!(a > 0.0)) throw std::domain_error("Zn: a must be positive");
  if (a >= kPi / 2.0) return 0.0;
  double lo = std::max(a, theta_zero(n));
  if (lo >= kPi / 2.0) return 0.0;
  auto f = [&](double t) { return std::pow(t, -1.0 - spec.nu) * truncation_factor(t, n); };
  // integrand is bounded on [lo, pi/2]; mild grading still helps small lo
  return 2.0 * kPi * spec.K * integrate_graded(f, lo, kPi / 2.0, 1.5, rel_tol);
}

// Tabulated Z_n(a) for bulk evaluation (smoothing-estimate weights): cumulative
// panel sums on a log-spaced angle grid, linear interpolation in between.
class ZnTable {
 public:
  ZnTable(const KernelSpec& spec, int n, double a_min, int samples = 1024) : a_min_(a_min) {
    double lo = std::max(a_min, 1e-12);
    double hi = kPi / 2.0;
    grid_.resize(samples);
    vals_.assign(samples, 0.0);
    for (int i = 0; i < samples; ++i)
      grid_[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
    auto f = [&](double t) {
      return 2.0 * kPi * spec.K * std::pow(t, -1.0 - spec.nu) * truncation_factor(t, n);
    };
    double tz = theta_zero(n);
    for (int i = samples - 2; i >= 0; --i) {
      double a = grid_[i], b = grid_[i + 1];
      double piece = 0.0;
      if (b > tz) piece = detail::gl8(f, std::max(a, tz), b);
      vals_[i] = vals_[i + 1] + piece;
    }
  }

  double operator()(double a) const {
    if (a >= kPi / 2.0) return 0.0;
    if (a <= grid_.front()) return vals_.front();
    auto it = std::lower_bound(grid_.begin(), grid_.end(), a);
    size_t hi = static_cast<size_t>(it - grid_.begin());
    size_t lo = hi - 1;
    double t = (a - grid_[lo]) / (grid_[hi] - grid_[lo]);
    return vals_[lo] * (1.0 - t) + vals_[hi] * t;
  }

 private:
  double a_min_;
  std::vector<double> grid_, vals_;
};

}  // namespace grazing
