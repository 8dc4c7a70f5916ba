// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file radial.hpp
 * @brief Exterior radial modes: the solution of
 * f'' + (2/r) f' - [l(l+1)/r^2 + kappa^2] f = 0 on r > R with f(R) = 1 that
 * vanishes at infinity.
 *
 * For kappa > 0, f(r) = k_l(kappa r) / k_l(kappa R) with the decaying
 * modified spherical Bessel function
 *   k_l(x) = e^{-x} sum_{m=0}^{l} a_{lm} x^{-(m+1)},
 *   a_{lm} = (l+m)! / (m! (l-m)! 2^m),
 * evaluated as e^{-kappa (r-R)} (R/r)^{l+1} Q(kappa r) / Q(kappa R) with the
 * positive polynomial Q(x) = sum_m a_{lm} x^{l-m} in log-sum-exp form. For
 * kappa = 0 the mode is (R/r)^{l+1}.
 */

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rholab/core.hpp"

namespace rholab {

inline constexpr int radial_max_l = 64;
inline constexpr double radial_max_kappa = 1e3;

enum class RadialMethod { closedForm, besselRatio, odeIntegration };

inline const char* to_string(RadialMethod m) {
  switch (m) {
    case RadialMethod::closedForm: return "closedForm";
    case RadialMethod::besselRatio: return "besselRatio";
    default: return "odeIntegration";
  }
}

struct RadialSolution {
  int l = 0;
  double kappa = 0.0;
  double R = 1.0;
  std::vector<double> grid;
  std::vector<double> values;
  RadialMethod method = RadialMethod::closedForm;
};

namespace detail {

inline void check_radial_args(int l, double kappa, double R) {
  if (l < 0) throw DomainError("radial: l must be >= 0");
  if (!(R > 0.0)) throw DomainError("radial: R must be > 0");
  if (!(kappa >= 0.0)) throw DomainError("radial: kappa must be >= 0");
  if (l > radial_max_l) throw DomainError("radial: l above the supported cap 64");
  if (kappa > radial_max_kappa) throw DomainError("radial: kappa above the supported cap 1e3");
}

template <class T = double>
inline T log_bessel_coefficient(int l, int m) {
  using std::lgamma, std::log;
  return lgamma(T(l + m + 1)) - lgamma(T(m + 1)) - lgamma(T(l - m + 1)) - T(m) * log(T(2));
}

// ln Q(x) for x > 0.
template <class T = double>
inline T log_q(int l, T x) {
  using std::exp, std::log;
  const T lx = log(x);
  T top = -std::numeric_limits<T>::infinity();
  std::vector<T> terms(l + 1);
  for (int m = 0; m <= l; ++m) {
    terms[m] = log_bessel_coefficient<T>(l, m) + T(l - m) * lx;
    top = std::max(top, terms[m]);
  }
  T s = 0;
  for (T t : terms) s += exp(t - top);
  return top + log(s);
}

template <class T>
inline T radial_mode_unchecked(int l, T kappa, T R, T r) {
  using std::exp, std::log;
  const T power = T(l + 1) * log(R / r);
  if (kappa == T(0)) return exp(power);
  if (l == 0) return exp(power - kappa * (r - R));
  return exp(power - kappa * (r - R) + log_q<T>(l, kappa * r) - log_q<T>(l, kappa * R));
}

}  // namespace detail

/// a_{lm}, the coefficients of k_l.
inline double bessel_k_coefficient(int l, int m) { return std::exp(detail::log_bessel_coefficient(l, m)); }

/// k_l(x) = e^{-x} sum_m a_{lm} x^{-(m+1)} for x > 0 (may underflow for large x).
inline double modified_spherical_bessel_k(int l, double x) {
  if (!(x > 0.0)) throw DomainError("modified_spherical_bessel_k: x must be > 0");
  return std::exp(-x - (l + 1.0) * std::log(x) + detail::log_q(l, x));
}

/// f_{l, kappa, R}(r) for r >= R.
inline double radial_mode(int l, double kappa, double R, double r) {
  detail::check_radial_args(l, kappa, R);
  if (!(r >= R)) throw DomainError("radial_mode: r must be >= R");
  return detail::radial_mode_unchecked<double>(l, kappa, R, r);
}

inline RadialSolution solve_radial(int l, double kappa, double R, const std::vector<double>& grid) {
  detail::check_radial_args(l, kappa, R);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= R)) throw DomainError("solve_radial: grid must lie in [R, inf)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("solve_radial: grid must be increasing");
  }
  RadialSolution s;
  s.l = l;
  s.kappa = kappa;
  s.R = R;
  s.grid = grid;
  s.method = (kappa == 0.0 || l == 0) ? RadialMethod::closedForm : RadialMethod::besselRatio;
  s.values.reserve(grid.size());
  for (double r : grid) s.values.push_back(radial_mode(l, kappa, R, r));
  return s;
}

/// Maximum-principle envelope v_kappa(r) = (R/r) e^{-kappa (r - R)}.
inline double max_principle_envelope(double kappa, double R, double r) {
  return (R / r) * std::exp(-kappa * (r - R));
}

struct MaxPrincipleCheck {
  double max_excess = 0.0;  // max of f - min(1, v_kappa); <= 1e-12 passes
  double worst_r = 0.0;
  bool passed = false;
};

inline MaxPrincipleCheck max_principle_check(const RadialSolution& s) {
  MaxPrincipleCheck c;
  c.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double bound = std::min(1.0, max_principle_envelope(s.kappa, s.R, s.grid[i]));
    const double excess = s.values[i] - bound;
    if (excess > c.max_excess) {
      c.max_excess = excess;
      c.worst_r = s.grid[i];
    }
  }
  c.passed = s.grid.empty() || c.max_excess <= 1e-12;
  return c;
}

/**
 * Plug-in residual f'' + 2 f'/r - [l(l+1)/r^2 + kappa^2] f at r with a
 * centred stencil of the given order (2: three points, 4: five points). The
 * stencil and the closed form are evaluated in long double so that the
 * cancellation in the second difference stays below 1e-8 for l up to 32.
 */
inline double radial_fd_residual(int l, double kappa, double R, double r, double h, int order = 4) {
  detail::check_radial_args(l, kappa, R);
  if (!(r - 2.0 * h >= R)) throw DomainError("radial_fd_residual: stencil leaves [R, inf)");
  using T = long double;
  const T k = kappa, R0 = R, x = r, H = h;
  auto f = [&](T y) { return detail::radial_mode_unchecked<T>(l, k, R0, y); };
  T d1, d2;
  if (order == 2) {
    const T fm = f(x - H), f0 = f(x), fp = f(x + H);
    d1 = (fp - fm) / (2 * H);
    d2 = (fp - 2 * f0 + fm) / (H * H);
  } else if (order == 4) {
    const T fm2 = f(x - 2 * H), fm = f(x - H), f0 = f(x), fp = f(x + H), fp2 = f(x + 2 * H);
    d1 = (-fp2 + 8 * fp - 8 * fm + fm2) / (12 * H);
    d2 = (-fp2 + 16 * fp - 30 * f0 + 16 * fm - fm2) / (12 * H * H);
  } else {
    throw DomainError("radial_fd_residual: order must be 2 or 4");
  }
  return static_cast<double>(d2 + 2 * d1 / x - (T(l) * T(l + 1) / (x * x) + k * k) * f(x));
}

struct OdeCrossCheck {
  double max_deviation = 0.0;
  double r_end = 0.0;      // outer start of the inward integration
  double r_compare = 0.0;  // deviations measured on [R, r_compare]
  std::size_t steps = 0;
  double step = 0.0;
  bool skipped = false;  // kappa = 0: the power law is exact
  bool passed = false;
};

/**
 * Independent check of the closed form: inward RK4 on u = r f,
 * u'' = [l(l+1)/r^2 + kappa^2] u, seeded with u = e^{-kappa r}, u' = -kappa u.
 * The seed error lives in the growing-outward solution and is damped by
 * e^{-2 kappa (r_end - r)}, so r_end is extended to at least R + 30/kappa and
 * comparison stops 20/kappa short of it.
 */
inline OdeCrossCheck ode_cross_check(int l, double kappa, double R, double r_end) {
  detail::check_radial_args(l, kappa, R);
  if (!(r_end > R)) throw DomainError("ode_cross_check: r_end must exceed R");
  OdeCrossCheck c;
  if (kappa == 0.0) {
    c.skipped = true;
    c.passed = true;
    c.r_end = r_end;
    return c;
  }
  c.r_end = std::max(r_end, R + 30.0 / kappa);
  c.r_compare = std::max(R, std::min(r_end, c.r_end - 20.0 / kappa));
  const double stiff = std::max(kappa, std::sqrt(l * (l + 1.0)) / R);
  const std::size_t steps = static_cast<std::size_t>(std::ceil((c.r_end - R) * stiff / 1e-2));
  if (steps > 50000000)
    throw Error("ode_cross_check: " + std::to_string(steps) + " RK4 steps needed (kappa=" +
                std::to_string(kappa) + ", l=" + std::to_string(l) + "); interval too stiff");
  const double h = (c.r_end - R) / static_cast<double>(steps);
  c.steps = steps;
  c.step = h;
  const double q = l * (l + 1.0), k2 = kappa * kappa;
  auto acc = [&](double r, double u) { return (q / (r * r) + k2) * u; };
  // March inward with t = r_end - r; store u on the step nodes.
  std::vector<double> us(steps + 1);
  double u = std::exp(-kappa * (c.r_end - R)), v = -kappa * u;  // scaled by e^{kappa R}
  us[steps] = u;
  for (std::size_t i = steps; i > 0; --i) {
    const double r = R + h * static_cast<double>(i);
    const double dt = -h;
    const double k1u = v, k1v = acc(r, u);
    const double k2u = v + 0.5 * dt * k1v, k2v = acc(r + 0.5 * dt, u + 0.5 * dt * k1u);
    const double k3u = v + 0.5 * dt * k2v, k3v = acc(r + 0.5 * dt, u + 0.5 * dt * k2u);
    const double k4u = v + dt * k3v, k4v = acc(r + dt, u + dt * k3u);
    u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    us[i - 1] = u;
    if (!std::isfinite(u)) throw Error("ode_cross_check: overflow at r = " + std::to_string(r - h));
  }
  const double scale = R / us[0];  // f = u / r, f(R) = 1
  for (std::size_t i = 0; i <= steps; ++i) {
    const double r = R + h * static_cast<double>(i);
    if (r > c.r_compare + 0.5 * h) break;
    const double dev = std::abs(scale * us[i] / r - radial_mode(l, kappa, R, r));
    c.max_deviation = std::max(c.max_deviation, dev);
  }
  c.passed = c.max_deviation < 1e-8;
  return c;
}

}  // namespace rholab
