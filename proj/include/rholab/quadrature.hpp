// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file quadrature.hpp
 * @brief Gauss rules (Legendre, Laguerre), the sphere product rule, and
 * grid integration of sampled radial integrands.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "rholab/core.hpp"

namespace rholab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * x * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        if (iter > 0) break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Laguerre L_n(x) and L_{n+1}(x) by the three-term recurrence.
inline std::pair<double, double> laguerre_pair(int n, double x) {
  double l0 = 1.0, l1 = 1.0 - x;
  if (n == 0) return {l0, l1};
  for (int k = 1; k < n + 1; ++k) {
    const double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return {l0, l1};
}

// Golub-Welsch on the Laguerre Jacobi matrix (weight e^{-t} on [0, inf)),
// nodes polished by Newton and weights from the L_{n+1} formula so that the
// tiny tail weights keep full relative accuracy.
inline QuadratureRule compute_gauss_laguerre(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jac(i, i) = 2.0 * i + 1.0;
    if (i + 1 < n) {
      jac(i, i + 1) = i + 1.0;
      jac(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac, Eigen::EigenvaluesOnly);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = eig.eigenvalues()(i);
    for (int iter = 0; iter < 4; ++iter) {
      // L_n'(x) = n (L_n - L_{n-1}) / x
      const auto [lnm1, ln] = laguerre_pair(n - 1, x);
      const double deriv = n * (ln - lnm1) / x;
      x -= ln / deriv;
    }
    const double lnp1 = laguerre_pair(n, x).second;
    rule.nodes[i] = x;
    rule.weights[i] = x / ((n + 1.0) * (n + 1.0) * lnp1 * lnp1);
  }
  return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1] (cached).
inline const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// n-point Gauss-Laguerre rule for weight e^{-t} on [0, inf) (cached).
inline const QuadratureRule& gauss_laguerre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_laguerre(n)).first;
  return it->second;
}

/// Gauss-Legendre rule mapped to [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  const auto& ref = gauss_legendre(n);
  QuadratureRule rule = ref;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * ref.nodes[i];
    rule.weights[i] = half * ref.weights[i];
  }
  return rule;
}

/**
 * Integral over [0, inf) of g(r) dr using Gauss-Laguerre nodes scaled to the
 * decay rate `rate` of g: the rule is exact when g(r) e^{rate r} is a
 * polynomial of degree < 2n.
 */
template <class Fn>
double integrate_half_line(Fn&& g, double rate, int n = 64) {
  const auto& rule = gauss_laguerre(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double t = rule.nodes[i];
    acc += rule.weights[i] * std::exp(t) * g(t / rate);
  }
  return acc / rate;
}

/// Product rule on S^2: Gauss-Legendre in cos(theta) times uniform azimuth.
struct SphereRule {
  std::vector<Vec3> points;
  std::vector<double> weights;  // sum to 4 pi

  /// Exact for spherical polynomials of degree <= min(2 n_theta - 1, n_phi - 1).
  static SphereRule product(int n_theta, int n_phi) {
    SphereRule s;
    const auto& gl = gauss_legendre(n_theta);
    for (int i = 0; i < n_theta; ++i) {
      const double ct = gl.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * pi * k / n_phi;
        s.points.push_back({st * std::cos(phi), st * std::sin(phi), ct});
        s.weights.push_back(gl.weights[i] * 2.0 * pi / n_phi);
      }
    }
    return s;
  }

  /**
   * Gauss-Legendre in theta itself (weight sin theta) times uniform azimuth.
   * Integrands with a cusp |theta| at a pole are smooth in theta, unlike in
   * cos(theta); n_phi = 1 suits integrands symmetric about the pole axis.
   */
  static SphereRule polar(int n_theta, int n_phi) {
    SphereRule s;
    const auto rule = gauss_legendre(n_theta, 0.0, pi);
    for (int i = 0; i < n_theta; ++i) {
      const double th = rule.nodes[i];
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * pi * k / n_phi;
        s.points.push_back({std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th)});
        s.weights.push_back(rule.weights[i] * std::sin(th) * 2.0 * pi / n_phi);
      }
    }
    return s;
  }

  /// The same rule rotated so that its pole points along `axis`.
  SphereRule aligned_to(const Vec3& axis) const {
    const double len = norm(axis);
    if (len == 0.0) return *this;
    const Vec3 e3 = (1.0 / len) * axis;
    Vec3 helper = std::abs(e3[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = helper - dot(helper, e3) * e3;
    e1 = (1.0 / norm(e1)) * e1;
    const Vec3 e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
                  e3[0] * e1[1] - e3[1] * e1[0]};
    SphereRule out;
    out.weights = weights;
    out.points.reserve(points.size());
    for (const auto& p : points) out.points.push_back(p[0] * e1 + p[1] * e2 + p[2] * e3);
    return out;
  }

  std::size_t size() const { return points.size(); }
};

/**
 * Integral of sampled values y over [x_front, x_back] by piecewise quintics:
 * each interval is integrated exactly against the Lagrange polynomial through
 * the six nearest nodes (fewer on short grids). Returns the cumulative
 * integral from each node to the last node.
 */
inline std::vector<double> tail_cumulative(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> tail(n, 0.0);
  if (n < 2) return tail;
  static const double g[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                              0.8611363115940526};
  static const double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                              0.3478548451374538};
  const std::size_t cnt = std::min<std::size_t>(6, n);
  std::vector<double> piece(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t back = cnt / 2 - 1;
    const std::size_t lo = std::min(i > back ? i - back : 0, n - cnt);
    const double a = x[i], b = x[i + 1];
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * g[q];
      double val = 0.0;
      for (std::size_t k = lo; k < lo + cnt; ++k) {
        double basis = 1.0;
        for (std::size_t m = lo; m < lo + cnt; ++m)
          if (m != k) basis *= (t - x[m]) / (x[k] - x[m]);
        val += basis * y[k];
      }
      acc += w[q] * val;
    }
    piece[i] = 0.5 * (b - a) * acc;
  }
  for (std::size_t i = n - 1; i-- > 0;) tail[i] = tail[i + 1] + piece[i];
  return tail;
}

/**
 * Integral over [0, inf) of g split at the sorted breakpoints: Gauss-Legendre
 * on each finite piece and scaled Gauss-Laguerre beyond the last breakpoint.
 * Keeps interior kinks of g on piece boundaries.
 */
template <class Fn>
double integrate_half_line_split(Fn&& g, std::vector<double> breaks, double rate, int n_piece = 32,
                                 int n_tail = 48) {
  std::sort(breaks.begin(), breaks.end());
  double acc = 0.0, a = 0.0;
  for (double b : breaks) {
    if (!(b > a)) continue;
    const auto rule = gauss_legendre(n_piece, a, b);
    for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * g(rule.nodes[i]);
    a = b;
  }
  const double start = a;
  return acc + integrate_half_line([&](double t) { return g(start + t); }, rate, n_tail);
}

}  // namespace rholab
