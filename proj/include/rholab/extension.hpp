// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file extension.hpp
 * @brief Restriction to the sphere |x_1| = R and harmonic extension to
 * |x_1| > R.
 *
 * A boundary datum is phi(w, xh) = sum_{lm} Y_lm(w) phi_lm(xh), with w in S^2
 * and xh the coordinates of the other electrons. Two cases are supported:
 *
 *  - one electron: phi_lm are scalars and the extension is
 *    sum c_lm Y_lm(w) (R/r)^{l+1};
 *  - two electrons: phi_lm(xh) = sum_i c_{lm,i} exp(-|xh|^2 / (2 s_i^2)), with
 *    unitary Fourier transform s_i^3 exp(-s_i^2 k^2 / 2). Each Fourier mode k
 *    is extended with the radial mode f_{l,|k|,R}, and the k integral is done
 *    after angular reduction by Gauss-Legendre on [0, 12 / s_i].
 *
 * Real spherical harmonics have 2l + 1 orders m = -l..l, packed by lm_index.
 */

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <vector>

#include "rholab/core.hpp"
#include "rholab/quadrature.hpp"
#include "rholab/radial.hpp"
#include "rholab/special.hpp"
#include "rholab/wavefunction.hpp"

namespace rholab {

struct BoundaryFunction {
  int lmax = 0;
  std::vector<double> widths;  // empty: one electron
  std::vector<double> coeffs;  // [lm][i], row-major with inner() columns

  int electrons() const { return widths.empty() ? 1 : 2; }
  std::size_t inner() const { return widths.empty() ? 1 : widths.size(); }
  double coeff(int lm, std::size_t i = 0) const { return coeffs[static_cast<std::size_t>(lm) * inner() + i]; }
  double& coeff(int lm, std::size_t i = 0) { return coeffs[static_cast<std::size_t>(lm) * inner() + i]; }

  void validate() const {
    if (lmax < 0) throw DomainError("BoundaryFunction: lmax must be >= 0");
    for (double s : widths)
      if (!(s > 0.0)) throw DomainError("BoundaryFunction: Gaussian widths must be positive");
    if (coeffs.size() != static_cast<std::size_t>(lm_count(lmax)) * inner())
      throw DimensionError("BoundaryFunction: coefficient count must be (lmax+1)^2 x inner basis size");
  }

  static BoundaryFunction zeros(int lmax, std::vector<double> widths = {}) {
    BoundaryFunction b;
    b.lmax = lmax;
    b.widths = std::move(widths);
    b.coeffs.assign(static_cast<std::size_t>(lm_count(lmax)) * b.inner(), 0.0);
    return b;
  }

  /// Y_lm(w) g(xh) with g = 1 (one electron) or the single Gaussian of width s.
  static BoundaryFunction single_mode(int l, int m, std::optional<double> width = std::nullopt) {
    if (std::abs(m) > l) throw DomainError("single_mode: |m| > l");
    BoundaryFunction b = zeros(l, width ? std::vector<double>{*width} : std::vector<double>{});
    b.coeff(lm_index(l, m)) = 1.0;
    return b;
  }

  /// Uniform random coefficients in [-1, 1] (deterministic in the seed).
  static BoundaryFunction random(int lmax, std::uint64_t seed, std::vector<double> widths = {}) {
    BoundaryFunction b = zeros(lmax, std::move(widths));
    Rng rng(derive_seed(seed, 7));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& c : b.coeffs) c = u(rng);
    return b;
  }

  /// Inner Gram matrix <g_i, g_j> over R^3.
  Eigen::MatrixXd gram() const {
    const std::size_t k = inner();
    Eigen::MatrixXd g = Eigen::MatrixXd::Ones(k, k);
    if (widths.empty()) return g;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double a = widths[i] * widths[i], b = widths[j] * widths[j];
        g(i, j) = std::pow(2.0 * pi * a * b / (a + b), 1.5);
      }
    return g;
  }

  /// ||phi||^2 over S^2 x R^{3N-3} (Parseval in lm, exact Gram in xh).
  double norm_squared() const {
    const Eigen::MatrixXd g = gram();
    double acc = 0.0;
    for (int lm = 0; lm < lm_count(lmax); ++lm) {
      Eigen::VectorXd c(inner());
      for (std::size_t i = 0; i < inner(); ++i) c(i) = coeff(lm, i);
      acc += c.dot(g * c);
    }
    return acc;
  }

  /// phi(w, xh); xh is ignored for one electron.
  double value(const Vec3& w, const Vec3& xh = {0, 0, 0}) const {
    const auto y = real_ylm_all(lmax, w);
    const double s2 = dot(xh, xh);
    double acc = 0.0;
    for (int lm = 0; lm < lm_count(lmax); ++lm) {
      double inner_value = 0.0;
      for (std::size_t i = 0; i < inner(); ++i)
        inner_value += coeff(lm, i) * (widths.empty() ? 1.0 : std::exp(-s2 / (2.0 * widths[i] * widths[i])));
      acc += y[lm] * inner_value;
    }
    return acc;
  }
};

/// { x : R1 < |x_1| < R2 }.
struct ShellRegion {
  double R1 = 1.0, R2 = 3.0;
  void validate() const {
    if (!(R1 >= 0.0 && R2 > R1)) throw DomainError("ShellRegion: need 0 <= R1 < R2");
  }
};

// ---------------------------------------------------------------------------
// Harmonic field
// ---------------------------------------------------------------------------

class HarmonicField {
 public:
  HarmonicField(BoundaryFunction boundary, double R, int k_nodes = 128)
      : boundary_(std::move(boundary)), R_(R), k_nodes_(k_nodes) {
    boundary_.validate();
    if (!(R > 0.0)) throw DomainError("extend: R must be > 0");
    if (k_nodes < 8) throw DomainError("extend: need at least 8 k nodes");
  }

  const BoundaryFunction& boundary() const { return boundary_; }
  double R() const { return R_; }
  int k_nodes() const { return k_nodes_; }
  int electrons() const { return boundary_.electrons(); }

  /**
   * Inner profile h_{l,i}(r, s) for the Gaussian of index i at |xh| = s:
   * (2 pi)^{-3/2} 4 pi int k^2 j_0(k s) s_i^3 e^{-s_i^2 k^2 / 2} f_{l,k,R}(r) dk.
   */
  double inner_profile(int l, std::size_t i, double r, double s) const {
    const double sigma = boundary_.widths[i];
    const auto rule = gauss_legendre(k_nodes_, 0.0, 12.0 / sigma);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double k = rule.nodes[q];
      acc += rule.weights[q] * k * k * sinc(k * s) * std::exp(-0.5 * sigma * sigma * k * k) *
             radial_mode(l, k, R_, r);
    }
    return std::pow(2.0 * pi, -1.5) * 4.0 * pi * sigma * sigma * sigma * acc;
  }

  /// E_R phi at x_1 = r w (r >= R) and spectator xh.
  double value(double r, const Vec3& w, const Vec3& xh = {0, 0, 0}) const {
    if (!(r >= R_ * (1.0 - 1e-14))) throw DomainError("HarmonicField: r must be >= R");
    r = std::max(r, R_);
    const int lmax = boundary_.lmax;
    const auto y = real_ylm_all(lmax, w);
    const double s = norm(xh);
    double acc = 0.0;
    for (int l = 0; l <= lmax; ++l) {
      if (boundary_.widths.empty()) {
        const double f = std::pow(R_ / r, l + 1.0);
        for (int m = -l; m <= l; ++m) acc += boundary_.coeff(lm_index(l, m)) * y[lm_index(l, m)] * f;
        continue;
      }
      for (std::size_t i = 0; i < boundary_.inner(); ++i) {
        double angular = 0.0;
        for (int m = -l; m <= l; ++m) angular += boundary_.coeff(lm_index(l, m), i) * y[lm_index(l, m)];
        if (angular != 0.0) acc += angular * inner_profile(l, i, r, s);
      }
    }
    return acc;
  }

  /// Cartesian evaluation at x_1 (and xh).
  double at(const Vec3& x1, const Vec3& xh = {0, 0, 0}) const {
    const double r = norm(x1);
    return value(r, (1.0 / r) * x1, xh);
  }

 private:
  BoundaryFunction boundary_;
  double R_;
  int k_nodes_;
};

inline HarmonicField extend(const BoundaryFunction& boundary, double R, int k_nodes = 128) {
  return HarmonicField(boundary, R, k_nodes);
}

// ---------------------------------------------------------------------------
// Restriction (spherical-harmonic analysis)
// ---------------------------------------------------------------------------

/// Gauss-Legendre (lmax+1) x uniform (2 lmax + 2) rule: exact for degree <= 2 lmax + 1.
inline SphereRule analysis_rule(int lmax) { return SphereRule::product(lmax + 1, 2 * lmax + 2); }

/// Coefficients int_{S^2} Y_lm f dw for l <= lmax.
inline std::vector<double> analyze(const std::function<double(const Vec3&)>& f, int lmax) {
  const SphereRule rule = analysis_rule(lmax);
  std::vector<double> c(lm_count(lmax), 0.0);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double v = rule.weights[k] * f(rule.points[k]);
    const auto y = real_ylm_all(lmax, rule.points[k]);
    for (int lm = 0; lm < lm_count(lmax); ++lm) c[lm] += v * y[lm];
  }
  return c;
}

/// One-electron restriction of a function of w in S^2.
inline BoundaryFunction restrict_function(const std::function<double(const Vec3&)>& f, int lmax) {
  BoundaryFunction b = BoundaryFunction::zeros(lmax);
  b.coeffs = analyze(f, lmax);
  return b;
}

/**
 * T_R of a harmonic field. Two-electron fields are projected onto the
 * boundary's own Gaussian basis in xh (Galerkin, exact Gram matrix).
 */
inline BoundaryFunction restrict(const HarmonicField& field, double R, int lmax) {
  if (field.electrons() == 1)
    return restrict_function([&](const Vec3& w) { return field.value(R, w); }, lmax);
  const auto& widths = field.boundary().widths;
  BoundaryFunction b = BoundaryFunction::zeros(lmax, widths);
  const Eigen::MatrixXd g = b.gram();
  const Eigen::LDLT<Eigen::MatrixXd> solver(g);
  // Radial nodes in s = |xh| covering the widest Gaussian.
  const double smax = 12.0 * *std::max_element(widths.begin(), widths.end());
  const auto srule = gauss_legendre(96, 0.0, smax);
  std::vector<std::vector<double>> per_s(srule.size());
  for (std::size_t q = 0; q < srule.size(); ++q) {
    const Vec3 xh{srule.nodes[q], 0.0, 0.0};
    per_s[q] = analyze([&](const Vec3& w) { return field.value(R, w, xh); }, lmax);
  }
  for (int lm = 0; lm < lm_count(lmax); ++lm) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(widths.size());
    for (std::size_t i = 0; i < widths.size(); ++i)
      for (std::size_t q = 0; q < srule.size(); ++q) {
        const double s = srule.nodes[q];
        rhs(i) += srule.weights[q] * 4.0 * pi * s * s * std::exp(-s * s / (2.0 * widths[i] * widths[i])) *
                  per_s[q][lm];
      }
    const Eigen::VectorXd c = solver.solve(rhs);
    for (std::size_t i = 0; i < widths.size(); ++i) b.coeff(lm, i) = c(i);
  }
  return b;
}

/// T_R of a one-electron model: analysis of psi(R w).
inline BoundaryFunction restrict(const WavefunctionModel& model, double R, int lmax) {
  if (model.electrons() != 1)
    throw UnsupportedError("restrict: only one-electron models have a closed-form inner basis");
  return restrict_function([&](const Vec3& w) { return evaluate(model, {R * w}); }, lmax);
}

/// ||a - b|| / ||b|| in the boundary norm (same basis required).
inline double relative_difference(const BoundaryFunction& a, const BoundaryFunction& b) {
  if (a.lmax != b.lmax || a.widths != b.widths) throw DimensionError("relative_difference: basis mismatch");
  BoundaryFunction d = a;
  for (std::size_t k = 0; k < d.coeffs.size(); ++k) d.coeffs[k] -= b.coeffs[k];
  const double nb = b.norm_squared();
  return nb > 0.0 ? std::sqrt(std::max(0.0, d.norm_squared()) / nb) : std::sqrt(std::max(0.0, d.norm_squared()));
}

/// ||T_R E_R phi - phi|| / ||phi||.
inline double roundtrip_check(const BoundaryFunction& boundary, double R) {
  const HarmonicField field = extend(boundary, R);
  return relative_difference(restrict(field, R, boundary.lmax), boundary);
}

/// Coefficient-domain vs point-domain norm of a one-electron boundary.
inline double unitarity_defect(const BoundaryFunction& b) {
  if (b.electrons() != 1) throw UnsupportedError("unitarity_defect: one-electron boundaries only");
  const SphereRule rule = analysis_rule(b.lmax);
  double point = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) point += rule.weights[k] * std::pow(b.value(rule.points[k]), 2);
  const double coef = b.norm_squared();
  return std::abs(point - coef) / std::max(coef, 1e-300);
}

// ---------------------------------------------------------------------------
// Harmonicity
// ---------------------------------------------------------------------------

/**
 * Second-order discrete Laplacian of the field over all coordinates (3 for
 * one electron, 6 for two) at x_1 (and xh), spacing h.
 */
inline double harmonic_residual(const HarmonicField& field, const Vec3& x1, const Vec3& xh, double h) {
  const double c = field.at(x1, xh);
  double lap = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 p = x1, m = x1;
    p[axis] += h;
    m[axis] -= h;
    lap += field.at(p, xh) + field.at(m, xh) - 2.0 * c;
  }
  if (field.electrons() == 2) {
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 p = xh, m = xh;
      p[axis] += h;
      m[axis] -= h;
      lap += field.at(x1, p) + field.at(x1, m) - 2.0 * c;
    }
  }
  return lap / (h * h);
}

/// max over points of |harmonic_residual|.
inline double harmonic_residual(const HarmonicField& field, const std::vector<Vec3>& x1s,
                                const std::vector<Vec3>& xhs, double h) {
  if (!xhs.empty() && xhs.size() != x1s.size()) throw DimensionError("harmonic_residual: point list mismatch");
  const auto res = parallel_map(x1s.size(), [&](std::size_t k) {
    return std::abs(harmonic_residual(field, x1s[k], xhs.empty() ? Vec3{0, 0, 0} : xhs[k], h));
  });
  return *std::max_element(res.begin(), res.end());
}

/// (-Delta + kappa^2)(f_{l,kappa,R} Y_lm) at x by the second-order 7-point stencil.
inline double mode_residual(int l, int m, double kappa, double R, const Vec3& x, double h) {
  auto u = [&](const Vec3& p) {
    const double r = norm(p);
    return radial_mode(l, kappa, R, r) * real_ylm(l, m, (1.0 / r) * p);
  };
  const double c = u(x);
  double lap = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 p = x, q = x;
    p[axis] += h;
    q[axis] -= h;
    lap += u(p) + u(q) - 2.0 * c;
  }
  return -lap / (h * h) + kappa * kappa * c;
}

struct ConvergenceCheck {
  double residual_h = 0.0;
  double residual_half = 0.0;
  double ratio = 0.0;  // residual(h) / residual(h / 2), ~4 for O(h^2)
  bool passed = false;
};

/// Halving test for the mode residual; passes for a ratio in [3.2, 4.8].
inline ConvergenceCheck mode_convergence(int l, int m, double kappa, double R, const Vec3& x, double h0 = 1e-2) {
  ConvergenceCheck c;
  c.residual_h = std::abs(mode_residual(l, m, kappa, R, x, h0));
  c.residual_half = std::abs(mode_residual(l, m, kappa, R, x, 0.5 * h0));
  c.ratio = c.residual_h / c.residual_half;
  c.passed = c.ratio >= 3.2 && c.ratio <= 4.8;
  return c;
}

/// Halving test for the field Laplacian.
inline ConvergenceCheck field_convergence(const HarmonicField& field, const Vec3& x1, const Vec3& xh = {0, 0, 0},
                                          double h0 = 1e-2) {
  ConvergenceCheck c;
  c.residual_h = std::abs(harmonic_residual(field, x1, xh, h0));
  c.residual_half = std::abs(harmonic_residual(field, x1, xh, 0.5 * h0));
  c.ratio = c.residual_h / c.residual_half;
  c.passed = c.ratio >= 3.2 && c.ratio <= 4.8;
  return c;
}

// ---------------------------------------------------------------------------
// Norm bounds
// ---------------------------------------------------------------------------

struct NormBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs / (R^{3/2} ||phi||); sharp per-mode bound sqrt(26/3)
  bool passed = false;
};

/**
 * ||E_R phi||_{L^2(shell R < |x_1| < 3R)} against 3 R^{3/2} ||phi||, via
 * Parseval in (l, m) and in the Fourier variable of xh.
 */
inline NormBoundCheck shell_norm_bound_check(const HarmonicField& field, const BoundaryFunction& boundary,
                                             double R) {
  const ShellRegion shell{R, 3.0 * R};
  shell.validate();
  const auto rrule = gauss_legendre(64, shell.R1, shell.R2);
  auto radial_energy = [&](int l, double k) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rrule.size(); ++q) {
      const double r = rrule.nodes[q];
      acc += rrule.weights[q] * std::pow(radial_mode(l, k, R, r), 2) * r * r;
    }
    return acc;
  };
  double lhs2 = 0.0;
  const int lmax = boundary.lmax;
  if (boundary.electrons() == 1) {
    for (int l = 0; l <= lmax; ++l) {
      const double fl = radial_energy(l, 0.0);
      for (int m = -l; m <= l; ++m) lhs2 += std::pow(boundary.coeff(lm_index(l, m)), 2) * fl;
    }
  } else {
    const auto& w = boundary.widths;
    const double smin = *std::min_element(w.begin(), w.end());
    const auto krule = gauss_legendre(field.k_nodes(), 0.0, 12.0 / smin);
    for (int l = 0; l <= lmax; ++l) {
      std::vector<double> fl(krule.size());
      for (std::size_t q = 0; q < krule.size(); ++q) fl[q] = radial_energy(l, krule.nodes[q]);
      for (int m = -l; m <= l; ++m) {
        for (std::size_t q = 0; q < krule.size(); ++q) {
          const double k = krule.nodes[q];
          double amp = 0.0;
          for (std::size_t i = 0; i < w.size(); ++i)
            amp += boundary.coeff(lm_index(l, m), i) * std::pow(w[i], 3) * std::exp(-0.5 * w[i] * w[i] * k * k);
          lhs2 += krule.weights[q] * 4.0 * pi * k * k * amp * amp * fl[q];
        }
      }
    }
  }
  NormBoundCheck c;
  const double nphi = std::sqrt(boundary.norm_squared());
  c.lhs = std::sqrt(lhs2);
  c.rhs = 3.0 * std::pow(R, 1.5) * nphi;
  c.constant = nphi > 0.0 ? c.lhs / (std::pow(R, 1.5) * nphi) : 0.0;
  c.passed = c.lhs <= c.rhs;
  return c;
}

/// One-electron factor of a product sample f(x) = prod_j u_j(x_j).
struct SampleFactor {
  enum class Kind { gaussian, exponential };
  Kind kind = Kind::gaussian;
  double rate = 0.5;  // e^{-rate |x|^2} or e^{-rate |x|}

  double operator()(const Vec3& x) const {
    const double r = norm(x);
    return kind == Kind::gaussian ? std::exp(-rate * r * r) : std::exp(-rate * r);
  }
  double norm_squared() const {
    return kind == Kind::gaussian ? std::pow(pi / (2.0 * rate), 1.5) : pi / std::pow(rate, 3);
  }
  double gradient_norm_squared() const {
    return kind == Kind::gaussian ? 3.0 * rate * std::pow(pi / (2.0 * rate), 1.5) : pi / rate;
  }
};

struct TraceCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double norm = 0.0;
  double gradient_norm = 0.0;
  bool passed = false;
};

/**
 * ||T_R f||_{L^2(S^2 x R^{3N-3})} <= R^{-1} (||grad f|| + ||f||) for a product
 * sample; the boundary integral uses a sphere rule, the spectator norms are
 * closed-form.
 */
inline TraceCheck trace_inequality_check(const std::vector<SampleFactor>& factors, double R) {
  if (factors.empty()) throw DimensionError("trace_inequality_check: need at least one factor");
  if (!(R > 0.0)) throw DomainError("trace_inequality_check: R must be > 0");
  for (const auto& f : factors)
    if (!(f.rate > 0.0)) throw DomainError("trace_inequality_check: rates must be positive");
  const SphereRule rule = SphereRule::product(8, 16);
  double boundary = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) boundary += rule.weights[k] * std::pow(factors[0](R * rule.points[k]), 2);
  double others = 1.0, norm2 = 1.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    norm2 *= factors[j].norm_squared();
    if (j > 0) others *= factors[j].norm_squared();
  }
  double grad2 = 0.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    double term = factors[j].gradient_norm_squared();
    for (std::size_t k = 0; k < factors.size(); ++k)
      if (k != j) term *= factors[k].norm_squared();
    grad2 += term;
  }
  TraceCheck t;
  t.lhs = std::sqrt(boundary * others);
  t.norm = std::sqrt(norm2);
  t.gradient_norm = std::sqrt(grad2);
  t.rhs = (t.gradient_norm + t.norm) / R;
  t.passed = t.lhs <= t.rhs;
  return t;
}

/// |E_R phi(r w)| <= (R/r) sum_lm |Y_lm(w)| sum_i |c_{lm,i}| since |f_{l,k,R}| <= R/r.
inline double extension_envelope(const BoundaryFunction& b, double R, double r, const Vec3& w) {
  const auto y = real_ylm_all(b.lmax, w);
  double acc = 0.0;
  for (int lm = 0; lm < lm_count(b.lmax); ++lm)
    for (std::size_t i = 0; i < b.inner(); ++i) acc += std::abs(y[lm]) * std::abs(b.coeff(lm, i));
  return (R / r) * acc;
}

}  // namespace rholab
