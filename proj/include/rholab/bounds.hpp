// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bounds.hpp
 * @brief Certificates for the density inequalities: the origin lower bound
 * from the quadratic R(alpha), decay-rate fits and the exponential sandwich,
 * the threshold cap, the classical upper envelope, the global lower envelope
 * and the two shell-ratio constant scans.
 *
 * Every verdict is a comparison between numbers stored in the returned
 * struct, so a serialized certificate can be re-checked without the model.
 */

#pragma once

#include <boost/math/tools/minima.hpp>

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rholab/density.hpp"
#include "rholab/wavefunction.hpp"

namespace rholab {

// ---------------------------------------------------------------------------
// Origin certificate
// ---------------------------------------------------------------------------

enum class CertificateStatus { certified, diagnostic, degenerate };

inline const char* to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::certified: return "certified";
    case CertificateStatus::diagnostic: return "diagnostic";
    default: return "degenerate";
  }
}

/**
 * R(alpha) = A + B alpha + C alpha^2 with A = 2 pi Z rho(0), B = -4 P^2,
 * C = 3 N ||psi||^2 and P = ||sum_j grad_j psi||. Nonnegativity of R for
 * ground states gives rho(0) >= 2 P^4 / (3 pi Z N ||psi||^2).
 */
struct OriginCertificate {
  double rho0 = 0.0;
  double rho0_stderr = 0.0;
  double psq = 0.0;
  double psq_stderr = 0.0;
  double norm_sq = 0.0;
  double Z = 0.0;
  int N = 0;
  double A = 0.0, B = 0.0, C = 0.0;
  double alpha_star = 0.0;
  double lower_bound = 0.0;
  CertificateStatus status = CertificateStatus::diagnostic;
  bool passed = false;

  double minimum() const { return A - B * B / (4.0 * C); }
};

/// Fills the derived fields from (rho0, psq, norm_sq, Z, N).
inline OriginCertificate complete_certificate(OriginCertificate c) {
  c.A = 2.0 * pi * c.Z * c.rho0;
  c.B = -4.0 * c.psq;
  c.C = 3.0 * c.N * c.norm_sq;
  c.alpha_star = -c.B / (2.0 * c.C);
  c.lower_bound = 2.0 * c.psq * c.psq / (3.0 * pi * c.Z * c.N * c.norm_sq);
  if (c.psq <= 0.0) c.status = CertificateStatus::degenerate;
  c.passed = c.rho0 >= c.lower_bound;
  return c;
}

/// True for the models whose R(alpha) >= 0 is a theorem (one-body ground states).
inline bool is_exact_ground_state(const WavefunctionModel& model) {
  if (const auto* h = model.as<Hydrogenic>()) return h->n == 1;
  return false;
}

/**
 * Builds the certificate. P^2 and ||psi||^2 are closed-form unless method is
 * monteCarlo; the nuclear charge comes from the model or its metadata.
 */
inline OriginCertificate origin_certificate(const WavefunctionModel& model, Method method,
                                            const McConfig& cfg = {}) {
  const auto z = nuclear_charge(model);
  if (!z || !(*z > 0.0)) throw DomainError("origin_certificate: model has no positive nuclear charge");
  OriginCertificate c;
  c.Z = *z;
  c.N = model.electrons();
  const Estimate rho0 = density_total(model, {0.0, 0.0, 0.0}, method, cfg, 41);
  c.rho0 = rho0.value;
  c.rho0_stderr = rho0.std_error;
  const Estimate p2 = method == Method::monteCarlo ? translation_gradient_norm_squared_mc(model, cfg)
                                                   : translation_gradient_norm_squared(model);
  c.psq = p2.value;
  c.psq_stderr = p2.std_error;
  c.norm_sq = norm_squared(model).value;
  c.status = is_exact_ground_state(model) ? CertificateStatus::certified : CertificateStatus::diagnostic;
  return complete_certificate(c);
}

inline double r_alpha_eval(const OriginCertificate& c, double alpha) {
  return c.A + c.B * alpha + c.C * alpha * alpha;
}

struct RAlphaScan {
  double alpha = 0.0;
  double value = 0.0;
};

/// Minimum of R over [lo, hi]: dense sampling, then Brent refinement.
inline RAlphaScan r_alpha_min_scan(const OriginCertificate& c, double lo = -10.0, double hi = 10.0,
                                   int samples = 2001) {
  if (!(hi > lo) || samples < 3) throw DomainError("r_alpha_min_scan: invalid interval");
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double a = lo + (hi - lo) * i / (samples - 1);
    const double v = r_alpha_eval(c, a);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double step = (hi - lo) / (samples - 1);
  const double a = std::max(lo, lo + (best - 1) * step), b = std::min(hi, lo + (best + 1) * step);
  const auto [am, vm] =
      boost::math::tools::brent_find_minima([&](double x) { return r_alpha_eval(c, x); }, a, b, 52);
  if (vm < best_v) return {am, vm};
  return {lo + best * step, best_v};
}

/// sqrt|E|, the cap on alpha0 from the ionization thresholds.
inline double alpha0_threshold_cap(double energy) {
  if (!(energy < 0.0)) throw DomainError("alpha0_threshold_cap: energy must be negative");
  return std::sqrt(-energy);
}

// ---------------------------------------------------------------------------
// Decay fits
// ---------------------------------------------------------------------------

/**
 * logLinear: ln rho_tilde = c + b r.
 * asymptotic: ln rho_tilde = c + b r + p ln r + q / r, which absorbs the
 * algebraic prefactors r^p (1 + O(1/r)) that bias a two-parameter fit on a
 * finite window.
 */
enum class FitBasis { logLinear, asymptotic };

inline const char* to_string(FitBasis b) { return b == FitBasis::logLinear ? "logLinear" : "asymptotic"; }

inline FitBasis fit_basis_from_string(const std::string& s) {
  if (s == "logLinear") return FitBasis::logLinear;
  if (s == "asymptotic") return FitBasis::asymptotic;
  throw DomainError("unknown fit basis '" + s + "'");
}

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of ln-residuals
  double r1 = 0.0, r2 = 0.0;
  std::size_t points = 0;
  FitBasis basis = FitBasis::asymptotic;
};

struct Window {
  double r1 = 0.0, r2 = 0.0;
};

/// Last 40% of the grid, widened to hold at least 8 points.
inline Window default_window(const std::vector<double>& grid) {
  if (grid.size() < 8) throw DomainError("default_window: grid has fewer than 8 points");
  const double a = grid.front(), b = grid.back();
  double r1 = b - 0.4 * (b - a);
  const std::size_t n_in = static_cast<std::size_t>(
      grid.end() - std::lower_bound(grid.begin(), grid.end(), r1));
  if (n_in < 8) r1 = grid[grid.size() - 8];
  return {r1, b};
}

/// Least-squares fit of samples (x_i, y_i = ln value_i).
inline DecayFit fit_log_samples(std::span<const double> x, std::span<const double> y, FitBasis basis) {
  const std::size_t n = x.size();
  if (n < 8) throw DomainError("decay_fit: need at least 8 points in the window");
  DecayFit f;
  f.points = n;
  f.basis = basis;
  f.r1 = x.front();
  f.r2 = x.back();
  if (basis == FitBasis::logLinear) {
    const LineFit l = fit_line(x, y);
    f.slope = l.slope;
    f.intercept = l.intercept;
    f.residual = l.residual;
    return f;
  }
  if (!(x.front() > 0.0)) throw DomainError("decay_fit: asymptotic basis needs r > 0");
  // Columns centred/scaled for conditioning; the slope is undone afterwards.
  const double mid = 0.5 * (x.front() + x.back()), half = std::max(0.5 * (x.back() - x.front()), 1e-12);
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = (x[i] - mid) / half;
    a(i, 2) = std::log(x[i] / mid);
    a(i, 3) = mid / x[i] - 1.0;
    rhs(i) = y[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
  f.slope = c(1) / half;
  f.intercept = c(0) - c(1) * mid / half;  // value of the (r, 1) part at r = 0
  const Eigen::VectorXd res = a * c - rhs;
  f.residual = std::sqrt(res.squaredNorm() / static_cast<double>(n));
  return f;
}

/// Decay fit of ln rho_tilde over the grid points inside [r1, r2].
inline DecayFit decay_fit(const RadialDensityProfile& p, Window w, FitBasis basis = FitBasis::asymptotic) {
  p.validate();
  if (!(w.r2 > w.r1)) throw DomainError("decay_fit: window needs r1 < r2");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.grid[i] < w.r1 || p.grid[i] > w.r2) continue;
    if (!(p.values[i] > 0.0))
      throw DomainError("decay_fit: nonpositive value at r = " + format_double(p.grid[i]));
    xs.push_back(p.grid[i]);
    ys.push_back(std::log(p.values[i]));
  }
  return fit_log_samples(xs, ys, basis);
}

// ---------------------------------------------------------------------------
// Sandwich certificate
// ---------------------------------------------------------------------------

/**
 * Rates of rho_tilde against the band [-2 sqrt(N) alpha0, -2 alpha0]. The
 * shell rate is the same fit applied to int_R^inf rho_tilde r^2 dr.
 */
struct DecayCertificate {
  double fitted_rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  double shell_rate = 0.0;
  double shell_residual = 0.0;
  double shell_tolerance = 0.0;
  double alpha0 = 0.0;
  int N = 1;
  double upper_env_rate = 0.0;
  double lower_env_rate = 0.0;
  std::optional<double> energy;
  std::optional<double> threshold_cap;
  std::optional<double> epsilon;
  Window window;
  FitBasis basis = FitBasis::asymptotic;
  bool sandwich_passed = false;
  bool shell_passed = false;
  std::optional<bool> cap_passed;  // alpha0 <= sqrt|E|
  double band_position = 0.0;      // 0 at the lower edge, 1 at the upper edge
};

inline double sandwich_tolerance(double residual) { return 3.0 * residual + 1e-3; }

/// Re-derives every verdict from the stored numbers.
inline DecayCertificate recompute(DecayCertificate c) {
  c.upper_env_rate = -2.0 * c.alpha0;
  c.lower_env_rate = -2.0 * std::sqrt(static_cast<double>(c.N)) * c.alpha0;
  c.tolerance = sandwich_tolerance(c.residual);
  c.shell_tolerance = sandwich_tolerance(c.shell_residual);
  c.sandwich_passed =
      c.lower_env_rate - c.tolerance <= c.fitted_rate && c.fitted_rate <= c.upper_env_rate + c.tolerance;
  c.shell_passed = c.lower_env_rate - c.shell_tolerance <= c.shell_rate &&
                   c.shell_rate <= c.upper_env_rate + c.shell_tolerance;
  const double width = c.upper_env_rate - c.lower_env_rate;
  c.band_position = width > 0.0 ? (c.fitted_rate - c.lower_env_rate) / width : 1.0;
  if (c.energy) {
    c.threshold_cap = alpha0_threshold_cap(*c.energy);
    c.cap_passed = c.alpha0 <= *c.threshold_cap * (1.0 + 1e-12);
  }
  return c;
}

inline DecayCertificate sandwich_check(const RadialDensityProfile& p, double alpha0, int N, Window w,
                                       FitBasis basis = FitBasis::asymptotic,
                                       std::optional<double> energy = std::nullopt,
                                       std::optional<double> epsilon = std::nullopt) {
  if (!(alpha0 > 0.0)) throw DomainError("sandwich_check: alpha0 must be positive");
  if (N < 1) throw DomainError("sandwich_check: N must be >= 1");
  const DecayFit fit = decay_fit(p, w, basis);
  const auto shells = shell_integrals(p);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.grid[i] >= w.r1 && p.grid[i] <= w.r2 && shells[i] > 0.0) {
      xs.push_back(p.grid[i]);
      ys.push_back(std::log(shells[i]));
    }
  const DecayFit shell = fit_log_samples(xs, ys, basis);
  DecayCertificate c;
  c.fitted_rate = fit.slope;
  c.intercept = fit.intercept;
  c.residual = fit.residual;
  c.shell_rate = shell.slope;
  c.shell_residual = shell.residual;
  c.alpha0 = alpha0;
  c.N = N;
  c.energy = energy;
  c.epsilon = epsilon;
  c.window = w;
  c.basis = basis;
  return recompute(c);
}

// ---------------------------------------------------------------------------
// Classical upper envelope and global lower envelope
// ---------------------------------------------------------------------------

/// r -> C r^{(Z - (N - 1)) / sqrt(eps)} e^{-2 sqrt(eps) r}, claimed for r >= r0.
struct ClassicalEnvelope {
  double Z = 1.0;
  int N = 1;
  double epsilon = 1.0;
  double C = 1.0;
  double r0 = 1.0;

  double exponent() const { return (Z - (N - 1)) / std::sqrt(epsilon); }
  double shape(double r) const { return std::pow(r, exponent()) * std::exp(-2.0 * std::sqrt(epsilon) * r); }
  double operator()(double r) const { return C * shape(r); }
};

inline ClassicalEnvelope classical_upper_envelope(double Z, int N, double epsilon, double C, double r0) {
  if (!(epsilon > 0.0)) throw DomainError("classical_upper_envelope: epsilon must be positive");
  if (!(r0 > 0.0)) throw DomainError("classical_upper_envelope: r0 must be positive");
  if (N < 1) throw DomainError("classical_upper_envelope: N must be >= 1");
  return {Z, N, epsilon, C, r0};
}

struct EnvelopeCheck {
  double required_C = 0.0;  // smallest C for which the samples lie below
  double given_C = 0.0;
  std::size_t points = 0;
  bool passed = false;
};

/// Compares density samples rho(r_i) with the envelope for r_i >= r0.
inline EnvelopeCheck envelope_check(const ClassicalEnvelope& env, std::span<const double> r,
                                    std::span<const double> rho) {
  if (r.size() != rho.size()) throw DimensionError("envelope_check: sample length mismatch");
  EnvelopeCheck out;
  out.given_C = env.C;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < env.r0) continue;
    ++out.points;
    const double s = env.shape(r[i]);
    const double need = s > 0.0 ? rho[i] / s : (rho[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.required_C = std::max(out.required_C, need);
  }
  if (out.points == 0) throw DomainError("envelope_check: no samples with r >= r0");
  out.passed = out.required_C <= env.C;
  return out;
}

/// Pointwise rho samples for the envelope: max of rho over a sphere rule at each radius.
inline EnvelopeCheck envelope_check(const ClassicalEnvelope& env, const WavefunctionModel& model,
                                    const std::vector<double>& grid) {
  const Method method = default_method(model);
  const SphereRule sphere = radially_symmetric(model) ? SphereRule{{{0, 0, 1}}, {4.0 * pi}}
                                                      : SphereRule::product(8, 16);
  std::vector<double> rho = parallel_map(grid.size(), [&](std::size_t i) {
    double m = 0.0;
    for (const auto& w : sphere.points) m = std::max(m, density_total(model, grid[i] * w, method).value);
    return m;
  });
  return envelope_check(env, grid, rho);
}

struct GlobalLowerCheck {
  double c = 0.0;           // min over r >= r0 of rho_tilde e^{2 sqrt(N) alpha r}
  double tail_slope = 0.0;  // slope of ln(rho_tilde e^{2 sqrt(N) alpha r}) on the last 40%
  double tolerance = 0.0;
  double alpha = 0.0;
  int N = 1;
  double r0 = 0.0;
  bool passed = false;
};

/**
 * rho_tilde(r) >= c e^{-2 sqrt(N) alpha r} for r >= r0. On a finite grid c is
 * always positive, so the verdict also requires that the ratio does not decay
 * at the end of the grid (else c -> 0 as the grid grows). Callers choose
 * alpha above the decay rate alpha0 of the model.
 */
inline GlobalLowerCheck global_lower_check(const RadialDensityProfile& p, double alpha, int N, double r0) {
  p.validate();
  if (!(alpha > 0.0)) throw DomainError("global_lower_check: alpha must be positive");
  GlobalLowerCheck g;
  g.alpha = alpha;
  g.N = N;
  g.r0 = r0;
  const double k = 2.0 * std::sqrt(static_cast<double>(N)) * alpha;
  std::vector<double> xs, ys;
  g.c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.grid[i] < r0) continue;
    if (!(p.values[i] > 0.0))
      throw DomainError("global_lower_check: zero profile value at r = " + format_double(p.grid[i]));
    g.c = std::min(g.c, p.values[i] * std::exp(k * p.grid[i]));
    xs.push_back(p.grid[i]);
    ys.push_back(std::log(p.values[i]) + k * p.grid[i]);
  }
  if (xs.size() < 2) throw DomainError("global_lower_check: fewer than 2 grid points beyond r0");
  const std::size_t m = std::max<std::size_t>(2, (xs.size() * 2) / 5);
  const LineFit tail = fit_line(std::span<const double>(xs).last(m), std::span<const double>(ys).last(m));
  g.tail_slope = tail.slope;
  g.tolerance = sandwich_tolerance(tail.residual);
  g.passed = g.c > 0.0 && g.tail_slope >= -g.tolerance;
  return g;
}

// ---------------------------------------------------------------------------
// Shell-ratio constant scans
// ---------------------------------------------------------------------------

struct ConstantScan {
  double constant = 0.0;  // supremum over the scanned radii (+inf when unbounded)
  double argsup = 0.0;
  double r_min = 0.0, r_max = 0.0;
  std::size_t points = 0;
  bool passed = false;  // finite supremum
  std::string note;
};

/**
 * sup over grid radii R in [r_min, r_max] of rho_tilde(R) R^2 / int_{R-1}^inf
 * rho_tilde r^2 dr. A vanishing tail makes the ratio unbounded and fails.
 */
inline ConstantScan lemmaA_constant(const RadialDensityProfile& p, double r_min = 2.0,
                                    double r_max = std::numeric_limits<double>::infinity()) {
  p.validate();
  ConstantScan s;
  s.r_min = std::max(r_min, p.grid.front() + 1.0);
  s.r_max = std::min(r_max, p.grid.back());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.grid[i] >= s.r_min && p.grid[i] <= s.r_max) idx.push_back(i);
  if (idx.empty()) throw DomainError("lemmaA_constant: grid does not cover the scan range");
  const auto ratios = parallel_map(idx.size(), [&](std::size_t k) {
    const double R = p.grid[idx[k]];
    const double tail = shell_integral(p, R - 1.0);
    if (!(tail > 0.0)) return std::numeric_limits<double>::infinity();
    return p.values[idx[k]] * R * R / tail;
  });
  s.points = idx.size();
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (ratios[k] > s.constant) {
      s.constant = ratios[k];
      s.argsup = p.grid[idx[k]];
    }
  s.passed = std::isfinite(s.constant);
  if (!s.passed) s.note = "tail integral vanishes at R = " + format_double(s.argsup);
  return s;
}

/**
 * sup over grid radii R >= r_min of int_R^inf rho_tilde r^2 dr / (R^3
 * rho_tilde(R)). Raises when rho_tilde vanishes at a scanned radius.
 */
inline ConstantScan lemmaC_constant(const RadialDensityProfile& p, double r_min = 2.0,
                                    double r_max = std::numeric_limits<double>::infinity()) {
  p.validate();
  ConstantScan s;
  s.r_min = std::max(r_min, p.grid.front());
  s.r_max = std::min(r_max, p.grid.back());
  const auto shells = shell_integrals(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double R = p.grid[i];
    if (R < s.r_min || R > s.r_max) continue;
    if (!(p.values[i] > 0.0)) throw DomainError("lemmaC_constant: rho_tilde vanishes at R = " + format_double(R));
    if (!(R > 0.0)) continue;
    ++s.points;
    const double ratio = shells[i] / (R * R * R * p.values[i]);
    if (ratio > s.constant) {
      s.constant = ratio;
      s.argsup = R;
    }
  }
  if (s.points == 0) throw DomainError("lemmaC_constant: grid does not cover the scan range");
  s.passed = std::isfinite(s.constant);
  return s;
}

}  // namespace rholab
