// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "rholab/bounds.hpp"

namespace rholab {
namespace {

const WavefunctionModel psi1 = WavefunctionModel::separable({1.0, 2.0});
const WavefunctionModel psi2 = WavefunctionModel::rotated_pair(1.0, 1.0);
const WavefunctionModel hyd = WavefunctionModel::hydrogenic(2.0);

RadialDensityProfile synthetic(const std::function<double(double)>& f, double a, double b, std::size_t n,
                               int electrons = 1) {
  RadialDensityProfile p;
  p.grid = make_grid(a, b, n);
  for (double r : p.grid) {
    p.values.push_back(f(r));
    p.stderr_.push_back(0.0);
  }
  p.electrons = electrons;
  p.norm_squared = 1.0;
  return p;
}

RadialDensityProfile analytic_profile(const WavefunctionModel& m, double rmax = 30.0, std::size_t n = 601) {
  return profile(m, make_grid(0.0, rmax, n), Method::analytic);
}

TEST(Origin, HydrogenicCertificate) {
  const auto c = origin_certificate(hyd, Method::analytic);
  EXPECT_NEAR(c.rho0, 1.0, 1e-14);
  EXPECT_NEAR(c.psq, pi, 1e-12);
  EXPECT_NEAR(c.norm_sq, pi, 1e-12);
  EXPECT_NEAR(c.lower_bound, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(c.alpha_star, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(c.A, 4 * pi, 1e-12);
  EXPECT_NEAR(c.B, -4 * pi, 1e-12);
  EXPECT_NEAR(c.C, 3 * pi, 1e-12);
  EXPECT_NEAR(r_alpha_eval(c, 2.0 / 3.0), 8 * pi / 3, 1e-12);
  EXPECT_NEAR(r_alpha_eval(c, 2.0 / 3.0), 8.3776, 1e-4);
  EXPECT_NEAR(r_alpha_eval(c, 0.0), 2 * pi * 2.0 * 1.0, 1e-12);
  EXPECT_EQ(c.status, CertificateStatus::certified);
  EXPECT_TRUE(c.passed);
  const auto scan = r_alpha_min_scan(c);
  EXPECT_GE(scan.value, -1e-12);
  EXPECT_NEAR(scan.alpha, 2.0 / 3.0, 1e-6);
}

TEST(Origin, OtherHydrogenicChargesPass) {
  for (double z : {0.5, 1.0, 3.0, 7.0}) {
    const auto c = origin_certificate(WavefunctionModel::hydrogenic(z), Method::analytic);
    EXPECT_TRUE(c.passed) << z;
    EXPECT_GE(c.minimum(), -1e-12 * c.A) << z;
  }
}

TEST(Origin, SymmetricProductMatchesClosedFormAndMonteCarlo) {
  // prod_j e^{-a |x_j|}: P^2 = N a^2 ||psi||^2, so alpha* = 2a^2 / 3.
  const double a = 1.5;
  Metadata meta;
  meta.nuclear_charge = 2.0;
  const auto m = WavefunctionModel::separable({a, a}, meta);
  const auto c = origin_certificate(m, Method::analytic);
  EXPECT_EQ(c.status, CertificateStatus::diagnostic);
  EXPECT_NEAR(c.psq, 2 * a * a * c.norm_sq, 1e-10 * c.psq);
  EXPECT_NEAR(c.alpha_star, 2 * a * a / 3, 1e-12);
  McConfig cfg;
  cfg.samples = 400000;
  cfg.seed = 9;
  const auto mc = origin_certificate(m, Method::monteCarlo, cfg);
  EXPECT_LT(std::abs(mc.psq - c.psq), 4 * mc.psq_stderr);
  EXPECT_LT(std::abs(mc.rho0 - c.rho0), 4 * mc.rho0_stderr + 1e-12);
}

TEST(Origin, Errors) {
  EXPECT_THROW(origin_certificate(psi1, Method::analytic), DomainError);
  EXPECT_THROW(alpha0_threshold_cap(0.0), DomainError);
  EXPECT_THROW(alpha0_threshold_cap(0.5), DomainError);
}

TEST(Origin, DegenerateStatusWithoutCrash) {
  OriginCertificate c;
  c.rho0 = 1.0;
  c.psq = 0.0;
  c.norm_sq = 1.0;
  c.Z = 1.0;
  c.N = 1;
  c = complete_certificate(c);
  EXPECT_EQ(c.status, CertificateStatus::degenerate);
  EXPECT_EQ(c.lower_bound, 0.0);
}

// Quadratic structure on random certificates.
TEST(OriginProperty, QuadraticStructure) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int t = 0; t < 500; ++t) {
    OriginCertificate c;
    c.rho0 = u(rng);
    c.psq = u(rng);
    c.norm_sq = u(rng);
    c.Z = u(rng);
    c.N = 1 + t % 5;
    c = complete_certificate(c);
    EXPECT_GT(c.A, 0.0);
    EXPECT_GT(c.C, 0.0);
    EXPECT_LE(c.B, 0.0);
    EXPECT_NEAR(c.alpha_star, -c.B / (2 * c.C), 1e-14 * c.alpha_star);
    const double alpha = u(rng) - 2.5;
    EXPECT_NEAR(r_alpha_eval(c, alpha), c.A + c.B * alpha + c.C * alpha * alpha, 1e-12 * (c.A + c.C));
    EXPECT_NEAR(r_alpha_eval(c, c.alpha_star), c.minimum(), 1e-11 * (c.A + c.C));
    EXPECT_GE(r_alpha_eval(c, c.alpha_star + 0.1), c.minimum());
    EXPECT_GE(r_alpha_eval(c, c.alpha_star - 0.1), c.minimum());
    // The minimum is nonnegative exactly when rho0 clears the bound.
    const double rel = c.minimum() / c.A;
    if (std::abs(rel) > 1e-12) EXPECT_EQ(rel >= 0.0, c.passed) << t;
  }
}

TEST(OriginProperty, ScalingCovariance) {
  const auto base = origin_certificate(hyd, Method::analytic);
  for (double lambda : {0.1, 3.0, 17.0}) {
    const auto c = origin_certificate(hyd.scaled(lambda), Method::analytic);
    const double l2 = lambda * lambda;
    EXPECT_NEAR(c.rho0, l2 * base.rho0, 1e-12 * l2);
    EXPECT_NEAR(c.psq, l2 * base.psq, 1e-11 * l2);
    EXPECT_NEAR(c.norm_sq, l2 * base.norm_sq, 1e-11 * l2);
    EXPECT_NEAR(c.A, l2 * base.A, 1e-11 * l2);
    EXPECT_NEAR(c.B, l2 * base.B, 1e-11 * l2);
    EXPECT_NEAR(c.C, l2 * base.C, 1e-11 * l2);
    EXPECT_NEAR(c.alpha_star, base.alpha_star, 1e-12);
    EXPECT_NEAR(c.lower_bound / c.rho0, base.lower_bound / base.rho0, 1e-12);
    EXPECT_EQ(c.passed, base.passed);
  }
}

TEST(ThresholdCap, Values) {
  EXPECT_DOUBLE_EQ(alpha0_threshold_cap(-1.0), 1.0);
  EXPECT_DOUBLE_EQ(alpha0_threshold_cap(-0.25), 0.5);
  // Hydrogenic Z = 2: alpha0 = 1 = sqrt|E|.
  EXPECT_NEAR(alpha0_threshold_cap(*energy_of(hyd)), analytic_alpha0(hyd), 1e-15);
}

TEST(DecayFit, ExampleSlopes) {
  const Window w{10.0, 20.0};
  EXPECT_NEAR(decay_fit(analytic_profile(psi1), w).slope, -2.0, 1e-3);
  EXPECT_NEAR(decay_fit(analytic_profile(psi2), w).slope, -2 * std::sqrt(2.0), 2e-2);
  const auto pure = synthetic([](double r) { return 3.0 * std::exp(-2 * r); }, 0.0, 30.0, 301);
  for (FitBasis b : {FitBasis::logLinear, FitBasis::asymptotic}) {
    const auto f = decay_fit(pure, w, b);
    EXPECT_NEAR(f.slope, -2.0, 1e-10);
    EXPECT_LT(f.residual, 1e-12);
  }
  EXPECT_NEAR(decay_fit(pure, w, FitBasis::logLinear).intercept, std::log(3.0), 1e-10);
}

TEST(DecayFit, AsymptoticBasisRemovesPowerBias) {
  // r^2 e^{-2r}: the two-parameter fit is biased by 2/r; the four-parameter fit is exact.
  const auto p = synthetic([](double r) { return r * r * std::exp(-2 * r); }, 0.0, 30.0, 301);
  EXPECT_GT(std::abs(decay_fit(p, {10, 20}, FitBasis::logLinear).slope + 2.0), 0.05);
  EXPECT_NEAR(decay_fit(p, {10, 20}, FitBasis::asymptotic).slope, -2.0, 1e-9);
}

TEST(DecayFit, Errors) {
  const auto p = synthetic([](double r) { return r < 15 ? std::exp(-r) : 0.0; }, 0.0, 30.0, 301);
  EXPECT_THROW(decay_fit(p, {10, 20}), DomainError);
  EXPECT_THROW(decay_fit(p, {10, 10.5}), DomainError);
  EXPECT_THROW(decay_fit(p, {12, 11}), DomainError);
  const auto w = default_window(make_grid(0, 30, 601));
  EXPECT_DOUBLE_EQ(w.r1, 18.0);
  EXPECT_DOUBLE_EQ(w.r2, 30.0);
  EXPECT_DOUBLE_EQ(default_window(make_grid(0, 1, 10)).r1, make_grid(0, 1, 10)[2]);
}

TEST(Sandwich, ExampleModels) {
  const Window w{10.0, 20.0};
  const auto c1 = sandwich_check(analytic_profile(psi1), 1.0, 2, w);
  EXPECT_NEAR(c1.upper_env_rate, -2.0, 1e-15);
  EXPECT_NEAR(c1.lower_env_rate, -2 * std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(c1.sandwich_passed);
  EXPECT_TRUE(c1.shell_passed);
  EXPECT_NEAR(c1.band_position, 1.0, 5e-3);
  const auto c2 = sandwich_check(analytic_profile(psi2), 1.0, 2, w);
  EXPECT_TRUE(c2.sandwich_passed);
  EXPECT_TRUE(c2.shell_passed);
  EXPECT_NEAR(c2.band_position, 0.0, 3e-2);
}

TEST(Sandwich, ConstructedViolation) {
  const auto p = synthetic([](double r) { return std::exp(-5 * r); }, 0.0, 30.0, 301, 2);
  const auto c = sandwich_check(p, 1.0, 2, {10, 20});
  EXPECT_NEAR(c.fitted_rate, -5.0, 1e-8);
  EXPECT_FALSE(c.sandwich_passed);
  EXPECT_FALSE(c.shell_passed);
  EXPECT_LT(c.band_position, 0.0);
  EXPECT_THROW(sandwich_check(p, 0.0, 2, {10, 20}), DomainError);
  EXPECT_THROW(sandwich_check(p, 1.0, 0, {10, 20}), DomainError);
}

TEST(Sandwich, VerdictsRederiveFromStoredNumbers) {
  auto c = sandwich_check(analytic_profile(psi1), 1.0, 2, {10, 20}, FitBasis::asymptotic, -1.25);
  ASSERT_TRUE(c.cap_passed.has_value());
  EXPECT_TRUE(*c.cap_passed);
  EXPECT_EQ(recompute(c).sandwich_passed, c.sandwich_passed);
  c.fitted_rate = -1.5;
  EXPECT_FALSE(recompute(c).sandwich_passed);
  c.alpha0 = 2.0;
  c.energy = -1.0;
  EXPECT_FALSE(*recompute(c).cap_passed);
  EXPECT_LE(recompute(c).lower_env_rate, recompute(c).upper_env_rate);
}

// For N = 1 both envelopes coincide and the cap is tight.
TEST(SandwichProperty, HydrogenicCapSaturation) {
  for (double z : {1.0, 2.0, 3.0}) {
    const auto m = WavefunctionModel::hydrogenic(z);
    const auto p = analytic_profile(m, 30.0 / z, 601);
    const auto c = sandwich_check(p, analytic_alpha0(m), 1, default_window(p.grid), FitBasis::asymptotic,
                                  energy_of(m));
    EXPECT_NEAR(std::abs(c.fitted_rate), 2 * std::sqrt(-*energy_of(m)), 1e-2) << z;
    EXPECT_TRUE(c.sandwich_passed);
    EXPECT_TRUE(*c.cap_passed);
  }
}

TEST(SandwichProperty, GeneralAnglesStayInBand) {
  for (double angle : {0.2, 0.5, 0.9}) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    const auto m = WavefunctionModel::mixed({cs, sn, -sn, cs}, {1.0, 1.0});
    const auto c = sandwich_check(analytic_profile(m), analytic_alpha0(m), 2, {10, 20});
    EXPECT_TRUE(c.sandwich_passed) << angle << " " << c.fitted_rate;
  }
}

TEST(Envelope, HydrogenicHoldsBeyondR0) {
  const auto env = classical_upper_envelope(2.0, 1, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(env.exponent(), 2.0);
  const auto grid = make_grid(0.0, 20.0, 201);
  const auto check = envelope_check(env, hyd, grid);
  EXPECT_TRUE(check.passed);
  EXPECT_NEAR(check.required_C, 1.0, 1e-12);
  // Near the origin the same C fails.
  const auto inner = envelope_check(classical_upper_envelope(2.0, 1, 1.0, 1.0, 0.5), hyd, grid);
  EXPECT_FALSE(inner.passed);
  EXPECT_NEAR(inner.required_C, 4.0, 1e-12);
}

TEST(Envelope, LargeEpsilonFails) {
  const auto grid = make_grid(0.0, 20.0, 201);
  double prev = 0.0;
  for (double eps : {1.0, 2.0, 4.0, 9.0}) {
    const auto check = envelope_check(classical_upper_envelope(2.0, 1, eps, 1.0, 1.0), hyd, grid);
    EXPECT_GT(check.required_C, prev);
    prev = check.required_C;
    if (eps > 1.0) EXPECT_FALSE(check.passed);
  }
  EXPECT_THROW(classical_upper_envelope(2.0, 1, 0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(classical_upper_envelope(2.0, 1, 1.0, 1.0, 0.0), DomainError);
}

TEST(GlobalLower, Examples) {
  const auto g1 = global_lower_check(analytic_profile(psi1), 1.01, 2, 0.0);
  EXPECT_GT(g1.c, 0.0);
  EXPECT_TRUE(g1.passed);
  const auto g2 = global_lower_check(analytic_profile(hyd), analytic_alpha0(hyd) + 0.01, 1, 0.0);
  EXPECT_TRUE(g2.passed);
  // At r = 0 the weighted profile equals the prefactor 4 pi.
  EXPECT_NEAR(g2.c, 4 * pi, 1e-12);
  const auto bad = synthetic([](double r) { return std::exp(-5 * r); }, 0.0, 30.0, 301, 2);
  const auto g3 = global_lower_check(bad, 1.0, 2, 0.0);
  EXPECT_FALSE(g3.passed);
  // c shrinks as the grid extends.
  const auto longer = synthetic([](double r) { return std::exp(-5 * r); }, 0.0, 60.0, 601, 2);
  EXPECT_LT(global_lower_check(longer, 1.0, 2, 0.0).c, g3.c * 1e-10);
  const auto zero = synthetic([](double r) { return r < 10 ? std::exp(-r) : 0.0; }, 0.0, 30.0, 301);
  EXPECT_THROW(global_lower_check(zero, 1.0, 1, 0.0), DomainError);
}

TEST(LemmaScans, ExponentialProfiles) {
  const auto pure = synthetic([](double r) { return std::exp(-2 * r); }, 0.0, 40.0, 801);
  const auto a = lemmaA_constant(pure, 2.0, 35.0);
  EXPECT_TRUE(a.passed);
  EXPECT_TRUE(std::isfinite(a.constant));
  // rho R^2 / int_{R-1} ~ 2 e^{-2} for large R.
  const double at30 = pure.values[600] * 900 / shell_integral(pure, 29.0);
  EXPECT_NEAR(at30, 2 * std::exp(-2.0), 0.1 * 2 * std::exp(-2.0));
  EXPECT_TRUE(lemmaA_constant(analytic_profile(psi1, 30.0, 1201)).passed);
  const auto c = lemmaC_constant(pure);
  EXPECT_TRUE(c.passed);
  EXPECT_TRUE(std::isfinite(c.constant));
  EXPECT_GT(c.constant, 0.0);
}

TEST(LemmaScans, CompactSupportFails) {
  const auto p = synthetic([](double r) { return r <= 10 ? std::pow(10 - r, 4) : 0.0; }, 0.0, 20.0, 401);
  const auto a = lemmaA_constant(p);
  EXPECT_FALSE(a.passed);
  EXPECT_FALSE(a.note.empty());
  EXPECT_THROW(lemmaC_constant(p), DomainError);
}

TEST(LemmaScans, GaussianTailRatioVanishes) {
  const auto p = synthetic([](double r) { return std::exp(-r * r); }, 0.0, 6.0, 601);
  const auto c = lemmaC_constant(p);
  EXPECT_TRUE(c.passed);
  // int_R^inf e^{-r^2} r^2 / (R^3 e^{-R^2}) ~ 1/(2R^2) decreases; the sup sits at the scan start.
  EXPECT_NEAR(c.argsup, 2.0, 1e-12);
  const auto& sh = shell_integrals(p);
  EXPECT_LT(sh[500] / (125 * p.values[500]), sh[200] / (8 * p.values[200]));
}

}  // namespace
}  // namespace rholab
