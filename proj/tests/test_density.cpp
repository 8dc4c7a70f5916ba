// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "rholab/density.hpp"

namespace rholab {
namespace {

const WavefunctionModel psi1 = WavefunctionModel::separable({1.0, 2.0});
const WavefunctionModel psi2 = WavefunctionModel::rotated_pair(1.0, 1.0);
const WavefunctionModel hyd = WavefunctionModel::hydrogenic(2.0);

WavefunctionModel rotated(double angle, double a1, double a2) {
  const double c = std::cos(angle), s = std::sin(angle);
  return WavefunctionModel::mixed({c, s, -s, c}, {a1, a2});
}

McConfig mc(std::size_t samples, std::uint64_t seed) {
  McConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

TEST(DensityAt, SeparableAtOrigin) {
  EXPECT_NEAR(density_at(psi1, 0, {0, 0, 0}, Method::analytic).value, pi / 8.0, 1e-15);
  EXPECT_NEAR(density_at(psi1, 1, {0, 0, 0}, Method::analytic).value, pi, 1e-15);
  EXPECT_EQ(density_at(psi1, 1, {0, 0, 0}, Method::analytic).std_error, 0.0);
}

TEST(DensityAt, HydrogenicCollapses) {
  EXPECT_NEAR(density_at(hyd, 0, {0, 0, 0}, Method::analytic).value, 1.0, 1e-15);
  EXPECT_NEAR(density_at(hyd, 0, {0.3, 0, 0.4}, Method::quadrature).value, std::exp(-1.0), 1e-15);
}

TEST(DensityAt, Errors) {
  EXPECT_THROW(density_at(psi1, 2, {0, 0, 0}, Method::analytic), DimensionError);
  EXPECT_THROW(density_at(psi1, -1, {0, 0, 0}, Method::analytic), DimensionError);
  const auto four = WavefunctionModel::separable({1, 1, 1, 1});
  EXPECT_THROW(density_at(four, 0, {0, 0, 0}, Method::quadrature), UnsupportedError);
  McConfig metro = mc(100, 1);
  metro.proposal = Proposal::metropolis;
  EXPECT_THROW(density_at(psi1, 0, {0, 0, 0}, Method::monteCarlo, metro), UnsupportedError);
  EXPECT_THROW(method_from_string("simpson"), DomainError);
}

TEST(DensityTotal, SeparableAtOrigin) {
  EXPECT_NEAR(density_total(psi1, {0, 0, 0}, Method::analytic).value, pi / 8.0 + pi, 1e-14);
  EXPECT_NEAR(density_total(psi1, {0, 0, 0}, Method::analytic).value, 3.5343, 1e-4);
}

TEST(DensityTotal, MonteCarloAgreesWithAnalytic) {
  const Vec3 x{0.6, 0.0, 0.8};
  const Estimate e = density_total(psi1, x, Method::monteCarlo, mc(1000000, 17));
  const double exact = density_total(psi1, x, Method::analytic).value;
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_LT(std::abs(e.value - exact), 3.0 * e.std_error);
}

// Quadrature is an independent oracle for the two-centre closed form.
TEST(DensityAt, MixedClosedFormMatchesQuadrature) {
  for (const auto& model : {psi2, rotated(0.3, 1.0, 2.0), rotated(1.1, 0.7, 1.3)}) {
    for (double r : {0.0, 0.4, 1.5, 4.0}) {
      const Vec3 x{0.48 * r, -0.6 * r, 0.64 * r};
      for (int j = 0; j < 2; ++j) {
        const double a = density_at(model, j, x, Method::analytic).value;
        const double q = density_at(model, j, x, Method::quadrature).value;
        EXPECT_NEAR(q, a, 1e-7 * a) << r << " " << j;
      }
    }
  }
}

TEST(DensityAt, ThreeElectronQuadratureMatchesClosedForm) {
  const auto model = WavefunctionModel::separable({1.0, 1.5, 2.0});
  const Vec3 x{0.3, 0.2, -0.1};
  for (int j = 0; j < 3; ++j) {
    const double a = density_at(model, j, x, Method::analytic).value;
    EXPECT_NEAR(density_at(model, j, x, Method::quadrature).value, a, 1e-4 * a);
  }
}

TEST(DensityAt, DeterminantGramFormulaMatchesQuadrature) {
  const auto model = build_determinant(
      {Orbital::hydrogenic(2, 1, 0, 0), Orbital::hydrogenic(2, 2, 1, 0)}, {2, 0});
  for (const Vec3& x : {Vec3{0.2, 0.1, 0.5}, Vec3{-1.0, 0.7, 0.3}}) {
    for (int j = 0; j < 2; ++j) {
      const double a = density_at(model, j, x, Method::analytic).value;
      EXPECT_NEAR(density_at(model, j, x, Method::quadrature).value, a, 1e-6 * a);
    }
  }
}

// Exchange symmetry: rho_j = rho_k when psi is (anti)symmetric under j <-> k.
TEST(DensityProperty, ExchangeSymmetry) {
  const auto det = build_determinant({Orbital::hydrogenic(2, 1, 0, 0), Orbital::slater(0.8, 2, 1, 1)}, {2, 0});
  const auto sym = WavefunctionModel::separable({1.3, 1.3});
  for (const Vec3& x : {Vec3{0.2, 0.1, 0.5}, Vec3{-1.0, 0.7, 0.3}, Vec3{0, 0, 2}}) {
    for (const auto* m : {&psi2, &det, &sym}) {
      const double a = density_at(*m, 0, x, Method::analytic).value;
      EXPECT_NEAR(density_at(*m, 1, x, Method::analytic).value, a, 1e-13 * a);
    }
    EXPECT_NEAR(density_total(sym, x, Method::analytic).value, 2 * density_at(sym, 0, x, Method::analytic).value,
                1e-15);
  }
}

TEST(SphericalAverage, SeparableAtOrigin) {
  EXPECT_NEAR(spherical_average(psi1, 0.0, Method::analytic).value, 4.5 * pi * pi, 1e-12);
  EXPECT_NEAR(spherical_average(psi1, 0.0, Method::analytic).value, 44.413, 1e-3);
  EXPECT_THROW(spherical_average(psi1, -1.0, Method::analytic), DomainError);
}

// Two-exponential structure c1 e^{-2 a1 r} + c2 e^{-2 a2 r} with c1/c2 = a1^3/a2^3.
TEST(SphericalAverage, TwoExponentialStructure) {
  const double r1 = 1.0, r2 = 3.0;
  const double v1 = spherical_average(psi1, r1, Method::analytic).value;
  const double v2 = spherical_average(psi1, r2, Method::analytic).value;
  // Solve v = c1 e^{-2 r} + c2 e^{-4 r} at the two radii.
  const double a11 = std::exp(-2 * r1), a12 = std::exp(-4 * r1), a21 = std::exp(-2 * r2), a22 = std::exp(-4 * r2);
  const double det = a11 * a22 - a12 * a21;
  const double c1 = (v1 * a22 - a12 * v2) / det, c2 = (a11 * v2 - a21 * v1) / det;
  EXPECT_NEAR(c1 / c2, 1.0 / 8.0, 1e-10);
  EXPECT_NEAR(c1, 4 * pi * pi / 8.0, 1e-10);
  // Any third radius is reproduced by the same two terms.
  EXPECT_NEAR(spherical_average(psi1, 5.0, Method::analytic).value, c1 * std::exp(-10.0) + c2 * std::exp(-20.0),
              1e-12 * c1 * std::exp(-10.0));
}

TEST(SphericalAverage, RadialModelIsFourPiRho) {
  for (const auto& m : {hyd, WavefunctionModel::hydrogenic(1.0, 2, 0, 0)})
    for (double r : {0.0, 0.7, 3.0})
      EXPECT_NEAR(spherical_average(m, r, Method::analytic).value,
                  4 * pi * density_total(m, {0, 0, r}, Method::analytic).value, 1e-15);
}

TEST(SphericalAverage, AnisotropicOrbitalUsesExactRule) {
  // |2p_z|^2 averaged over S^2 equals that of 2p_x; both are 4 pi / 3 times the radial part.
  const auto pz = WavefunctionModel::hydrogenic(1.0, 2, 1, 0), px = WavefunctionModel::hydrogenic(1.0, 2, 1, 1);
  for (double r : {0.5, 2.0})
    EXPECT_NEAR(spherical_average(pz, r, Method::analytic).value, spherical_average(px, r, Method::analytic).value,
                1e-13);
}

TEST(SphericalAverage, MonteCarloAgreesWithAnalytic) {
  for (const auto& m : {psi1, psi2}) {
    const Estimate e = spherical_average(m, 1.2, Method::monteCarlo, mc(400000, 23));
    const double exact = spherical_average(m, 1.2, Method::analytic).value;
    EXPECT_LT(std::abs(e.value - exact), 3.5 * e.std_error) << m.kind_name();
  }
}

// MC convergence: quadrupling the samples halves the stderr (within a factor 1.5).
TEST(DensityProperty, MonteCarloStderrScaling) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Estimate a = density_total(psi1, {0.5, 0, 0}, Method::monteCarlo, mc(20000, seed));
    const Estimate b = density_total(psi1, {0.5, 0, 0}, Method::monteCarlo, mc(80000, seed + 100));
    const double ratio = a.std_error / b.std_error;
    EXPECT_GT(ratio, 2.0 / 1.5) << seed;
    EXPECT_LT(ratio, 2.0 * 1.5) << seed;
  }
}

TEST(Profile, MassIdentityAnalytic) {
  const auto grid = make_grid(0.0, 40.0, 4001);
  for (const auto& m : {psi1, psi2, hyd}) {
    const auto p = profile(m, grid, Method::analytic);
    const MassCheck c = mass_check(p);
    EXPECT_TRUE(c.passed) << m.kind_name() << " " << c.integral << " vs " << c.expected;
    EXPECT_EQ(c.tolerance, 1e-8 * c.expected);
  }
  EXPECT_NEAR(mass_check(profile(psi1, grid, Method::analytic)).integral, 2 * pi * pi / 8, 2.5e-3 * pi * pi / 8);
  EXPECT_NEAR(mass_check(profile(hyd, grid, Method::analytic)).integral, pi, 1e-3 * pi);
}

TEST(Profile, MassIdentityQuadrature) {
  const auto p = profile(psi2, make_grid(0.0, 20.0, 121), Method::quadrature);
  EXPECT_EQ(p.provenance, Method::quadrature);
  const MassCheck c = mass_check(p);
  EXPECT_TRUE(c.passed) << c.integral << " vs " << c.expected;
  EXPECT_NEAR(c.tolerance, 5e-3 * c.expected, 1e-15);
}

TEST(Profile, MassIdentityMonteCarlo) {
  const auto p = profile(psi1, make_grid(0.0, 14.0, 141), Method::monteCarlo, mc(20000, 8));
  const MassCheck c = mass_check(p);
  EXPECT_GT(c.std_error, 0.0);
  EXPECT_TRUE(c.passed) << c.integral << " vs " << c.expected << " +- " << c.std_error;
}

TEST(Profile, MetropolisBinnedProfile) {
  McConfig cfg = mc(400000, 4);
  cfg.proposal = Proposal::metropolis;
  const auto det = build_determinant({Orbital::hydrogenic(2, 1, 0, 0), Orbital::hydrogenic(2, 2, 0, 0)}, {2, 0});
  const auto grid = make_grid(0.05, 12.0, 60);
  const auto p = profile(det, grid, Method::monteCarlo, cfg);
  const auto ref = profile(det, grid, Method::analytic);
  // Bulk bins agree with the closed form within a few batch-mean errors.
  for (std::size_t i = 5; i < 30; ++i)
    EXPECT_LT(std::abs(p.values[i] - ref.values[i]), 5 * p.stderr_[i] + 0.02 * ref.values[i]) << grid[i];
  const auto again = profile(det, grid, Method::monteCarlo, cfg);
  EXPECT_EQ(p.values, again.values);
}

TEST(Profile, Errors) {
  EXPECT_THROW(profile(psi1, {}, Method::analytic), DomainError);
  EXPECT_THROW(profile(psi1, {0.0, 1.0, 1.0}, Method::analytic), DomainError);
  EXPECT_THROW(make_grid(2.0, 1.0, 10), DomainError);
  EXPECT_THROW(make_grid(0.0, 1.0, 10, Spacing::log), DomainError);
  const auto p = profile(psi1, make_grid(0.5, 10.0, 50), Method::analytic);
  EXPECT_THROW(mass_check(p), DomainError);
}

TEST(Profile, LogGrid) {
  const auto g = make_grid(0.01, 10.0, 31, Spacing::log);
  EXPECT_DOUBLE_EQ(g.front(), 0.01);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
  EXPECT_NEAR(g[1] / g[0], g[2] / g[1], 1e-12);
}

// Strict positivity on every grid point for the shipped ground-state-like models.
TEST(DensityProperty, PositivityScan) {
  const auto det = build_determinant({Orbital::hydrogenic(3, 1, 0, 0), Orbital::hydrogenic(3, 2, 0, 0)}, {1, 1});
  for (const auto& m : {psi1, psi2, hyd, det}) {
    const auto p = profile(m, make_grid(0.0, 30.0, 301), Method::analytic);
    for (double v : p.values) EXPECT_GT(v, 0.0);
  }
}

TEST(ShellIntegral, Values) {
  const auto p = profile(psi1, make_grid(0.0, 30.0, 3001), Method::analytic);
  EXPECT_NEAR(shell_integral(p, 0.0), pi * pi / 4, 1e-8);
  EXPECT_NEAR(shell_integral(p, 0.0), 2.4674, 1e-4);
  double prev = shell_integral(p, 0.0);
  for (double R : {0.3, 1.0, 2.5, 5.0, 10.0, 20.0, 29.0}) {
    const double s = shell_integral(p, R);
    EXPECT_LT(s, prev);
    EXPECT_GT(s, 0.0);
    prev = s;
  }
  EXPECT_THROW(shell_integral(p, 31.0), DomainError);
}

TEST(ShellIntegral, OffGridRadiusMatchesClosedForm) {
  // int_R^inf 4pi(pi/8) e^{-2r} r^2 dr + int_R^inf 4pi pi e^{-4r} r^2 dr
  auto tail = [](double k, double R) { return std::exp(-k * R) * (R * R / k + 2 * R / (k * k) + 2 / (k * k * k)); };
  const auto p = profile(psi1, make_grid(0.0, 30.0, 3001), Method::analytic);
  for (double R : {0.123, 3.3337, 7.77}) {
    const double exact = 4 * pi * (pi / 8) * tail(2, R) + 4 * pi * pi * tail(4, R);
    EXPECT_NEAR(shell_integral(p, R), exact, 1e-8 * exact) << R;
  }
}

TEST(ShellIntegral, ExponentialRatio) {
  RadialDensityProfile p;
  p.grid = make_grid(0.0, 40.0, 801);
  for (double r : p.grid) {
    p.values.push_back(3.0 * std::exp(-2 * r));
    p.stderr_.push_back(0.0);
  }
  // The r^2 weight gives shell(R) = c e^{-2R} (R^2/2 + R/2 + 1/4); the ratio tends to e^{-2} at rate 2/R.
  auto poly = [](double R) { return R * R / 2 + R / 2 + 0.25; };
  double prev_gap = 1.0;
  for (double R : {10.0, 15.0, 25.0, 35.0}) {
    const double ratio = shell_integral(p, R + 1) / shell_integral(p, R);
    EXPECT_NEAR(ratio * poly(R) / poly(R + 1), std::exp(-2.0), 1e-2 * std::exp(-2.0)) << R;
    const double gap = std::abs(ratio / std::exp(-2.0) - 1.0);
    EXPECT_LT(gap, prev_gap);
    EXPECT_LT(gap, 2.5 / R);
    prev_gap = gap;
  }
  // The log slope of the shell integral converges to the density rate.
  EXPECT_NEAR(std::log(shell_integral(p, 36.0) / shell_integral(p, 35.0)), -2.0, 0.06);
}

TEST(Hypersphere, OneElectronExact) {
  for (double R : {0.0, 0.5, 3.0}) {
    const Estimate e = hypersphere_average(hyd, R, mc(1000, 1));
    EXPECT_NEAR(e.value, 4 * pi * std::exp(-2 * R), 1e-13);
    EXPECT_NEAR(e.std_error, 0.0, 1e-13);
  }
}

TEST(Hypersphere, OriginIsAreaTimesPsiZero) {
  EXPECT_NEAR(hypersphere_average(psi1, 0.0, mc(100, 2)).value, sphere_area(6), 1e-12);
}

TEST(Hypersphere, LogSlopeIsMinusTwoAlpha0) {
  const auto model = WavefunctionModel::separable({1.0, 1.0});
  std::vector<double> rs, ls;
  for (int i = 0; i <= 8; ++i) {
    const double R = 8.0 + i;
    rs.push_back(R);
    ls.push_back(std::log(hypersphere_average(model, R, mc(400000, 5), 31 + i).value));
  }
  const LineFit f = fit_line(rs, ls);
  // The leading power correction shifts a plain log-linear fit by O(1/R).
  EXPECT_NEAR(f.slope, -2.0, 0.35);
  // Corrected for the R^{-5/2} Laplace prefactor, the slope matches -2.
  std::vector<double> corrected(ls);
  for (std::size_t i = 0; i < rs.size(); ++i) corrected[i] += 2.5 * std::log(rs[i]);
  EXPECT_NEAR(fit_line(rs, corrected).slope, -2.0, 0.1);
}

TEST(Csv, RoundTripIsExact) {
  const auto p = profile(psi2, make_grid(0.0, 10.0, 41), Method::analytic);
  const std::string text = profile_to_csv(p);
  EXPECT_EQ(text.substr(0, text.find('\n')), "r,rho_tilde,stderr,provenance");
  const auto q = profile_from_csv(text, 2, p.norm_squared);
  EXPECT_EQ(q.grid, p.grid);
  EXPECT_EQ(q.values, p.values);
  EXPECT_EQ(profile_to_csv(q), text);
  for (double s : q.stderr_) EXPECT_EQ(s, 0.0);
}

TEST(Csv, ParseErrorsCarryLineNumbers) {
  try {
    profile_from_csv("r,rho_tilde,stderr,provenance\n0,1,0,analytic\n1,x,0,analytic\n", 1, 1.0);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(profile_from_csv("", 1, 1.0), ParseError);
  EXPECT_THROW(profile_from_csv("r,rho\n", 1, 1.0), ParseError);
  EXPECT_THROW(profile_from_csv("r,rho_tilde,stderr,provenance\n0,1,0,guess\n", 1, 1.0), ParseError);
}

TEST(Csv, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(pi)), pi);
}

}  // namespace
}  // namespace rholab
