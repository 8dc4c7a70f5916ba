// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rholab/rholab.hpp"

namespace {

using namespace rholab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects sub-checks of one criterion and the first failing detail.
struct Criterion {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
  void note(const std::string& s) {
    if (ok) detail += (detail.empty() ? "" : "; ") + s;
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

RadialDensityProfile analytic_profile(const WavefunctionModel& m, double rmax = 30.0, int n = 3001) {
  return profile(m, make_grid(0.0, rmax, n), Method::analytic);
}

const WavefunctionModel psi1 = WavefunctionModel::separable({1.0, 2.0});
const WavefunctionModel psi2 = WavefunctionModel::rotated_pair(1.0, 1.0);
const WavefunctionModel hyd = WavefunctionModel::hydrogenic(2.0);
const Window window{10.0, 20.0};

// c1 e^{-2 r} + c2 e^{-4 r} through two samples.
std::pair<double, double> two_exponential_coefficients(double r1, double v1, double r2, double v2) {
  const double a11 = std::exp(-2 * r1), a12 = std::exp(-4 * r1), a21 = std::exp(-2 * r2), a22 = std::exp(-4 * r2);
  const double det = a11 * a22 - a12 * a21;
  return {(v1 * a22 - a12 * v2) / det, (a11 * v2 - a21 * v1) / det};
}

Criterion separable_model() {
  Criterion c;
  const double slope = decay_fit(analytic_profile(psi1), window).slope;
  c.expect(std::abs(slope + 2.0) <= 1e-3, fmt("fit slope %.6f", slope));
  c.note(fmt("slope %.6f", slope));
  // Exact two-exponential structure: every radius pair gives the same coefficients.
  double worst = 0.0;
  for (auto [r1, r2] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.5, 3.0}, {2.0, 6.0}}) {
    const auto [c1, c2] = two_exponential_coefficients(r1, spherical_average(psi1, r1, Method::analytic).value, r2,
                                                       spherical_average(psi1, r2, Method::analytic).value);
    worst = std::max(worst, std::abs(c1 / c2 - 0.125));
  }
  c.expect(worst <= 1e-6, fmt("analytic c1/c2 deviation %.3g", worst));
  c.note(fmt("analytic |c1/c2 - 1/8| %.2g", worst));
  // Monte Carlo oracle at two radii with 1e7 samples each.
  const auto t0 = Clock::now();
  McConfig cfg;
  cfg.samples = 10000000;
  cfg.seed = 2026;
  const double r1 = 0.5, r2 = 2.0;
  const Estimate m1 = spherical_average(psi1, r1, Method::monteCarlo, cfg, 1);
  const Estimate m2 = spherical_average(psi1, r2, Method::monteCarlo, cfg, 2);
  for (auto [r, e] : {std::pair{r1, m1}, std::pair{r2, m2}}) {
    const double exact = spherical_average(psi1, r, Method::analytic).value;
    c.expect(std::abs(e.value - exact) <= 3 * e.std_error, fmt("MC rho_tilde(%.1f) off by %.2f sigma", r,
                                                               std::abs(e.value - exact) / e.std_error));
  }
  const auto [c1, c2] = two_exponential_coefficients(r1, m1.value, r2, m2.value);
  // Linear error propagation of the ratio through the 2x2 solve.
  const double h1 = 1e-6 * m1.value, h2 = 1e-6 * m2.value;
  auto ratio = [&](double v1, double v2) {
    const auto [a, b] = two_exponential_coefficients(r1, v1, r2, v2);
    return a / b;
  };
  const double d1 = (ratio(m1.value + h1, m2.value) - ratio(m1.value - h1, m2.value)) / (2 * h1);
  const double d2 = (ratio(m1.value, m2.value + h2) - ratio(m1.value, m2.value - h2)) / (2 * h2);
  const double sigma = std::hypot(d1 * m1.std_error, d2 * m2.std_error);
  c.expect(std::abs(c1 / c2 - 0.125) <= 3 * sigma, fmt("MC c1/c2 = %.5f +- %.5f", c1 / c2, sigma));
  const double mc_time = seconds_since(t0);
  c.expect(mc_time < 60.0, fmt("MC oracle took %.1f s", mc_time));
  c.note(fmt("MC c1/c2 %.5f +- %.5f", c1 / c2, sigma));
  c.note(fmt("MC %.1f s", mc_time));
  return c;
}

Criterion rotated_pair() {
  Criterion c;
  const double slope = decay_fit(analytic_profile(psi2), window).slope;
  c.expect(std::abs(slope + 2 * std::sqrt(2.0)) <= 2e-2, fmt("fit slope %.5f", slope));
  const Alpha0Estimate est = estimate_alpha0(psi2);
  c.expect(std::abs(est.value - 1.0) <= 2e-2, fmt("alpha0 estimate %.5f", est.value));
  c.note(fmt("slope %.5f, ray alpha0 %.5f", slope, est.value));
  c.note(fmt("rate / (2 alpha0) = %.4f", -slope / (2 * est.value)));
  return c;
}

Criterion sandwich() {
  Criterion c;
  const auto d1 = sandwich_check(analytic_profile(psi1), 1.0, 2, window);
  const auto d2 = sandwich_check(analytic_profile(psi2), 1.0, 2, window);
  c.expect(d1.sandwich_passed && d2.sandwich_passed, "a fitted rate left the band");
  c.expect(std::abs(d1.fitted_rate - d1.upper_env_rate) <= d1.tolerance,
           fmt("separable rate %.5f not at upper edge %.5f", d1.fitted_rate, d1.upper_env_rate));
  c.expect(std::abs(d2.fitted_rate - d2.lower_env_rate) <= d2.tolerance,
           fmt("rotated rate %.5f not at lower edge %.5f", d2.fitted_rate, d2.lower_env_rate));
  c.note(fmt("band positions %.4f (upper) and %.4f (lower)", d1.band_position, d2.band_position));
  return c;
}

Criterion threshold_cap() {
  Criterion c;
  const double a0 = analytic_alpha0(hyd), e = *energy_of(hyd);
  c.expect(a0 == 1.0 && e == -1.0 && a0 * a0 == std::abs(e), fmt("alpha0 %.17g, E %.17g", a0, e));
  c.expect(alpha0_threshold_cap(e) == a0, "cap not saturated");
  const auto p = analytic_profile(hyd);
  const auto d = sandwich_check(p, a0, 1, default_window(p.grid), FitBasis::asymptotic, e);
  c.expect(std::abs(d.fitted_rate + 2.0) <= 1e-2, fmt("fitted rate %.5f", d.fitted_rate));
  c.expect(d.cap_passed.value_or(false), "cap verdict failed");
  c.note(fmt("alpha0^2 = |E| = %g, fitted %.6f", a0 * a0, d.fitted_rate));
  return c;
}

Criterion origin() {
  Criterion c;
  const auto cert = origin_certificate(hyd, Method::analytic);
  c.expect(std::abs(cert.rho0 - 1.0) <= 1e-14, fmt("rho(0) %.17g", cert.rho0));
  c.expect(std::abs(cert.lower_bound - 1.0 / 3.0) <= 1e-14, fmt("lower bound %.17g", cert.lower_bound));
  c.expect(cert.passed && cert.status == CertificateStatus::certified, "certificate not passed");
  const auto scan = r_alpha_min_scan(cert, -10.0, 10.0);
  c.expect(std::abs(scan.value - cert.minimum()) <= 1e-10, fmt("scan min %.15g vs vertex %.15g", scan.value,
                                                              cert.minimum()));
  c.expect(std::abs(scan.value - 8 * pi / 3) <= 1e-10, fmt("scan min %.15g", scan.value));
  McConfig cfg;
  cfg.samples = 1000000;
  cfg.seed = 7;
  const auto mc = origin_certificate(hyd, Method::monteCarlo, cfg);
  c.expect(std::abs(mc.psq - cert.psq) <= 3 * mc.psq_stderr,
           fmt("MC P^2 off by %.2f sigma", std::abs(mc.psq - cert.psq) / mc.psq_stderr));
  c.expect(std::abs(mc.rho0 - cert.rho0) <= 3 * mc.rho0_stderr + 1e-14, "MC rho(0) outside 3 sigma");
  c.note(fmt("R min %.12f; MC P^2 %.5f", scan.value, mc.psq));
  c.note(fmt("+- %.1e", mc.psq_stderr));
  return c;
}

Criterion mass_identity() {
  Criterion c;
  const auto det = build_determinant({Orbital::hydrogenic(3, 1, 0, 0), Orbital::hydrogenic(3, 2, 0, 0)}, {1, 1});
  int n = 0;
  for (const auto* m : {&psi1, &psi2, &hyd, &det}) {
    const MassCheck k = mass_check(analytic_profile(*m, 40.0, 4001));
    c.expect(k.passed && k.tolerance <= 1e-8 * k.expected,
             fmt("analytic mass %.12g vs %.12g", k.integral, k.expected));
    ++n;
  }
  const MassCheck q = mass_check(profile(psi2, make_grid(0.0, 20.0, 121), Method::quadrature));
  c.expect(q.passed, fmt("quadrature mass %.8g vs %.8g", q.integral, q.expected));
  McConfig cfg;
  cfg.samples = 20000;
  cfg.seed = 8;
  const MassCheck mc = mass_check(profile(psi1, make_grid(0.0, 14.0, 141), Method::monteCarlo, cfg));
  c.expect(mc.passed, fmt("MC mass %.8g vs %.8g", mc.integral, mc.expected));
  c.note(fmt("%g analytic profiles at 1e-8, quadrature rel %.1e", n, std::abs(q.integral / q.expected - 1)));
  c.note(fmt("MC %.2f sigma", std::abs(mc.integral - mc.expected) / mc.std_error));
  return c;
}

Criterion radial() {
  Criterion c;
  double worst0 = 0.0;
  bool power_exact = true;
  std::size_t cases = 0;
  for (double k : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0})
    for (double R : {0.5, 1.0, 2.0, 10.0}) {
      const auto grid = make_grid(R, R + 10 * R, 201);
      for (double r : grid) worst0 = std::max(worst0, std::abs(radial_mode(0, k, R, r) - (R / r) * std::exp(-k * (r - R))));
      for (int l = 0; l <= 32; ++l) {
        const auto s = solve_radial(l, k, R, grid);
        ++cases;
        c.expect(s.values.front() == 1.0, "f(R) != 1");
        c.expect(max_principle_check(s).passed, fmt("max principle failed kappa %g R %g", k, R));
        if (k == 0.0)
          for (std::size_t i = 0; i < grid.size(); ++i)
            power_exact = power_exact && std::abs(s.values[i] - std::pow(R / grid[i], l + 1)) <= 1e-15;
      }
    }
  c.expect(worst0 <= 1e-10, fmt("l = 0 deviation %.3g", worst0));
  c.expect(power_exact, "kappa = 0 power law deviates");
  double worst_ode = 0.0;
  for (int l : {0, 1, 4, 16, 32})
    for (double k : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0})
      for (double R : {0.5, 1.0, 2.0, 10.0}) {
        const auto o = ode_cross_check(l, k, R, R + 10.0);
        worst_ode = std::max(worst_ode, o.max_deviation);
      }
  c.expect(worst_ode < 1e-8, fmt("ODE deviation %.3g", worst_ode));
  c.note(fmt("%g cases; l=0 dev %.1e", static_cast<double>(cases), worst0));
  c.note(fmt("ODE dev %.1e", worst_ode));
  return c;
}

Criterion extension() {
  Criterion c;
  double worst_rt = 0.0, worst_const = 0.0;
  for (double R : {0.5, 1.0, 3.0})
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto b = BoundaryFunction::random(16, seed);
      worst_rt = std::max(worst_rt, roundtrip_check(b, R));
      const auto sn = shell_norm_bound_check(extend(b, R), b, R);
      c.expect(sn.passed, "shell norm above 3 R^{3/2}");
      worst_const = std::max(worst_const, sn.constant);
    }
  for (std::uint64_t seed = 4; seed <= 5; ++seed) {
    const auto b = BoundaryFunction::random(3, seed, {0.5, 1.2});
    const auto sn = shell_norm_bound_check(extend(b, 1.0), b, 1.0);
    c.expect(sn.passed, "two-electron shell norm above 3 R^{3/2}");
    worst_const = std::max(worst_const, sn.constant);
  }
  const auto mono = BoundaryFunction::single_mode(0, 0);
  worst_const = std::max(worst_const, shell_norm_bound_check(extend(mono, 1.0), mono, 1.0).constant);
  c.expect(worst_rt < 1e-10, fmt("roundtrip %.3g", worst_rt));
  c.expect(worst_const <= 2.944 && worst_const < 3.0, fmt("shell constant %.6f", worst_const));
  double lo = 1e9, hi = 0.0;
  for (int l : {0, 1, 3, 8, 16})
    for (double k : {0.0, 0.5, 2.0}) {
      const auto cv = mode_convergence(l, l / 2, k, 1.0, {1.5, 1.2, 0.9}, 2e-2);
      lo = std::min(lo, cv.ratio);
      hi = std::max(hi, cv.ratio);
    }
  const auto field = extend(BoundaryFunction::random(6, 9), 1.0);
  const auto fc = field_convergence(field, {0.9, 1.1, 0.7}, {0, 0, 0}, 1e-2);
  lo = std::min(lo, fc.ratio);
  hi = std::max(hi, fc.ratio);
  c.expect(lo >= 3.2 && hi <= 4.8, fmt("convergence ratios in [%.3f, %.3f]", lo, hi));
  const auto tg = trace_inequality_check({{SampleFactor::Kind::gaussian, 0.5}}, 2.0);
  const auto te = trace_inequality_check({{SampleFactor::Kind::exponential, 1.0}}, 1.0);
  c.expect(tg.passed && te.passed, "trace inequality failed");
  c.expect(std::abs(tg.lhs - 0.4797) <= 1e-4, fmt("gaussian trace %.5f", tg.lhs));
  c.note(fmt("roundtrip %.1e, shell constant %.4f", worst_rt, worst_const));
  c.note(fmt("ratios [%.3f, %.3f]", lo, hi));
  c.note(fmt("trace %.4f <= %.4f", tg.lhs, tg.rhs));
  return c;
}

Criterion lemma_scans() {
  Criterion c;
  for (const auto* m : {&psi1, &psi2}) {
    const auto p = analytic_profile(*m);
    const auto a = lemmaA_constant(p, 2.0, 30.0), b = lemmaC_constant(p, 2.0, 30.0);
    c.expect(a.passed && std::isfinite(a.constant), "lemmaA constant not finite");
    c.expect(b.passed && std::isfinite(b.constant), "lemmaC constant not finite");
    c.note(fmt("constants %.4f / %.4f", a.constant, b.constant));
  }
  RadialDensityProfile compact;
  compact.grid = make_grid(0.0, 30.0, 601);
  for (double r : compact.grid) {
    compact.values.push_back(r <= 10.0 ? std::pow(10.0 - r, 4) : 0.0);
    compact.stderr_.push_back(0.0);
  }
  compact.electrons = 1;
  compact.norm_squared = 1.0;
  c.expect(!lemmaA_constant(compact, 2.0, 30.0).passed, "compact-support profile passed the tail scan");
  c.note("compact support fails as designed");
  return c;
}

Criterion positivity() {
  Criterion c;
  const auto he = build_determinant({Orbital::hydrogenic(2, 1, 0, 0), Orbital::hydrogenic(2, 1, 0, 0)}, {1, 1});
  const auto li = build_determinant({Orbital::hydrogenic(3, 1, 0, 0), Orbital::hydrogenic(3, 2, 0, 0)}, {1, 1});
  const std::vector<WavefunctionModel> models{psi1,
                                              psi2,
                                              hyd,
                                              WavefunctionModel::hydrogenic(1.0),
                                              WavefunctionModel::separable({1.3, 1.3}),
                                              WavefunctionModel::separable({1.0, 1.5, 2.0}),
                                              he,
                                              li};
  std::size_t points = 0;
  for (const auto& m : models) {
    const auto p = analytic_profile(m, 30.0, 601);
    for (double v : p.values) {
      c.expect(v > 0.0, "nonpositive rho_tilde for " + m.kind_name());
      ++points;
    }
  }
  c.note(fmt("%g models, %g points", static_cast<double>(models.size()), static_cast<double>(points)));
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion determinism() {
  Criterion c;
  const std::string dir = RHOLAB_SCENARIO_DIR;
  const fs::path base = fs::temp_directory_path() / "rholab_acceptance";
  std::size_t files = 0;
  for (const char* name : {"separable.conf", "rotated_pair.conf", "hydrogenic_mc.conf", "extend.conf"}) {
    std::vector<std::vector<std::string>> written;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = base / (std::string(name) + std::to_string(rep));
      fs::remove_all(out);
      const Scenario sc = load_scenario(dir + "/" + name);
      written.push_back(emit(run(sc), out.string(), {"csv", "json"}));
    }
    c.expect(written[0].size() == written[1].size() && !written[0].empty(), "file lists differ");
    for (std::size_t i = 0; i < std::min(written[0].size(), written[1].size()); ++i) {
      c.expect(slurp(written[0][i]) == slurp(written[1][i]), "bytes differ in " + written[0][i]);
      ++files;
    }
  }
  fs::remove_all(base);
  c.note(fmt("%g file pairs byte-identical", static_cast<double>(files)));
  return c;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
      {"separable decay rate and two-exponential coefficients", separable_model},
      {"rotated pair density rate vs ray decay rate", rotated_pair},
      {"decay sandwich with edge saturation", sandwich},
      {"hydrogenic threshold cap", threshold_cap},
      {"origin lower-bound certificate", origin},
      {"mass identity", mass_identity},
      {"exterior radial modes", radial},
      {"harmonic extension", extension},
      {"shell-ratio constant scans", lemma_scans},
      {"positivity scan", positivity},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t = Clock::now();
    Criterion c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failures += !c.ok;
    std::printf("%s %2zu %s: %s (%.1f s)\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                c.detail.c_str(), seconds_since(t));
    std::fflush(stdout);
  }
  const double total = seconds_since(t0);
  std::printf("%s runtime %.1f s (target < 600 s)\n", total < 600.0 ? "PASS" : "FAIL", total);
  return failures == 0 && total < 600.0 ? 0 : 1;
}
