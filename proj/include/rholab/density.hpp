// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file density.hpp
 * @brief One-electron densities rho_j, their sum rho, the spherical integral
 * rho_tilde(r) = sum_j int_{S^2} rho_j(r w) dw, radial profiles, shell
 * integrals and hypersphere averages.
 *
 * rho_tilde integrates over S^2 without the 1/(4 pi) factor, so a radially
 * symmetric density gives rho_tilde(r) = 4 pi rho(r).
 */

#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rholab/core.hpp"
#include "rholab/montecarlo.hpp"
#include "rholab/quadrature.hpp"
#include "rholab/wavefunction.hpp"

namespace rholab {

enum class Method { analytic, quadrature, monteCarlo };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::quadrature: return "quadrature";
    default: return "monteCarlo";
  }
}

inline Method method_from_string(const std::string& s) {
  if (s == "analytic") return Method::analytic;
  if (s == "quadrature") return Method::quadrature;
  if (s == "monteCarlo") return Method::monteCarlo;
  throw DomainError("unknown density method '" + s + "'");
}

/// True when density_at has a closed-form path for the model.
inline bool has_analytic_density(const WavefunctionModel& model) {
  if (const auto* k = model.as<OrthogonalMixedExponential>()) return k->size() <= 2;
  return true;
}

/// Cheapest exact-ish method: analytic, else quadrature (N <= 3), else Monte Carlo.
inline Method default_method(const WavefunctionModel& model) {
  if (has_analytic_density(model)) return Method::analytic;
  return model.electrons() <= 3 ? Method::quadrature : Method::monteCarlo;
}

namespace detail {

// int_{-1}^{1} e^{-t eta} d eta and int eta^2 e^{-t eta} d eta, each times e^{-s}.
inline std::pair<double, double> prolate_moments(double t, double s) {
  t = std::abs(t);
  if (t < 2.0) {
    double m0 = 0.0, m2 = 0.0, term = 1.0;  // term = t^{2k}/(2k)!
    for (int k = 0; k < 40; ++k) {
      if (k > 0) term *= t * t / ((2.0 * k - 1.0) * (2.0 * k));
      m0 += term / (2.0 * k + 1.0);
      m2 += term / (2.0 * k + 3.0);
    }
    const double e = std::exp(-s);
    return {2.0 * m0 * e, 2.0 * m2 * e};
  }
  const double ep = std::exp(t - s), em = std::exp(-t - s);
  const double m0 = (ep - em) / t;
  const double m2 = ep * (1.0 / t - 2.0 / (t * t) + 2.0 / (t * t * t)) -
                    em * (1.0 / t + 2.0 / (t * t) + 2.0 / (t * t * t));
  return {m0, m2};
}

}  // namespace detail

/**
 * int_{R^3} e^{-2A|v - p1| - 2B|v - p2|} dv for foci at distance 2d, by
 * prolate spheroidal coordinates.
 */
inline double two_center_exponential_integral(double a, double b, double d) {
  if (d == 0.0) return pi / std::pow(a + b, 3);
  const double s = 2.0 * d * (a + b);
  const double t = 2.0 * d * (a - b);
  const auto [m0, m2] = detail::prolate_moments(t, s);
  return 2.0 * pi * d * d * d * (m0 * (1.0 / s + 2.0 / (s * s) + 2.0 / (s * s * s)) - m2 / s);
}

namespace detail {

inline void check_electron(const WavefunctionModel& model, int j) {
  if (j < 0 || j >= model.electrons())
    throw DimensionError("electron index " + std::to_string(j) + " outside [0, " +
                         std::to_string(model.electrons()) + ")");
}

inline double analytic_density(const WavefunctionModel& model, int j, const Vec3& x) {
  const double s2 = model.scale() * model.scale();
  const double r = norm(x);
  if (const auto* k = model.as<SeparableExponential>()) {
    double p = s2 * std::exp(-2.0 * k->alphas[j] * r);
    for (std::size_t i = 0; i < k->alphas.size(); ++i)
      if (static_cast<int>(i) != j) p *= pi / std::pow(k->alphas[i], 3);
    return p;
  }
  if (const auto* k = model.as<OrthogonalMixedExponential>()) {
    if (k->size() == 1) return s2 * std::exp(-2.0 * k->alphas[0] * r);
    if (k->size() != 2) throw UnsupportedError("analytic density: mixed models with N > 2");
    const int o = 1 - j;
    const double m1o = std::abs(k->at(0, o)), m2o = std::abs(k->at(1, o));
    const double a1 = k->alphas[0], a2 = k->alphas[1];
    if (m1o == 0.0) return s2 * std::exp(-2.0 * a1 * r) * pi / (a2 * a2 * a2);
    if (m2o == 0.0) return s2 * std::exp(-2.0 * a2 * r) * pi / (a1 * a1 * a1);
    return s2 * two_center_exponential_integral(a1 * m1o, a2 * m2o, r / (2.0 * m1o * m2o));
  }
  if (model.as<Hydrogenic>()) {
    const double v = evaluate(model, {x});
    return v * v;
  }
  const auto& d = *model.as<DeterminantProduct>();
  const bool first = j < d.sym.n1;
  const int start = first ? 0 : d.sym.n1;
  const int count = first ? d.sym.n1 : d.sym.n2;
  const Statistics stat = first ? d.sym.statistics1 : d.sym.statistics2;
  const double other = first ? group_norm_squared(d, d.sym.n1, d.sym.n2, d.sym.statistics2)
                             : group_norm_squared(d, 0, d.sym.n1, d.sym.statistics1);
  const Eigen::MatrixXd g = group_gram(d, start, count);
  std::vector<double> phi(count);
  for (int a = 0; a < count; ++a) phi[a] = d.orbitals[start + a](x);
  double acc = 0.0;
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) {
      const double sign =
          (stat == Statistics::antisymmetric && (a + b) % 2 == 1) ? -1.0 : 1.0;
      acc += sign * phi[a] * phi[b] * det_or_perm(remove_row_col(g, a, b), stat);
    }
  return s2 * other * factorial(count - 1) * acc;
}

// |psi|^2 with electron j at x and the others at `rest` (in order).
inline double squared_with(const WavefunctionModel& model, int j, const Vec3& x,
                           std::span<const Vec3> rest, Coordinates& buf) {
  const int n = model.electrons();
  buf.resize(n);
  for (int i = 0, k = 0; i < n; ++i) buf[i] = (i == j) ? x : rest[k++];
  const double v = evaluate(model, buf);
  return v * v;
}

/// Decay rate lower bound used to scale radial quadrature and proposals.
inline double proposal_rate(const WavefunctionModel& model) { return 2.0 * analytic_alpha0(model); }

inline double quadrature_density(const WavefunctionModel& model, int j, const Vec3& x) {
  const int n = model.electrons();
  Coordinates buf;
  if (n == 1) {
    const double v = evaluate(model, {x});
    return v * v;
  }
  if (n > 3) throw UnsupportedError("quadrature density: N > 3 is too costly; use monteCarlo");
  const double rate = proposal_rate(model);
  const Vec3 axis = norm(x) > 0.0 ? x : Vec3{0, 0, 1};
  if (n == 2) {
    // Mixed integrands are axially symmetric about x with cusps on the axis.
    const bool mixed = model.as<OrthogonalMixedExponential>() != nullptr;
    const SphereRule sphere =
        (mixed ? SphereRule::polar(64, 1) : SphereRule::product(12, 24)).aligned_to(axis);
    // Radial kinks sit where a mixed coordinate vanishes, |y| = |M_kj / M_ko| |x|.
    std::vector<double> breaks{norm(x)};
    if (const auto* k = model.as<OrthogonalMixedExponential>())
      for (int row = 0; row < 2; ++row)
        if (k->at(row, 1 - j) != 0.0) breaks.push_back(std::abs(k->at(row, j) / k->at(row, 1 - j)) * norm(x));
    return integrate_half_line_split(
        [&](double t) {
          double acc = 0.0;
          for (std::size_t k = 0; k < sphere.size(); ++k) {
            const Vec3 y = t * sphere.points[k];
            acc += sphere.weights[k] * squared_with(model, j, x, std::span<const Vec3>(&y, 1), buf);
          }
          return acc * t * t;
        },
        breaks, rate, 32, 48);
  }
  const SphereRule sphere = SphereRule::product(6, 12).aligned_to(axis);
  const auto& lag = gauss_laguerre(24);
  std::vector<Vec3> pts;
  std::vector<double> wts;
  for (std::size_t i = 0; i < lag.size(); ++i) {
    const double t = lag.nodes[i] / rate;
    const double wr = lag.weights[i] * std::exp(lag.nodes[i]) / rate * t * t;
    for (std::size_t k = 0; k < sphere.size(); ++k) {
      pts.push_back(t * sphere.points[k]);
      wts.push_back(wr * sphere.weights[k]);
    }
  }
  double acc = 0.0;
  Vec3 pair[2];
  for (std::size_t a = 0; a < pts.size(); ++a) {
    pair[0] = pts[a];
    for (std::size_t b = 0; b < pts.size(); ++b) {
      pair[1] = pts[b];
      acc += wts[a] * wts[b] * squared_with(model, j, x, std::span<const Vec3>(pair, 2), buf);
    }
  }
  return acc;
}

// Importance-sampled sum over the electrons in `js` of rho_j(x).
inline Estimate mc_density(const WavefunctionModel& model, const std::vector<int>& js, const Vec3& x,
                           const McConfig& cfg, std::uint64_t stream) {
  if (cfg.proposal == Proposal::metropolis)
    throw UnsupportedError("metropolis sampling only produces binned radial profiles");
  const int n = model.electrons();
  const double rate = proposal_rate(model);
  return mc_mean(cfg, stream, [&](Rng& rng) {
    Coordinates rest(n - 1), buf;
    double log_q = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      rest[i] = sample_exponential(rng, rate);
      log_q += exponential_log_pdf(rest[i], rate);
    }
    double acc = 0.0;
    for (int j : js) acc += squared_with(model, j, x, rest, buf);
    return acc * std::exp(-log_q);
  });
}

}  // namespace detail

/// rho_j(x) for the 0-based electron index j; stderr is 0 off the Monte Carlo path.
inline Estimate density_at(const WavefunctionModel& model, int j, const Vec3& x, Method method,
                           const McConfig& cfg = {}, std::uint64_t stream = 0) {
  detail::check_electron(model, j);
  switch (method) {
    case Method::analytic: return {detail::analytic_density(model, j, x), 0.0};
    case Method::quadrature: return {detail::quadrature_density(model, j, x), 0.0};
    default: return detail::mc_density(model, {j}, x, cfg, stream);
  }
}

/// rho(x) = sum_j rho_j(x).
inline Estimate density_total(const WavefunctionModel& model, const Vec3& x, Method method,
                              const McConfig& cfg = {}, std::uint64_t stream = 0) {
  const int n = model.electrons();
  if (method == Method::monteCarlo) {
    std::vector<int> js(n);
    std::iota(js.begin(), js.end(), 0);
    return detail::mc_density(model, js, x, cfg, stream);
  }
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += density_at(model, j, x, method).value;
  return {acc, 0.0};
}

/**
 * rho_tilde(r). Radially symmetric models use 4 pi rho(r e_z); others integrate
 * rho over a product rule exact for their angular degree. The Monte Carlo path
 * samples the direction uniformly together with the other electrons.
 */
inline Estimate spherical_average(const WavefunctionModel& model, double r, Method method,
                                  const McConfig& cfg = {}, std::uint64_t stream = 0) {
  if (!(r >= 0.0)) throw DomainError("spherical_average: r must be >= 0");
  const int n = model.electrons();
  if (method == Method::monteCarlo) {
    if (cfg.proposal == Proposal::metropolis)
      throw UnsupportedError("metropolis sampling only produces binned radial profiles");
    const double rate = detail::proposal_rate(model);
    return mc_mean(cfg, stream, [&](Rng& rng) {
      const Vec3 x = r * sample_unit_sphere(rng);
      Coordinates rest(n - 1), buf;
      double log_q = 0.0;
      for (int i = 0; i < n - 1; ++i) {
        rest[i] = sample_exponential(rng, rate);
        log_q += exponential_log_pdf(rest[i], rate);
      }
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += detail::squared_with(model, j, x, rest, buf);
      return 4.0 * pi * acc * std::exp(-log_q);
    });
  }
  if (radially_symmetric(model)) return {4.0 * pi * density_total(model, {0.0, 0.0, r}, method).value, 0.0};
  const int l = angular_degree(model);
  const SphereRule sphere = SphereRule::product(l + 1, 2 * l + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < sphere.size(); ++k)
    acc += sphere.weights[k] * density_total(model, r * sphere.points[k], method).value;
  return {acc, 0.0};
}

// ---------------------------------------------------------------------------
// Radial profiles
// ---------------------------------------------------------------------------

struct RadialDensityProfile {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> stderr_;
  Method provenance = Method::analytic;
  int electrons = 1;
  double norm_squared = std::numeric_limits<double>::quiet_NaN();

  std::size_t size() const { return grid.size(); }

  void validate() const {
    if (grid.empty()) throw DomainError("profile: empty grid");
    if (values.size() != grid.size() || stderr_.size() != grid.size())
      throw DimensionError("profile: grid, values and stderr must have equal length");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!std::isfinite(grid[i]) || grid[i] < 0.0) throw DomainError("profile: radii must be finite and >= 0");
      if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("profile: grid must be strictly increasing");
      if (!std::isfinite(values[i]) || values[i] < 0.0) throw DomainError("profile: values must be finite and >= 0");
    }
  }
};

enum class Spacing { linear, log };

/// n points from a to b; log spacing requires a > 0.
inline std::vector<double> make_grid(double a, double b, int n, Spacing spacing = Spacing::linear) {
  if (!(b > a)) throw DomainError("grid: rmin must be < rmax");
  if (n < 2) throw DomainError("grid: need at least 2 points");
  if (spacing == Spacing::log && !(a > 0.0)) throw DomainError("grid: log spacing needs rmin > 0");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    g[i] = spacing == Spacing::linear ? a + (b - a) * t : a * std::pow(b / a, t);
  }
  g.back() = b;
  return g;
}

namespace detail {

inline constexpr std::uint64_t profile_stream_base = 1ULL << 20;

inline RadialDensityProfile metropolis_profile(const WavefunctionModel& model, const std::vector<double>& grid,
                                               const McConfig& cfg) {
  cfg.validate();
  if (grid.size() < 2) throw DomainError("metropolis profile needs at least 2 grid points");
  const std::size_t m = grid.size();
  std::vector<double> edges(m + 1);
  edges[0] = std::max(0.0, grid[0] - 0.5 * (grid[1] - grid[0]));
  for (std::size_t i = 1; i < m; ++i) edges[i] = 0.5 * (grid[i - 1] + grid[i]);
  edges[m] = grid[m - 1] + 0.5 * (grid[m - 1] - grid[m - 2]);
  const int n = model.electrons();
  const double nsq = norm_squared(model).value;
  constexpr std::size_t batches = 20;
  const std::size_t chains = std::min(cfg.chains, cfg.samples);

  auto per_chain = parallel_map(chains, [&](std::size_t c) {
    Rng rng(derive_seed(cfg.seed, profile_stream_base * 3 + c));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Coordinates x(n), y(n);
    const double rate = std::max(proposal_rate(model), 1e-3);
    for (auto& p : x) p = sample_exponential(rng, rate);
    double p2 = std::pow(evaluate(model, x), 2);
    auto step = [&] {
      for (int i = 0; i < n; ++i)
        y[i] = x[i] + cfg.step_size * Vec3{gauss(rng), gauss(rng), gauss(rng)};
      const double q2 = std::pow(evaluate(model, y), 2);
      if (q2 >= p2 || unif(rng) * p2 < q2) {
        x = y;
        p2 = q2;
      }
    };
    for (std::size_t i = 0; i < cfg.burn_in; ++i) step();
    const std::size_t total = cfg.samples / chains + (c < cfg.samples % chains ? 1 : 0);
    const std::size_t per_batch = std::max<std::size_t>(1, total / batches);
    std::vector<Accumulator> acc(m);
    std::vector<double> counts(m, 0.0);
    std::size_t in_batch = 0;
    auto flush = [&] {
      for (std::size_t i = 0; i < m; ++i) {
        const double vol = (std::pow(edges[i + 1], 3) - std::pow(edges[i], 3)) / 3.0;
        acc[i].add(nsq * counts[i] / static_cast<double>(in_batch) / vol);
        counts[i] = 0.0;
      }
      in_batch = 0;
    };
    for (std::size_t s = 0; s < total; ++s) {
      step();
      for (int j = 0; j < n; ++j) {
        const double r = norm(x[j]);
        const auto it = std::upper_bound(edges.begin(), edges.end(), r);
        if (it == edges.begin() || it == edges.end()) continue;
        counts[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
      }
      if (++in_batch == per_batch) flush();
    }
    if (in_batch > 0) flush();
    return acc;
  });

  RadialDensityProfile p;
  p.grid = grid;
  p.provenance = Method::monteCarlo;
  p.electrons = n;
  p.norm_squared = nsq;
  for (std::size_t i = 0; i < m; ++i) {
    Accumulator a;
    for (const auto& chain : per_chain) a.merge(chain[i]);
    p.values.push_back(a.mean());
    p.stderr_.push_back(a.std_error());
  }
  return p;
}

}  // namespace detail

/**
 * rho_tilde on a strictly increasing grid. Monte Carlo points use streams
 * derived from the grid index, so the result depends only on (seed, grid).
 */
inline RadialDensityProfile profile(const WavefunctionModel& model, const std::vector<double>& grid,
                                    Method method, const McConfig& cfg = {}) {
  if (grid.empty()) throw DomainError("profile: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("profile: grid must be strictly increasing");
  if (method == Method::monteCarlo && cfg.proposal == Proposal::metropolis)
    return detail::metropolis_profile(model, grid, cfg);
  RadialDensityProfile p;
  p.grid = grid;
  p.provenance = method;
  p.electrons = model.electrons();
  p.norm_squared = norm_squared(model).value;
  std::vector<Estimate> est;
  if (method == Method::monteCarlo) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      est.push_back(spherical_average(model, grid[i], method, cfg, detail::profile_stream_base + i));
  } else {
    est = parallel_map(grid.size(), [&](std::size_t i) { return spherical_average(model, grid[i], method); });
  }
  for (const auto& e : est) {
    p.values.push_back(std::max(0.0, e.value));
    p.stderr_.push_back(e.std_error);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Shell integrals
// ---------------------------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS
};

/// Ordinary least squares y = intercept + slope x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("fit_line: need at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
  f.residual = std::sqrt(ss / n);
  return f;
}

namespace detail {

// int_{r_back}^inf of the exponential continuation fitted to the last tenth.
inline double exponential_tail(const RadialDensityProfile& p) {
  const std::size_t n = p.size();
  const double b = p.grid.back(), yb = p.values.back();
  if (yb <= 0.0 || n < 2) return 0.0;
  const std::size_t m = std::min(n, std::max<std::size_t>(8, n / 10));
  std::vector<double> xs, ys;
  for (std::size_t i = n - m; i < n; ++i)
    if (p.values[i] > 0.0) {
      xs.push_back(p.grid[i]);
      ys.push_back(std::log(p.values[i]));
    }
  if (xs.size() < 2) return 0.0;
  const double k = -fit_line(xs, ys).slope;
  if (!(k > 0.0)) throw DomainError("shell_integral: profile does not decay at the end of the grid");
  return yb * (b * b / k + 2.0 * b / (k * k) + 2.0 / (k * k * k));
}

inline double cubic_interpolate(const RadialDensityProfile& p, double r) {
  const std::size_t n = p.size();
  if (n == 1) return p.values[0];
  std::size_t i = static_cast<std::size_t>(std::upper_bound(p.grid.begin(), p.grid.end(), r) - p.grid.begin());
  i = (i == 0) ? 0 : i - 1;
  const std::size_t cnt = std::min<std::size_t>(4, n);
  const std::size_t lo = std::min(i > 0 ? i - 1 : 0, n - cnt);
  double v = 0.0;
  for (std::size_t k = lo; k < lo + cnt; ++k) {
    double basis = 1.0;
    for (std::size_t m = lo; m < lo + cnt; ++m)
      if (m != k) basis *= (r - p.grid[m]) / (p.grid[k] - p.grid[m]);
    v += basis * p.values[k];
  }
  return v;
}

}  // namespace detail

/// int_{r_i}^inf rho_tilde r^2 dr at every grid node (piecewise quintic plus tail).
inline std::vector<double> shell_integrals(const RadialDensityProfile& p) {
  p.validate();
  std::vector<double> y(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) y[i] = p.values[i] * p.grid[i] * p.grid[i];
  auto tail = tail_cumulative(p.grid, y);
  const double extra = detail::exponential_tail(p);
  for (auto& t : tail) t += extra;
  return tail;
}

/// int_R^inf rho_tilde r^2 dr for R inside the grid span.
inline double shell_integral(const RadialDensityProfile& p, double R) {
  p.validate();
  if (R < p.grid.front() || R > p.grid.back())
    throw DomainError("shell_integral: R = " + std::to_string(R) + " outside the grid span");
  // Nodes at or above R use the grid rule; the partial cell uses the interpolant.
  const auto it = std::lower_bound(p.grid.begin(), p.grid.end(), R);
  const std::size_t k = static_cast<std::size_t>(it - p.grid.begin());
  double s = shell_integrals(p)[k];
  if (p.grid[k] > R) {
    const auto rule = gauss_legendre(8, R, p.grid[k]);
    for (std::size_t i = 0; i < rule.size(); ++i)
      s += rule.weights[i] * detail::cubic_interpolate(p, rule.nodes[i]) * rule.nodes[i] * rule.nodes[i];
  }
  return s;
}

struct MassCheck {
  double integral = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // absolute
  double std_error = 0.0;  // Monte Carlo only
  bool passed = false;
};

/**
 * int_0^inf rho_tilde r^2 dr against N ||psi||^2. Tolerances: 1e-8 relative
 * (analytic), 0.5% relative (quadrature), 3 sigma (Monte Carlo). The grid must
 * start at 0.
 */
inline MassCheck mass_check(const RadialDensityProfile& p) {
  p.validate();
  if (p.grid.front() != 0.0) throw DomainError("mass_check: profile grid must start at r = 0");
  MassCheck m;
  m.integral = shell_integrals(p)[0];
  m.expected = p.electrons * p.norm_squared;
  if (p.provenance == Method::monteCarlo) {
    // The integral is linear in the values; propagate independent point errors.
    std::vector<double> unit(p.size(), 0.0), w(p.size());
    std::vector<double> r2(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r2[i] = p.grid[i] * p.grid[i];
    double var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      unit.assign(p.size(), 0.0);
      unit[i] = r2[i];
      const double wi = tail_cumulative(p.grid, unit)[0];
      var += std::pow(wi * p.stderr_[i], 2);
    }
    m.std_error = std::sqrt(var);
    // Statistical band plus the deterministic grid allowance.
    m.tolerance = 3.0 * m.std_error + 1e-8 * std::abs(m.expected);
  } else {
    m.tolerance = (p.provenance == Method::analytic ? 1e-8 : 5e-3) * std::abs(m.expected);
  }
  m.passed = std::abs(m.integral - m.expected) <= m.tolerance;
  return m;
}

// ---------------------------------------------------------------------------
// Hypersphere average
// ---------------------------------------------------------------------------

/// int_{S^{3N-1}} |psi(R Omega)|^2 dOmega by uniform sampling of Omega.
inline Estimate hypersphere_average(const WavefunctionModel& model, double R, const McConfig& cfg,
                                    std::uint64_t stream = 31) {
  if (!(R >= 0.0)) throw DomainError("hypersphere_average: R must be >= 0");
  const int n = model.electrons();
  const double area = sphere_area(3 * n);
  const Estimate e = mc_mean(cfg, stream, [&](Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Coordinates x(n);
    double len2 = 0.0;
    for (auto& p : x) {
      p = {gauss(rng), gauss(rng), gauss(rng)};
      len2 += dot(p, p);
    }
    const double s = R / std::sqrt(len2);
    for (auto& p : x) p = s * p;
    const double v = evaluate(model, x);
    return v * v;
  });
  return {area * e.value, area * e.std_error};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Shortest-exact 17 significant digit rendering used by every CSV writer.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string profile_to_csv(const RadialDensityProfile& p) {
  std::string out = "r,rho_tilde,stderr,provenance\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    out += format_double(p.grid[i]) + "," + format_double(p.values[i]) + "," + format_double(p.stderr_[i]) +
           "," + to_string(p.provenance) + "\n";
  return out;
}

/// Parses `r,rho_tilde,stderr,provenance` text; errors carry the line number.
inline RadialDensityProfile profile_from_csv(const std::string& text, int electrons, double norm_sq) {
  RadialDensityProfile p;
  p.electrons = electrons;
  p.norm_squared = norm_sq;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "r,rho_tilde,stderr,provenance")
        throw ParseError(lineno, "expected header r,rho_tilde,stderr,provenance");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ParseError(lineno, "expected 4 columns");
    double v[3];
    for (int k = 0; k < 3; ++k) {
      std::size_t used = 0;
      try {
        v[k] = std::stod(cells[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[k].size() || cells[k].empty()) throw ParseError(lineno, "malformed number '" + cells[k] + "'");
    }
    try {
      p.provenance = method_from_string(cells[3]);
    } catch (const DomainError& e) {
      throw ParseError(lineno, e.what());
    }
    p.grid.push_back(v[0]);
    p.values.push_back(v[1]);
    p.stderr_.push_back(v[2]);
  }
  if (!header) throw ParseError(0, "profile CSV is empty");
  p.validate();
  return p;
}

}  // namespace rholab
