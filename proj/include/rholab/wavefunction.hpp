// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file wavefunction.hpp
 * @brief Explicit few-electron wavefunction models.
 *
 * Conventions: the one-body operator is -Delta - Z/|x| (kinetic term -Delta,
 * not -Delta/2). Hydrogenic orbitals are therefore e^{-Z r/(2n)} times a
 * Laguerre polynomial, with energy -Z^2/(4 n^2). Angular factors are
 * sqrt(4 pi) Y_{l,m}, so an s orbital is exactly 1 at the nucleus and the
 * 1s orbital for Z = 2 is e^{-r}.
 *
 * Models are immutable values. Every operation is a pure function.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rholab/core.hpp"
#include "rholab/montecarlo.hpp"
#include "rholab/quadrature.hpp"
#include "rholab/special.hpp"

namespace rholab {

enum class Statistics { antisymmetric, symmetric };

inline const char* to_string(Statistics s) {
  return s == Statistics::symmetric ? "symmetric" : "antisymmetric";
}

/// Split of the N electrons into two exchange groups (N = n1 + n2).
struct SymmetryClass {
  int n1 = 1;
  int n2 = 0;
  Statistics statistics1 = Statistics::antisymmetric;
  Statistics statistics2 = Statistics::antisymmetric;

  int electrons() const { return n1 + n2; }
  void validate() const {
    if (n1 < 0 || n2 < 0) throw DomainError("SymmetryClass: group sizes must be >= 0");
    if (n1 + n2 < 1) throw DomainError("SymmetryClass: need at least one electron");
  }
};

/// Positions x_1..x_N; electron j is coords[j].
using Coordinates = std::vector<Vec3>;

// ---------------------------------------------------------------------------
// One-electron orbitals
// ---------------------------------------------------------------------------

/**
 * phi(x) = P(r) e^{-zeta r} sqrt(4 pi) r^l Y_{l,m}(x/r), with
 *   hydrogenic(Z, n, l, m): zeta = Z/(2n), P = (Z/n)^l L^{(2l+1)}_{n-l-1}(Z r/n)
 *   slater(zeta, n, l, m):  P = r^{n-1-l}
 */
struct Orbital {
  enum class Kind { hydrogenic, slater };
  Kind kind = Kind::hydrogenic;
  double charge = 1.0;  // Z (hydrogenic) or zeta (slater)
  int n = 1, l = 0, m = 0;

  static Orbital hydrogenic(double z, int n, int l, int m) {
    Orbital o{Kind::hydrogenic, z, n, l, m};
    o.validate();
    return o;
  }
  static Orbital slater(double zeta, int n, int l, int m) {
    Orbital o{Kind::slater, zeta, n, l, m};
    o.validate();
    return o;
  }

  void validate() const {
    if (!(charge > 0.0)) throw DomainError("Orbital: charge/exponent must be positive");
    if (n < 1 || l < 0 || l >= n || std::abs(m) > l)
      throw DomainError("Orbital: invalid quantum numbers (need n>=1, 0<=l<n, |m|<=l)");
    if (l > 6) throw UnsupportedError("Orbital: l > 6 not supported");
  }

  double decay_rate() const { return kind == Kind::hydrogenic ? charge / (2.0 * n) : charge; }

  /// One-body energy for the -Delta - Z/|x| convention (hydrogenic only).
  std::optional<double> energy() const {
    if (kind != Kind::hydrogenic) return std::nullopt;
    return -charge * charge / (4.0 * n * n);
  }

  template <class T>
  T radial_polynomial(const T& r) const {
    if (kind == Kind::hydrogenic) {
      const double s = charge / n;
      return T(std::pow(s, l)) * assoc_laguerre(n - l - 1, 2.0 * l + 1.0, T(s) * r);
    }
    return ipow(r, n - 1 - l);
  }

  template <class T>
  T evaluate(const T& x, const T& y, const T& z) const {
    using std::exp;
    using std::sqrt;
    const T r2 = x * x + y * y + z * z;
    T r = (value_of(r2) == 0.0) ? T(0.0) : sqrt(r2);
    return radial_polynomial(r) * exp(T(-decay_rate()) * r) * T(std::sqrt(4.0 * pi)) *
           solid_harmonic(l, m, x, y, z);
  }

  double operator()(const Vec3& p) const { return evaluate<double>(p[0], p[1], p[2]); }

  /// Value and exact gradient; raises at the nucleus (cusp).
  Dual3 with_gradient(const Vec3& p) const {
    if (norm(p) == 0.0) throw DomainError("orbital gradient requested at the nucleus (cusp)");
    return evaluate<Dual3>(Dual3::variable(p[0], 0), Dual3::variable(p[1], 1),
                           Dual3::variable(p[2], 2));
  }

  bool operator==(const Orbital&) const = default;
};

/// Generic 3D cubature of f(x) over R^3 for integrands decaying like e^{-rate r}.
template <class Fn>
double integrate_r3(Fn&& f, double rate, int radial_nodes = 64, int n_theta = 12,
                    int n_phi = 24) {
  static thread_local std::map<std::pair<int, int>, SphereRule> cache;
  auto key = std::make_pair(n_theta, n_phi);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, SphereRule::product(n_theta, n_phi)).first;
  const SphereRule& sphere = it->second;
  return integrate_half_line(
      [&](double r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < sphere.size(); ++k) acc += sphere.weights[k] * f(r * sphere.points[k]);
        return acc * r * r;
      },
      rate, radial_nodes);
}

/// <a, b> over R^3; exact up to rounding for the shipped orbital classes.
inline double orbital_overlap(const Orbital& a, const Orbital& b) {
  if (a.l != b.l || a.m != b.m) return 0.0;
  const double rate = a.decay_rate() + b.decay_rate();
  const int l = a.l;
  // Angular parts are orthonormal up to the 4 pi factor.
  return 4.0 * pi *
         integrate_half_line(
             [&](double r) {
               return a.radial_polynomial(r) * b.radial_polynomial(r) * std::pow(r, 2 * l + 2) *
                      std::exp(-rate * r);
             },
             rate, 64);
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// psi = prod_j e^{-alpha_j |x_j|}
struct SeparableExponential {
  std::vector<double> alphas;
};

/**
 * psi = prod_k e^{-alpha_k |y_k|} with y_k = sum_j M_kj x_j. The 3N x 3N
 * coordinate map is M (x) I_3 for an orthogonal N x N mixing matrix M.
 */
struct OrthogonalMixedExponential {
  std::vector<double> mixing;  // row-major N x N
  std::vector<double> alphas;

  int size() const { return static_cast<int>(alphas.size()); }
  double at(int k, int j) const { return mixing[static_cast<std::size_t>(k * size() + j)]; }
};

/// One electron in the eigenfunction of -Delta - Z/|x| with quantum numbers (n, l, m).
struct Hydrogenic {
  double Z = 1.0;
  int n = 1, l = 0, m = 0;

  Orbital orbital() const { return Orbital{Orbital::Kind::hydrogenic, Z, n, l, m}; }
};

/**
 * (Anti)symmetrized product per exchange group: orbitals[0..n1) fill group 1
 * and orbitals[n1..N) fill group 2; groups of size <= 4 by direct expansion.
 */
struct DeterminantProduct {
  std::vector<Orbital> orbitals;
  SymmetryClass sym;
};

struct Metadata {
  std::optional<double> energy;
  std::optional<double> alpha0;
  std::optional<double> nuclear_charge;
  std::optional<double> decay_c0;
  std::optional<double> decay_gamma;
  double scale = 1.0;  // psi is multiplied by this amplitude
};

using ModelKind =
    std::variant<SeparableExponential, OrthogonalMixedExponential, Hydrogenic, DeterminantProduct>;

namespace detail {

inline void check_rates(const std::vector<double>& alphas, const char* who) {
  if (alphas.empty()) throw DomainError(std::string(who) + ": need at least one exponent");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a))
      throw DomainError(std::string(who) + ": exponents must be positive and finite");
}

inline double permutation_sign(const std::vector<int>& p) {
  int inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inversions;
  return (inversions % 2 == 0) ? 1.0 : -1.0;
}

/// det (antisymmetric) or permanent (symmetric) of a small square matrix.
inline double det_or_perm(const Eigen::MatrixXd& a, Statistics stat) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  double acc = 0.0;
  do {
    double term = (stat == Statistics::antisymmetric) ? permutation_sign(p) : 1.0;
    for (int i = 0; i < n; ++i) term *= a(i, p[i]);
    acc += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return acc;
}

inline Eigen::MatrixXd remove_row_col(const Eigen::MatrixXd& a, int row, int col) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd out(n - 1, n - 1);
  for (int i = 0, oi = 0; i < n; ++i) {
    if (i == row) continue;
    for (int j = 0, oj = 0; j < n; ++j) {
      if (j == col) continue;
      out(oi, oj++) = a(i, j);
    }
    ++oi;
  }
  return out;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

class WavefunctionModel {
 public:
  WavefunctionModel(ModelKind kind, Metadata meta = {}) : kind_(std::move(kind)), meta_(meta) {
    validate();
  }

  static WavefunctionModel separable(std::vector<double> alphas, Metadata meta = {}) {
    return WavefunctionModel(SeparableExponential{std::move(alphas)}, meta);
  }
  static WavefunctionModel mixed(std::vector<double> mixing, std::vector<double> alphas,
                                 Metadata meta = {}) {
    return WavefunctionModel(OrthogonalMixedExponential{std::move(mixing), std::move(alphas)}, meta);
  }
  /// Two electrons mixed by the 45-degree rotation (x1 +- x2)/sqrt(2).
  static WavefunctionModel rotated_pair(double alpha1, double alpha2, Metadata meta = {}) {
    const double s = 1.0 / std::sqrt(2.0);
    return mixed({s, s, s, -s}, {alpha1, alpha2}, meta);
  }
  static WavefunctionModel hydrogenic(double z, int n = 1, int l = 0, int m = 0, Metadata meta = {}) {
    return WavefunctionModel(Hydrogenic{z, n, l, m}, meta);
  }

  const ModelKind& kind() const { return kind_; }
  const Metadata& metadata() const { return meta_; }
  double scale() const { return meta_.scale; }

  /// Same model with psi multiplied by lambda.
  WavefunctionModel scaled(double lambda) const {
    Metadata m = meta_;
    m.scale *= lambda;
    return WavefunctionModel(kind_, m);
  }

  int electrons() const {
    return std::visit(
        [](const auto& k) -> int {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SeparableExponential>) return static_cast<int>(k.alphas.size());
          else if constexpr (std::is_same_v<K, OrthogonalMixedExponential>) return k.size();
          else if constexpr (std::is_same_v<K, Hydrogenic>) return 1;
          else return k.sym.electrons();
        },
        kind_);
  }

  std::string kind_name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SeparableExponential>) return "separable";
          else if constexpr (std::is_same_v<K, OrthogonalMixedExponential>) return "mixed";
          else if constexpr (std::is_same_v<K, Hydrogenic>) return "hydrogenic";
          else return "determinant";
        },
        kind_);
  }

  template <class K>
  const K* as() const {
    return std::get_if<K>(&kind_);
  }

 private:
  void validate() const {
    if (!(meta_.scale != 0.0) || !std::isfinite(meta_.scale))
      throw DomainError("model scale must be finite and nonzero");
    if (meta_.alpha0 && !(*meta_.alpha0 > 0.0)) throw DomainError("metadata alpha0 must be positive");
    std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SeparableExponential>) {
            detail::check_rates(k.alphas, "SeparableExponential");
          } else if constexpr (std::is_same_v<K, OrthogonalMixedExponential>) {
            detail::check_rates(k.alphas, "OrthogonalMixedExponential");
            const int n = k.size();
            if (k.mixing.size() != static_cast<std::size_t>(n * n))
              throw DimensionError("OrthogonalMixedExponential: mixing must be N x N");
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) {
                double g = 0.0;
                for (int r = 0; r < n; ++r) g += k.at(r, i) * k.at(r, j);
                if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-12)
                  throw DomainError("OrthogonalMixedExponential: mixing is not orthogonal to 1e-12");
              }
          } else if constexpr (std::is_same_v<K, Hydrogenic>) {
            k.orbital().validate();
          } else {
            k.sym.validate();
            if (static_cast<int>(k.orbitals.size()) != k.sym.electrons())
              throw DimensionError("DeterminantProduct: orbital count must equal n1 + n2");
            if (k.sym.n1 > 4 || k.sym.n2 > 4)
              throw UnsupportedError("DeterminantProduct: groups larger than 4 are not supported");
            for (const auto& o : k.orbitals) o.validate();
          }
        },
        kind_);
  }

  ModelKind kind_;
  Metadata meta_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline void check_coords(const WavefunctionModel& model, std::span<const Vec3> x) {
  if (static_cast<int>(x.size()) != model.electrons())
    throw DimensionError("coordinate count " + std::to_string(x.size()) +
                         " does not match model electron count " +
                         std::to_string(model.electrons()));
  for (const auto& p : x)
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
      throw DomainError("electron coordinates must be finite");
}

inline Vec3 mixed_coordinate(const OrthogonalMixedExponential& k, int row, std::span<const Vec3> x) {
  Vec3 y{0, 0, 0};
  for (int j = 0; j < k.size(); ++j) y = y + k.at(row, j) * x[j];
  return y;
}

/// Group determinant/permanent over electrons [first, first + count).
inline double group_value(const DeterminantProduct& d, int first, int count, Statistics stat,
                          std::span<const Vec3> x) {
  Eigen::MatrixXd a(count, count);
  for (int i = 0; i < count; ++i)
    for (int b = 0; b < count; ++b) a(i, b) = d.orbitals[first + b](x[first + i]);
  return det_or_perm(a, stat);
}

/// Gradient of a group determinant/permanent with respect to its electrons.
inline void group_gradient(const DeterminantProduct& d, int first, int count, Statistics stat,
                           std::span<const Vec3> x, std::vector<Vec3>& grad_out, double& value_out) {
  std::vector<std::vector<Dual3>> v(count, std::vector<Dual3>(count));
  for (int i = 0; i < count; ++i)
    for (int b = 0; b < count; ++b) v[i][b] = d.orbitals[first + b].with_gradient(x[first + i]);
  std::vector<int> p(count);
  std::iota(p.begin(), p.end(), 0);
  value_out = 0.0;
  for (int i = 0; i < count; ++i) grad_out[first + i] = {0, 0, 0};
  if (count == 0) {
    value_out = 1.0;
    return;
  }
  do {
    const double sign = (stat == Statistics::antisymmetric) ? permutation_sign(p) : 1.0;
    double prod = sign;
    for (int i = 0; i < count; ++i) prod *= v[i][p[i]].v;
    value_out += prod;
    for (int i = 0; i < count; ++i) {
      double others = sign;
      for (int k = 0; k < count; ++k)
        if (k != i) others *= v[k][p[k]].v;
      const auto& g = v[i][p[i]].d;
      grad_out[first + i] = grad_out[first + i] + others * Vec3{g[0], g[1], g[2]};
    }
  } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace detail

/// psi(x). Raises DimensionError when x does not hold exactly N points.
inline double evaluate(const WavefunctionModel& model, std::span<const Vec3> x) {
  detail::check_coords(model, x);
  const double value = std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SeparableExponential>) {
          double e = 0.0;
          for (std::size_t j = 0; j < k.alphas.size(); ++j) e += k.alphas[j] * norm(x[j]);
          return std::exp(-e);
        } else if constexpr (std::is_same_v<K, OrthogonalMixedExponential>) {
          double e = 0.0;
          for (int r = 0; r < k.size(); ++r) e += k.alphas[r] * norm(detail::mixed_coordinate(k, r, x));
          return std::exp(-e);
        } else if constexpr (std::is_same_v<K, Hydrogenic>) {
          return k.orbital()(x[0]);
        } else {
          return detail::group_value(k, 0, k.sym.n1, k.sym.statistics1, x) *
                 detail::group_value(k, k.sym.n1, k.sym.n2, k.sym.statistics2, x);
        }
      },
      model.kind());
  return model.scale() * value;
}

inline double evaluate(const WavefunctionModel& model, std::initializer_list<Vec3> x) {
  const std::vector<Vec3> v(x);
  return evaluate(model, std::span<const Vec3>(v));
}

/**
 * Exact gradient of psi as N three-vectors (a point of R^{3N}). Raises
 * DomainError on the cusp set (an electron, or a mixed coordinate, at 0).
 */
inline std::vector<Vec3> gradient(const WavefunctionModel& model, std::span<const Vec3> x) {
  detail::check_coords(model, x);
  const int n = model.electrons();
  std::vector<Vec3> g(n, Vec3{0, 0, 0});
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SeparableExponential>) {
          const double psi = evaluate(model, x);
          for (int j = 0; j < n; ++j) {
            const double r = norm(x[j]);
            if (r == 0.0) throw DomainError("gradient at a cusp point (electron at the nucleus)");
            g[j] = (-k.alphas[j] * psi / r) * x[j];
          }
        } else if constexpr (std::is_same_v<K, OrthogonalMixedExponential>) {
          const double psi = evaluate(model, x);
          for (int r = 0; r < k.size(); ++r) {
            const Vec3 y = detail::mixed_coordinate(k, r, x);
            const double len = norm(y);
            if (len == 0.0) throw DomainError("gradient at a cusp point (mixed coordinate vanishes)");
            for (int j = 0; j < n; ++j) g[j] = g[j] + (-k.alphas[r] * k.at(r, j) * psi / len) * y;
          }
        } else if constexpr (std::is_same_v<K, Hydrogenic>) {
          const Dual3 v = k.orbital().with_gradient(x[0]);
          g[0] = model.scale() * Vec3{v.d[0], v.d[1], v.d[2]};
        } else {
          double v1 = 1.0, v2 = 1.0;
          detail::group_gradient(k, 0, k.sym.n1, k.sym.statistics1, x, g, v1);
          detail::group_gradient(k, k.sym.n1, k.sym.n2, k.sym.statistics2, x, g, v2);
          for (int j = 0; j < k.sym.n1; ++j) g[j] = (model.scale() * v2) * g[j];
          for (int j = k.sym.n1; j < n; ++j) g[j] = (model.scale() * v1) * g[j];
        }
      },
      model.kind());
  return g;
}

// ---------------------------------------------------------------------------
// Determinant construction and Gram machinery
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::MatrixXd group_gram(const DeterminantProduct& d, int first, int count) {
  Eigen::MatrixXd g(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) g(a, b) = orbital_overlap(d.orbitals[first + a], d.orbitals[first + b]);
  return g;
}

/// || group ||^2 = n! det(G) (antisymmetric) or n! perm(G) (symmetric).
inline double group_norm_squared(const DeterminantProduct& d, int first, int count, Statistics stat) {
  if (count == 0) return 1.0;
  return factorial(count) * det_or_perm(group_gram(d, first, count), stat);
}

}  // namespace detail

/**
 * Builds the (anti)symmetrized product model. Raises DegenerateError when an
 * antisymmetric group has linearly dependent orbitals (the determinant
 * vanishes identically).
 */
inline WavefunctionModel build_determinant(std::vector<Orbital> orbitals, SymmetryClass sym,
                                           Metadata meta = {}) {
  sym.validate();
  if (static_cast<int>(orbitals.size()) != sym.electrons())
    throw DimensionError("build_determinant: need n1 + n2 orbitals");
  DeterminantProduct d{std::move(orbitals), sym};
  auto check = [&](int first, int count, Statistics stat) {
    if (stat != Statistics::antisymmetric || count < 2) return;
    const Eigen::MatrixXd g = detail::group_gram(d, first, count);
    double diag = 1.0;
    for (int i = 0; i < count; ++i) diag *= g(i, i);
    if (g.determinant() <= 1e-10 * diag)
      throw DegenerateError("build_determinant: linearly dependent orbitals in an antisymmetric group");
  };
  check(0, sym.n1, sym.statistics1);
  check(sym.n1, sym.n2, sym.statistics2);
  return WavefunctionModel(std::move(d), meta);
}

// ---------------------------------------------------------------------------
// Analytic metadata
// ---------------------------------------------------------------------------

/// ||psi||^2 in closed form (or exact Gram quadrature for determinants).
inline Estimate norm_squared(const WavefunctionModel& model) {
  const double s2 = model.scale() * model.scale();
  const double v = std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SeparableExponential> ||
                      std::is_same_v<K, OrthogonalMixedExponential>) {
          double p = 1.0;
          for (double a : k.alphas) p *= pi / (a * a * a);
          return p;
        } else if constexpr (std::is_same_v<K, Hydrogenic>) {
          const Orbital o = k.orbital();
          return orbital_overlap(o, o);
        } else {
          return detail::group_norm_squared(k, 0, k.sym.n1, k.sym.statistics1) *
                 detail::group_norm_squared(k, k.sym.n1, k.sym.n2, k.sym.statistics2);
        }
      },
      model.kind());
  return {s2 * v, 0.0};
}

/**
 * Energy of the model as an eigenfunction of its one-body Hamiltonian:
 * -Z^2/(4 n^2) for Hydrogenic, the orbital-energy sum for determinants built
 * from hydrogenic orbitals sharing one Z (non-interacting atom), otherwise
 * the metadata value or nothing.
 */
inline std::optional<double> energy_of(const WavefunctionModel& model) {
  if (model.metadata().energy) return model.metadata().energy;
  if (const auto* h = model.as<Hydrogenic>()) return h->orbital().energy();
  if (const auto* d = model.as<DeterminantProduct>()) {
    double e = 0.0;
    for (const auto& o : d->orbitals) {
      if (o.kind != Orbital::Kind::hydrogenic || o.charge != d->orbitals.front().charge) return std::nullopt;
      e += *o.energy();
    }
    return e;
  }
  return std::nullopt;
}

/// Nuclear charge Z: from the model for hydrogenic classes, else metadata.
inline std::optional<double> nuclear_charge(const WavefunctionModel& model) {
  if (model.metadata().nuclear_charge) return model.metadata().nuclear_charge;
  if (const auto* h = model.as<Hydrogenic>()) return h->Z;
  if (const auto* d = model.as<DeterminantProduct>()) {
    for (const auto& o : d->orbitals)
      if (o.kind != Orbital::Kind::hydrogenic || o.charge != d->orbitals.front().charge) return std::nullopt;
    return d->orbitals.front().charge;
  }
  return std::nullopt;
}

/**
 * The sharp L^2 exponential rate alpha0 for the shipped classes: min alpha
 * for (mixed) exponentials, Z/(2n) for hydrogenic, the slowest orbital rate
 * for determinants. Metadata overrides.
 */
inline double analytic_alpha0(const WavefunctionModel& model) {
  if (model.metadata().alpha0) return *model.metadata().alpha0;
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SeparableExponential> ||
                      std::is_same_v<K, OrthogonalMixedExponential>) {
          return *std::min_element(k.alphas.begin(), k.alphas.end());
        } else if constexpr (std::is_same_v<K, Hydrogenic>) {
          return k.orbital().decay_rate();
        } else {
          double r = k.orbitals.front().decay_rate();
          for (const auto& o : k.orbitals) r = std::min(r, o.decay_rate());
          return r;
        }
      },
      model.kind());
}

/// True when every rho_j depends on |x| only.
inline bool radially_symmetric(const WavefunctionModel& model) {
  if (model.as<SeparableExponential>() || model.as<OrthogonalMixedExponential>()) return true;
  if (const auto* h = model.as<Hydrogenic>()) return h->l == 0;
  const auto& d = *model.as<DeterminantProduct>();
  return std::all_of(d.orbitals.begin(), d.orbitals.end(), [](const Orbital& o) { return o.l == 0; });
}

/// Largest angular degree appearing in the model (0 for exponential classes).
inline int angular_degree(const WavefunctionModel& model) {
  if (const auto* h = model.as<Hydrogenic>()) return h->l;
  if (const auto* d = model.as<DeterminantProduct>()) {
    int l = 0;
    for (const auto& o : d->orbitals) l = std::max(l, o.l);
    return l;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Translation-gradient norm P^2 = || sum_j grad_j psi ||^2
// ---------------------------------------------------------------------------

namespace detail {

// <T_k D, T_k D> for one group, T_k = sum over the group's electrons of d/dx_k.
inline double group_translation_norm(const DeterminantProduct& d, int first, int count, Statistics stat) {
  if (count == 0) return 0.0;
  double rate = 0.0;
  for (int a = 0; a < count; ++a) rate = std::max(rate, d.orbitals[first + a].decay_rate());
  double min_rate = d.orbitals[first].decay_rate();
  for (int a = 0; a < count; ++a) min_rate = std::min(min_rate, d.orbitals[first + a].decay_rate());
  int lmax = 0;
  for (int a = 0; a < count; ++a) lmax = std::max(lmax, d.orbitals[first + a].l);
  const int n_theta = lmax + 4, n_phi = 2 * lmax + 8;
  auto f = [&](int a, int k, const Vec3& p) -> double {
    // k < 0: plain orbital, else its k-th Cartesian derivative
    if (k < 0) return d.orbitals[first + a](p);
    if (norm(p) == 0.0) return 0.0;
    return d.orbitals[first + a].with_gradient(p).d[k];
  };
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    // Overlaps among {phi_a} and {d_k phi_a}.
    Eigen::MatrixXd s00(count, count), s01(count, count), s11(count, count);
    for (int a = 0; a < count; ++a)
      for (int b = 0; b < count; ++b) {
        s00(a, b) = orbital_overlap(d.orbitals[first + a], d.orbitals[first + b]);
        s01(a, b) = integrate_r3([&](const Vec3& p) { return f(a, -1, p) * f(b, k, p); }, 2.0 * min_rate,
                                 64, n_theta, n_phi);
        s11(a, b) = integrate_r3([&](const Vec3& p) { return f(a, k, p) * f(b, k, p); }, 2.0 * min_rate,
                                 64, n_theta, n_phi);
      }
    // T_k D = sum_a D_a with column a differentiated; <D_a, D_b> = n! det/perm(S^{ab}).
    for (int a = 0; a < count; ++a)
      for (int b = 0; b < count; ++b) {
        Eigen::MatrixXd s(count, count);
        for (int c = 0; c < count; ++c)
          for (int e = 0; e < count; ++e) {
            const bool dc = (c == a), de = (e == b);
            if (dc && de) s(c, e) = s11(c, e);
            else if (dc) s(c, e) = s01(e, c);
            else if (de) s(c, e) = s01(c, e);
            else s(c, e) = s00(c, e);
          }
        total += factorial(count) * det_or_perm(s, stat);
      }
  }
  (void)rate;
  return total;
}

}  // namespace detail

/**
 * P^2 in closed form: separable sum alpha_j^2 ||psi||^2; mixed
 * sum_k alpha_k^2 (sum_j M_kj)^2 ||psi||^2; hydrogenic |E| ||psi||^2 (virial);
 * determinants through exact overlaps of orbitals and their derivatives.
 */
inline Estimate translation_gradient_norm_squared(const WavefunctionModel& model) {
  const double nsq = norm_squared(model).value;
  const double v = std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SeparableExponential>) {
          double s = 0.0;
          for (double a : k.alphas) s += a * a;
          return s * nsq;
        } else if constexpr (std::is_same_v<K, OrthogonalMixedExponential>) {
          double s = 0.0;
          for (int r = 0; r < k.size(); ++r) {
            double col = 0.0;
            for (int j = 0; j < k.size(); ++j) col += k.at(r, j);
            s += k.alphas[r] * k.alphas[r] * col * col;
          }
          return s * nsq;
        } else if constexpr (std::is_same_v<K, Hydrogenic>) {
          return -*k.orbital().energy() * nsq;
        } else {
          const double s2 = model.scale() * model.scale();
          const double n1 = detail::group_norm_squared(k, 0, k.sym.n1, k.sym.statistics1);
          const double n2 = detail::group_norm_squared(k, k.sym.n1, k.sym.n2, k.sym.statistics2);
          const double t1 = detail::group_translation_norm(k, 0, k.sym.n1, k.sym.statistics1);
          const double t2 = detail::group_translation_norm(k, k.sym.n1, k.sym.n2, k.sym.statistics2);
          // Cross terms <T D, D> vanish (integral of a total derivative).
          return s2 * (t1 * n2 + n1 * t2);
        }
      },
      model.kind());
  return {v, 0.0};
}

// ---------------------------------------------------------------------------
// Monte Carlo cross-checks over R^{3N}
// ---------------------------------------------------------------------------

namespace detail {

/// Mean of g(x) / q(x) with x drawn from the product exponential majorant.
template <class Fn>
Estimate majorant_integral(const WavefunctionModel& model, const McConfig& cfg, std::uint64_t stream,
                           Fn&& g) {
  const int n = model.electrons();
  const double rate = 2.0 * analytic_alpha0(model) * 0.9;
  return mc_mean(cfg, stream, [&](Rng& rng) {
    Coordinates x(n);
    double log_q = 0.0;
    for (int j = 0; j < n; ++j) {
      x[j] = sample_exponential(rng, rate);
      log_q += exponential_log_pdf(x[j], rate);
    }
    return g(std::span<const Vec3>(x)) * std::exp(-log_q);
  });
}

}  // namespace detail

/// ||psi||^2 by importance sampling (oracle for the closed forms).
inline Estimate norm_squared_mc(const WavefunctionModel& model, const McConfig& cfg) {
  return detail::majorant_integral(model, cfg, 11, [&](std::span<const Vec3> x) {
    const double v = evaluate(model, x);
    return v * v;
  });
}

/// P^2 by importance sampling.
inline Estimate translation_gradient_norm_squared_mc(const WavefunctionModel& model, const McConfig& cfg) {
  return detail::majorant_integral(model, cfg, 12, [&](std::span<const Vec3> x) {
    const auto g = gradient(model, x);
    Vec3 t{0, 0, 0};
    for (const auto& gj : g) t = t + gj;
    return dot(t, t);
  });
}

// ---------------------------------------------------------------------------
// Ray slopes and the hypersphere grid
// ---------------------------------------------------------------------------

/// A direction in R^{3N} stored per electron; unit Euclidean norm overall.
using Direction = std::vector<Vec3>;

/**
 * Least-squares slope of t -> -ln|psi(t Omega)| over [t1, t2] (16 nodes).
 * For separable exponentials this is sum_j alpha_j |omega_j| exactly.
 */
inline double ray_log_slope(const WavefunctionModel& model, const Direction& omega, double t1, double t2,
                            int nodes = 16) {
  if (!(t2 > t1 && t1 > 0.0)) throw DomainError("ray_log_slope: need t2 > t1 > 0");
  if (static_cast<int>(omega.size()) != model.electrons())
    throw DimensionError("ray_log_slope: direction dimension mismatch");
  double st = 0, sy = 0, stt = 0, sty = 0;
  Coordinates x(omega.size());
  for (int i = 0; i < nodes; ++i) {
    const double t = t1 + (t2 - t1) * i / (nodes - 1);
    for (std::size_t j = 0; j < omega.size(); ++j) x[j] = t * omega[j];
    const double v = std::abs(evaluate(model, x));
    if (!(v > 0.0)) throw DomainError("ray_log_slope: psi vanishes along the ray");
    const double y = -std::log(v);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  return (nodes * sty - st * sy) / (nodes * stt - st * st);
}

/**
 * Quasi-uniform grid on S^{3N-1} built recursively as
 * (cos(theta) u, sin(theta) w) with u on an antipodally symmetric S^2 set,
 * w on the grid for N-1 electrons and theta on `levels` equispaced values in
 * [0, pi/2]. Contains the single-electron axes exactly, and all
 * (u, +-u)/sqrt(2) pairs.
 */
inline std::vector<Direction> hypersphere_grid(int electrons, const SphereRule& sphere, int levels) {
  std::vector<Direction> out;
  if (electrons == 1) {
    for (const auto& p : sphere.points) out.push_back({p});
    return out;
  }
  const auto rest = hypersphere_grid(electrons - 1, sphere, levels);
  for (int i = 0; i < levels; ++i) {
    const double theta = 0.5 * pi * i / (levels - 1);
    const double c = (i == levels - 1) ? 0.0 : std::cos(theta);
    const double s = (i == 0) ? 0.0 : std::sin(theta);
    for (std::size_t a = 0; a < sphere.size(); ++a) {
      if (i == levels - 1 && a > 0) break;
      for (std::size_t b = 0; b < rest.size(); ++b) {
        if (i == 0 && b > 0) break;
        Direction d;
        d.push_back(c * sphere.points[a]);
        for (const auto& w : rest[b]) d.push_back(s * w);
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

/// Default grid: ~10^4 directions for N = 2.
inline std::vector<Direction> default_hypersphere_grid(int electrons) {
  if (electrons == 1) return hypersphere_grid(1, SphereRule::product(8, 16), 2);
  if (electrons == 2) return hypersphere_grid(2, SphereRule::product(4, 8), 11);
  if (electrons == 3) return hypersphere_grid(3, SphereRule::product(2, 4), 7);
  return hypersphere_grid(electrons, SphereRule::product(1, 2), 5);
}

struct Alpha0Estimate {
  double value = 0.0;
  Direction argmin;
  std::size_t rays = 0;
  std::size_t skipped = 0;  // rays along which psi vanishes
};

/// alpha0 as the minimum ray slope over a hypersphere grid.
inline Alpha0Estimate estimate_alpha0(const WavefunctionModel& model, const std::vector<Direction>& grid,
                                      double t1 = 20.0, double t2 = 40.0) {
  auto slopes = parallel_map(grid.size(), [&](std::size_t i) -> std::optional<double> {
    try {
      return ray_log_slope(model, grid[i], t1, t2);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  });
  Alpha0Estimate est;
  est.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!slopes[i]) {
      ++est.skipped;
      continue;
    }
    ++est.rays;
    if (*slopes[i] < est.value) {
      est.value = *slopes[i];
      est.argmin = grid[i];
    }
  }
  if (est.rays == 0) throw DomainError("estimate_alpha0: psi vanishes on every ray");
  return est;
}

inline Alpha0Estimate estimate_alpha0(const WavefunctionModel& model) {
  return estimate_alpha0(model, default_hypersphere_grid(model.electrons()));
}

}  // namespace rholab
