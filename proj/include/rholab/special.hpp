// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file special.hpp
 * @brief Forward-mode dual numbers, real solid/spherical harmonics and
 * associated Laguerre polynomials, all templated on the scalar type so the
 * same code path yields values and exact gradients.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rholab/core.hpp"

namespace rholab {

/// Value plus gradient with respect to three Cartesian inputs.
struct Dual3 {
  double v = 0.0;
  std::array<double, 3> d{0.0, 0.0, 0.0};

  Dual3() = default;
  Dual3(double value) : v(value) {}  // NOLINT: implicit constant promotion
  Dual3(double value, std::array<double, 3> grad) : v(value), d(grad) {}

  static Dual3 variable(double value, int axis) {
    Dual3 x(value);
    x.d[axis] = 1.0;
    return x;
  }
};

inline Dual3 operator+(const Dual3& a, const Dual3& b) {
  return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}};
}
inline Dual3 operator-(const Dual3& a, const Dual3& b) {
  return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}};
}
inline Dual3 operator-(const Dual3& a) { return {-a.v, {-a.d[0], -a.d[1], -a.d[2]}}; }
inline Dual3 operator*(const Dual3& a, const Dual3& b) {
  return {a.v * b.v,
          {a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1], a.d[2] * b.v + a.v * b.d[2]}};
}
inline Dual3 operator/(const Dual3& a, const Dual3& b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q,
          {(a.d[0] - q * b.d[0]) * inv, (a.d[1] - q * b.d[1]) * inv, (a.d[2] - q * b.d[2]) * inv}};
}
inline Dual3& operator+=(Dual3& a, const Dual3& b) { return a = a + b; }
inline Dual3 chain(const Dual3& a, double value, double derivative) {
  return {value, {derivative * a.d[0], derivative * a.d[1], derivative * a.d[2]}};
}
inline Dual3 exp(const Dual3& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e);
}
inline Dual3 sqrt(const Dual3& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s);
}
inline double value_of(double x) { return x; }
inline double value_of(const Dual3& x) { return x.v; }

/// x^k for a non-negative integer k by repeated multiplication.
template <class T>
T ipow(const T& x, int k) {
  T out(1.0);
  for (int i = 0; i < k; ++i) out = out * x;
  return out;
}

/// Associated Laguerre polynomial L_k^{(a)}(x).
template <class T>
T assoc_laguerre(int k, double a, const T& x) {
  T l0(1.0);
  if (k == 0) return l0;
  T l1 = T(1.0 + a) - x;
  for (int j = 1; j < k; ++j) {
    T l2 = (T(2.0 * j + 1.0 + a) - x) * l1 / T(j + 1.0) - T((j + a) / (j + 1.0)) * l0;
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

/// Index of (l, m) in the packed real-harmonic layout, m in [-l, l].
constexpr int lm_index(int l, int m) { return l * l + l + m; }
constexpr int lm_count(int lmax) { return (lmax + 1) * (lmax + 1); }

/**
 * Real solid harmonic r^l Y_{l,m}(x/r) where Y are the L^2(S^2)-orthonormal
 * real spherical harmonics (no Condon-Shortley phase; m < 0 carries sin|m|phi).
 * Polynomial in (x, y, z), so it is smooth through the origin.
 */
template <class T>
T solid_harmonic(int l, int m, const T& x, const T& y, const T& z) {
  const int am = m < 0 ? -m : m;
  if (am > l) throw DomainError("solid_harmonic: |m| > l");
  // (x + i y)^am
  T c(1.0), s(0.0);
  for (int k = 0; k < am; ++k) {
    T cn = x * c - y * s;
    T sn = x * s + y * c;
    c = cn;
    s = sn;
  }
  const T r2 = x * x + y * y + z * z;
  double dfact = 1.0;
  for (int k = 2 * am - 1; k > 1; k -= 2) dfact *= k;
  T p_prev(0.0);
  T p_cur(dfact);
  for (int ll = am + 1; ll <= l; ++ll) {
    T p_next = (T(2.0 * ll - 1.0) * z * p_cur - T(ll + am - 1.0) * r2 * p_prev) / T(ll - am);
    p_prev = p_cur;
    p_cur = p_next;
  }
  const double log_ratio = std::lgamma(l - am + 1.0) - std::lgamma(l + am + 1.0);
  double normalization = std::sqrt((2.0 * l + 1.0) / (4.0 * pi) * std::exp(log_ratio));
  if (am > 0) normalization *= std::sqrt(2.0);
  return T(normalization) * p_cur * (m >= 0 ? c : s);
}

/// Real spherical harmonic at a unit vector.
inline double real_ylm(int l, int m, const Vec3& unit) {
  return solid_harmonic<double>(l, m, unit[0], unit[1], unit[2]);
}

/// All Y_{l,m}(unit) for l <= lmax, packed by lm_index.
inline std::vector<double> real_ylm_all(int lmax, const Vec3& unit) {
  std::vector<double> out(lm_count(lmax));
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) out[lm_index(l, m)] = real_ylm(l, m, unit);
  return out;
}

/// Spherical Bessel j_0(x) = sin(x)/x with its series near zero.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace rholab
