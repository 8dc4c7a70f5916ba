// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file core.hpp
 * @brief Shared vocabulary: 3-vectors, error types, estimates, seeding and
 * the deterministic parallel map used by every Monte Carlo path.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rholab {

inline constexpr double pi = std::numbers::pi;

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (cusp points, negative rates...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Electron count or coordinate count mismatch.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An antisymmetrized product that vanishes identically.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Requested method is not available for the model (cost or theory).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Configuration text rejected; carries the 1-based line number (0 = global).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A value together with its one-sigma standard error (0 when exact).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// ---------------------------------------------------------------------------
// Seeding and parallelism
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer; used to derive independent per-chain seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Worker count from RHO_LAB_THREADS, defaulting to the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("RHO_LAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

/**
 * Evaluates fn(i) for i in [0, n) on up to thread_count() workers and returns
 * results in index order. The result is independent of the worker count as
 * long as fn(i) itself is deterministic.
 */
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  const unsigned workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Surface area of the unit sphere S^{d-1} embedded in R^d.
inline double sphere_area(int d) {
  return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Streaming mean/variance (Welford); merged in a fixed order for reproducibility.
struct Accumulator {
  double count = 0.0;
  double mean_ = 0.0;
  double m2 = 0.0;

  void add(double v) {
    count += 1.0;
    const double delta = v - mean_;
    mean_ += delta / count;
    m2 += delta * (v - mean_);
  }
  void merge(const Accumulator& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double total = count + o.count;
    const double delta = o.mean_ - mean_;
    mean_ += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }
  double mean() const { return mean_; }
  double variance() const { return count > 1 ? m2 / (count - 1.0) : 0.0; }
  /// Standard error of the mean.
  double std_error() const { return count > 1 ? std::sqrt(variance() / count) : 0.0; }
};

}  // namespace rholab
