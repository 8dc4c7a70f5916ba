// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file montecarlo.hpp
 * @brief Sampling configuration, the exponential majorant proposal and the
 * chain-split estimator shared by all Monte Carlo paths.
 *
 * Samples are split over a fixed number of chains, each with its own engine
 * seeded by derive_seed(seed, stream, chain). Chains run in parallel and are
 * merged in chain order, so results do not depend on the worker count.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "rholab/core.hpp"

namespace rholab {

using Rng = std::mt19937_64;

enum class Proposal { exponentialImportance, metropolis };

inline const char* to_string(Proposal p) {
  return p == Proposal::metropolis ? "metropolis" : "exponentialImportance";
}

struct McConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  Proposal proposal = Proposal::exponentialImportance;
  double step_size = 0.6;      // metropolis only
  std::size_t burn_in = 2000;  // metropolis only, per chain
  std::size_t chains = 8;

  void validate() const {
    if (samples < 1) throw DomainError("McConfig: sampleCount must be >= 1");
    if (!(step_size > 0.0)) throw DomainError("McConfig: stepSize must be > 0");
    if (chains < 1) throw DomainError("McConfig: chains must be >= 1");
  }
};

inline Vec3 sample_unit_sphere(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double len = norm(v);
    if (len > 1e-300) return (1.0 / len) * v;
  }
}

/// Draw from q(y) = rate^3/(8 pi) e^{-rate |y|} on R^3.
inline Vec3 sample_exponential(Rng& rng, double rate) {
  std::gamma_distribution<double> radial(3.0, 1.0 / rate);
  const double r = radial(rng);
  return r * sample_unit_sphere(rng);
}

inline double exponential_pdf(const Vec3& y, double rate) {
  return rate * rate * rate / (8.0 * pi) * std::exp(-rate * norm(y));
}

/// Log of the same density, for products of many factors.
inline double exponential_log_pdf(const Vec3& y, double rate) {
  return 3.0 * std::log(rate) - std::log(8.0 * pi) - rate * norm(y);
}

/**
 * Mean of per_sample(rng) over cfg.samples draws split across cfg.chains
 * independent chains. `stream` separates unrelated estimates that share a seed.
 */
template <class Fn>
Estimate mc_mean(const McConfig& cfg, std::uint64_t stream, Fn&& per_sample) {
  cfg.validate();
  const std::size_t chains = std::min(cfg.chains, cfg.samples);
  auto partial = parallel_map(chains, [&](std::size_t c) {
    Rng rng(derive_seed(cfg.seed, stream * 1024 + c));
    const std::size_t n = cfg.samples / chains + (c < cfg.samples % chains ? 1 : 0);
    Accumulator acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(per_sample(rng));
    return acc;
  });
  Accumulator total;
  for (const auto& a : partial) total.merge(a);
  return {total.mean(), total.std_error()};
}

}  // namespace rholab
