#pragma once

// Monte Carlo stochastic-geometry oracle: samples Poisson deployments on a
// disk around a typical user at the origin, computes the downlink SINR under
// nearest-transmitter association and Rayleigh fading, and estimates coverage
// probability and conditional spectral efficiency with confidence intervals.
//
// Determinism contract: trial k draws exclusively from the child stream
// SplitMix64(seed).stream(k).  Within a trial the draw order is fixed:
// first the Poisson point count, then per point a radius uniform, an angle
// uniform, and a fading exponential.  Estimates therefore depend only on
// (seed, trials, parameters), never on evaluation order, and repeated runs
// are bit-identical.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cransim/analytics.hpp"
#include "cransim/rng.hpp"

namespace cransim::geometry {

struct McConfig {
  std::uint64_t trials = 200000;
  double window_radius_factor = 30.0;  // disk radius = factor / sqrt(lambda)
  std::uint64_t seed = 42;
  double fading_mean = 1.0;  // Rayleigh power fading: exponential, unit mean
};

inline void check_config(const McConfig& cfg) {
  if (cfg.trials < 1)
    throw std::domain_error("McConfig.trials: must be >= 1");
  if (!(cfg.window_radius_factor >= 10.0))
    throw std::domain_error("McConfig.window_radius_factor: must be >= 10");
  if (!(cfg.fading_mean > 0.0))
    throw std::domain_error("McConfig.fading_mean: must be positive");
}

// One sampled deployment, positions relative to the typical user at the
// origin, with per-point channel power gains.
struct NetworkRealization {
  std::vector<std::array<double, 2>> rrh_points;  // meters
  std::vector<double> fading;                     // channel power gains
  bool empty() const { return rrh_points.empty(); }
};

namespace detail {

// Poisson sampler.  Small means use the multiplication method; large means
// use Hoermann's transformed rejection with squeeze (PTRS).  Both consume a
// variable number of uniforms, which is safe because every trial owns its
// own stream.
inline std::uint64_t poisson_sample(SplitMix64& rng, double mean) {
  if (!(mean >= 0.0))
    throw std::domain_error("poisson_sample: mean must be nonnegative");
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = 1.0;
    do {
      prod *= rng.next_double();
      ++k;
    } while (prod > limit);
    return k - 1;
  }
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

// x^(-alpha/2) for squared distances, with cheap decompositions for the
// common path-loss exponents (pow is the single hottest call otherwise).
inline double inv_pow_half(double x, double alpha) {
  if (alpha == 4.0) return 1.0 / (x * x);
  if (alpha == 3.0) return 1.0 / (x * std::sqrt(x));
  if (alpha == 3.5) {
    const double r = std::sqrt(x);          // x^0.5
    return 1.0 / (x * r * std::sqrt(r));    // x^1.75
  }
  return std::pow(x, -0.5 * alpha);
}

}  // namespace detail

// Sample one Poisson deployment on a disk of the given radius.  Point count
// is Poisson(density*pi*radius^2); positions are uniform on the disk; fading
// gains are i.i.d. exponential with unit mean.
inline NetworkRealization sample_ppp(double density, double window_radius,
                                     SplitMix64& rng) {
  if (!(density > 0.0))
    throw std::domain_error("sample_ppp: density must be positive");
  if (!(window_radius > 0.0))
    throw std::domain_error("sample_ppp: window_radius must be positive");
  const double mean =
      density * std::numbers::pi * window_radius * window_radius;
  const std::uint64_t n = detail::poisson_sample(rng, mean);
  NetworkRealization r;
  r.rrh_points.reserve(n);
  r.fading.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = rng.next_double();
    const double angle = 2.0 * std::numbers::pi * rng.next_double();
    const double h = rng.next_exponential(1.0);
    const double radius = window_radius * std::sqrt(u);
    r.rrh_points.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    r.fading.push_back(h);
  }
  return r;
}

// SINR of the typical user at the origin: the nearest point serves, all other
// points interfere, path loss is d^(-alpha).
inline double sinr_at_origin(const NetworkRealization& r, double tx_power,
                             const analytics::RadioEnv& env) {
  if (r.empty())
    throw std::invalid_argument("sinr_at_origin: realization has no points");
  if (!(tx_power > 0.0))
    throw std::domain_error("sinr_at_origin: tx_power must be positive");
  double min_d2 = std::numeric_limits<double>::infinity();
  double serving_gain = 0.0;
  double total_gain = 0.0;
  for (std::size_t i = 0; i < r.rrh_points.size(); ++i) {
    const auto& p = r.rrh_points[i];
    const double d2 = p[0] * p[0] + p[1] * p[1];
    const double g = r.fading[i] * detail::inv_pow_half(d2, env.alpha);
    total_gain += g;
    if (d2 < min_d2) {
      min_d2 = d2;
      serving_gain = g;
    }
  }
  const double interference = tx_power * (total_gain - serving_gain);
  return tx_power * serving_gain / (env.sigma2 + interference);
}

struct McEstimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal half-width
};

struct McStats {
  McEstimate coverage;
  McEstimate spectral_efficiency;  // conditioned on SINR > gamma
  std::uint64_t covered_trials = 0;
};

// One pass over all trials estimating coverage probability and, over the
// covered trials, the conditional mean of log2(1+SINR).  Distances are
// accumulated as squared radii (the disk radius scales out through u), which
// consumes exactly the same draws in the same order as sample_ppp.
inline McStats mc_stats(const analytics::RadioEnv& env, double lambda_active,
                        double tx_power, const McConfig& cfg) {
  analytics::check_env(env);
  check_config(cfg);
  if (!(lambda_active > 0.0))
    throw std::domain_error("mc_stats: lambda_active must be positive");
  if (!(tx_power > 0.0))
    throw std::domain_error("mc_stats: tx_power must be positive");

  const double radius = cfg.window_radius_factor / std::sqrt(lambda_active);
  const double r2 = radius * radius;
  const double mean = lambda_active * std::numbers::pi * r2;
  const SplitMix64 root(cfg.seed);

  std::uint64_t covered = 0;
  double se_sum = 0.0;
  double se_sumsq = 0.0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    SplitMix64 rng = root.stream(t);
    const std::uint64_t n = detail::poisson_sample(rng, mean);
    if (n == 0) continue;  // empty window counts as outage
    double min_d2 = std::numeric_limits<double>::infinity();
    double serving_gain = 0.0;
    double total_gain = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double u = rng.next_double();
      rng.next_double();  // angle draw, kept for order parity with sample_ppp
      const double h = rng.next_exponential(cfg.fading_mean);
      const double d2 = r2 * u;
      const double g = h * detail::inv_pow_half(d2, env.alpha);
      total_gain += g;
      if (d2 < min_d2) {
        min_d2 = d2;
        serving_gain = g;
      }
    }
    const double sinr = tx_power * serving_gain /
                        (env.sigma2 + tx_power * (total_gain - serving_gain));
    if (sinr > env.gamma) {
      ++covered;
      const double se = std::log2(1.0 + sinr);
      se_sum += se;
      se_sumsq += se * se;
    }
  }

  McStats out;
  const double trials = static_cast<double>(cfg.trials);
  const double p = static_cast<double>(covered) / trials;
  out.coverage = {p, 1.96 * std::sqrt(p * (1.0 - p) / trials)};
  out.covered_trials = covered;
  if (covered > 0) {
    const double m = static_cast<double>(covered);
    const double se_mean = se_sum / m;
    double var = 0.0;
    if (covered > 1)
      var = std::max(0.0, (se_sumsq - se_sum * se_sum / m) / (m - 1.0));
    out.spectral_efficiency = {se_mean, 1.96 * std::sqrt(var / m)};
  } else {
    out.spectral_efficiency = {std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()};
  }
  return out;
}

// Fraction of trials with SINR above the threshold, with 95% CI half-width.
inline McEstimate mc_coverage(const analytics::RadioEnv& env,
                              double lambda_active, double tx_power,
                              const McConfig& cfg) {
  return mc_stats(env, lambda_active, tx_power, cfg).coverage;
}

// Mean of log2(1+SINR) over covered trials, with 95% CI half-width.
inline McEstimate mc_spectral_efficiency(const analytics::RadioEnv& env,
                                         double lambda_active, double tx_power,
                                         const McConfig& cfg) {
  const McStats s = mc_stats(env, lambda_active, tx_power, cfg);
  if (s.covered_trials == 0)
    throw std::runtime_error(
        "mc_spectral_efficiency: no covered trials to condition on");
  return s.spectral_efficiency;
}

}  // namespace cransim::geometry
