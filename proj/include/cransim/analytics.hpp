#pragma once

// Closed-form stochastic-geometry quantities for a Poisson cellular downlink:
// coverage probability and spectral efficiency of the typical user under
// nearest-transmitter association, Rayleigh fading, and power-law path loss
// d^(-alpha).
//
// Every improper integral is rewritten over a finite interval before numeric
// evaluation.  The two building blocks are
//
//   A(alpha, gamma)  = int_gamma^inf x^(-2/alpha) / (1+x) dx
//                    = (alpha/2) * int_0^b du / (1 + u^(alpha/2)),
//                      b = gamma^(-2/alpha)          (u = x^(-2/alpha))
//
//   int_L^inf dz / (1 + z^(alpha/2)),  split at z=1; the tail over [1,inf)
//   maps to (2/(alpha-2)) * int_0^1 ds / (1 + s^(alpha/(alpha-2)))
//   via z = s^(-2/(alpha-2)), which is smooth for every alpha > 2.
//
// Both substituted integrands are bounded and C^1 on their intervals, so the
// adaptive Gauss-Kronrod kernel reaches the requested absolute tolerance in a
// handful of subdivisions.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cransim/quadrature.hpp"

namespace cransim::analytics {

// Radio environment of one cluster.
struct RadioEnv {
  double alpha;      // path-loss exponent; must exceed 2
  double gamma;      // SINR threshold, linear scale
  double sigma2;     // noise power, watts
  double bandwidth;  // system bandwidth, hertz
};

// The interference factor can integrate its kernel from 0 (the form the
// provisioning lemmas are stated with) or from gamma^(-2/alpha) (the form
// implied by nearest-transmitter association, which is what the Monte Carlo
// oracle reproduces).  Both ship; Reference is the default wherever agreement
// with simulation matters.
enum class KernelVariant { AsWritten, Reference };

inline void check_env(const RadioEnv& env) {
  if (!(env.alpha > 2.0))
    throw std::domain_error("RadioEnv.alpha: must exceed 2");
  if (!(env.gamma >= 0.0))
    throw std::domain_error("RadioEnv.gamma: must be nonnegative");
  if (!(env.sigma2 >= 0.0))
    throw std::domain_error("RadioEnv.sigma2: must be nonnegative");
  if (!(env.bandwidth > 0.0))
    throw std::domain_error("RadioEnv.bandwidth: must be positive");
}

namespace detail {

// Per-segment absolute tolerance; results combine at most two segments, so
// each op meets a 1e-9 absolute budget overall.
inline constexpr double kSegTol = 5e-10;

// int_lo^hi du / (1 + u^p), finite interval.
inline double kernel_segment(double p, double lo, double hi) {
  if (hi <= lo) return 0.0;
  auto res = integrate([p](double u) { return 1.0 / (1.0 + std::pow(u, p)); },
                       lo, hi, kSegTol);
  if (!res.converged)
    throw std::runtime_error("analytics: interference kernel quadrature did not converge");
  return res.value;
}

// int_lo^inf dz / (1 + z^(alpha/2)) for lo >= 1 expressed on a finite
// interval: with z = s^(-2/(alpha-2)) the integrand becomes the constant
// 2/(alpha-2) times 1/(1 + s^(alpha/(alpha-2))) on [0, lo^(-(alpha-2)/2)].
inline double kernel_tail(double alpha, double upper_s) {
  const double p = alpha / (alpha - 2.0);
  return 2.0 / (alpha - 2.0) * kernel_segment(p, 0.0, upper_s);
}

}  // namespace detail

// A(alpha, gamma) = int_gamma^inf x^(-2/alpha)/(1+x) dx, the integral behind
// the mean spectral efficiency.  Strictly positive, strictly decreasing in
// gamma.  Absolute error <= 1e-9.
inline double rate_integral(const RadioEnv& env) {
  check_env(env);
  const double a = env.alpha;
  const double g = env.gamma;
  double value;
  if (g >= 1.0) {
    // upper substitution limit b = gamma^(-2/alpha) <= 1: one smooth segment
    value = detail::kernel_segment(a / 2.0, 0.0, std::pow(g, -2.0 / a));
  } else {
    // head on [0,1] plus the z in [1, gamma^(-2/alpha)] slice of the tail;
    // z = s^(-2/(alpha-2)) maps that slice onto s in
    // [gamma^((alpha-2)/alpha), 1], and the s lower limit -> 0 as gamma -> 0
    const double s_lo = g > 0.0 ? std::pow(g, (a - 2.0) / a) : 0.0;
    value = detail::kernel_segment(a / 2.0, 0.0, 1.0) +
            2.0 / (a - 2.0) *
                detail::kernel_segment(a / (a - 2.0), s_lo, 1.0);
  }
  return a / 2.0 * value;
}

// Upsilon(gamma, alpha) = gamma^(2/alpha) * int_L^inf dz/(1+z^(alpha/2)) with
// L = 0 (AsWritten) or L = gamma^(-2/alpha) (Reference).  Absolute quadrature
// error <= 1e-9.
inline double interference_factor(const RadioEnv& env, KernelVariant variant) {
  check_env(env);
  const double a = env.alpha;
  const double g = env.gamma;
  if (g == 0.0) return 0.0;  // gamma^(2/alpha) prefactor vanishes
  double integral;
  if (variant == KernelVariant::AsWritten) {
    integral = detail::kernel_segment(a / 2.0, 0.0, 1.0) +
               detail::kernel_tail(a, 1.0);
  } else if (g >= 1.0) {
    // lower limit L = gamma^(-2/alpha) <= 1: segment [L,1] plus full tail
    integral = detail::kernel_segment(a / 2.0, std::pow(g, -2.0 / a), 1.0) +
               detail::kernel_tail(a, 1.0);
  } else {
    // L > 1: the whole integral lives in the tail region
    integral = detail::kernel_tail(a, std::pow(g, (a - 2.0) / a));
  }
  return std::pow(g, 2.0 / a) * integral;
}

// tau(alpha, gamma) = log2(1+gamma) + gamma^(2/alpha) * A(alpha, gamma),
// the mean spectral efficiency (bits/s/Hz) of a covered user.
inline double spectral_efficiency(const RadioEnv& env) {
  check_env(env);
  if (env.gamma == 0.0) return 0.0;
  return std::log2(1.0 + env.gamma) +
         std::pow(env.gamma, 2.0 / env.alpha) * rate_integral(env);
}

// Interference-limited coverage probability P_inf = 1 / (1 + Upsilon).
inline double coverage_no_noise(const RadioEnv& env, KernelVariant variant) {
  return 1.0 / (1.0 + interference_factor(env, variant));
}

// Low-noise coverage approximation
//   P_inf * (1 - gamma sigma2 Gamma(alpha/2+1) / (P [pi lambda (1+Upsilon)]^(alpha/2)))
// clamped to [0,1].  Monotone nondecreasing in tx_power and lambda_active.
inline double coverage_approx(const RadioEnv& env, double lambda_active,
                              double tx_power, KernelVariant variant) {
  check_env(env);
  if (!(lambda_active > 0.0))
    throw std::domain_error("coverage_approx: lambda_active must be positive");
  if (!(tx_power > 0.0))
    throw std::domain_error("coverage_approx: tx_power must be positive");
  const double ups = interference_factor(env, variant);
  const double p_inf = 1.0 / (1.0 + ups);
  const double denom =
      tx_power *
      std::pow(std::numbers::pi * lambda_active * (1.0 + ups), env.alpha / 2.0);
  const double noise_term =
      env.gamma * env.sigma2 * std::tgamma(env.alpha / 2.0 + 1.0) / denom;
  const double value = p_inf * (1.0 - noise_term);
  return std::clamp(value, 0.0, 1.0);
}

// Exact single-integral coverage probability
//   pi lambda int_0^inf exp(-pi lambda v (1+Upsilon) - gamma sigma2 v^(alpha/2) / P) dv.
// Substituting w = exp(-pi lambda (1+Upsilon) v) maps it onto [0,1]:
//   P_inf * int_0^1 exp(-(gamma sigma2 / P) * (-ln w / c1)^(alpha/2)) dw,
//   c1 = pi lambda (1+Upsilon).
// Absolute error <= 1e-8.  Bounds the error of coverage_approx.
inline double coverage_exact_integral(
    const RadioEnv& env, double lambda_active, double tx_power,
    KernelVariant variant = KernelVariant::Reference) {
  check_env(env);
  if (!(lambda_active > 0.0))
    throw std::domain_error("coverage_exact_integral: lambda_active must be positive");
  if (!(tx_power > 0.0))
    throw std::domain_error("coverage_exact_integral: tx_power must be positive");
  const double ups = interference_factor(env, variant);
  const double c1 = std::numbers::pi * lambda_active * (1.0 + ups);
  const double noise_coeff = env.gamma * env.sigma2 / tx_power;
  const double a_half = env.alpha / 2.0;
  auto res = integrate(
      [=](double w) {
        return std::exp(-noise_coeff * std::pow(-std::log(w) / c1, a_half));
      },
      0.0, 1.0, 1e-8);
  if (!res.converged)
    throw std::runtime_error("analytics: coverage integral quadrature did not converge");
  return res.value / (1.0 + ups);
}

}  // namespace cransim::analytics
