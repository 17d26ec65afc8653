#pragma once

// The optimization core: closed-form minimum activity factor (rate
// constraint), minimum transmission power (coverage constraint), minimum core
// count (processing deadline), their composition into a per-cluster
// provisioning decision, a coordinate-descent refiner, and an exhaustive
// grid-search oracle.
//
// The closed form treats the three minima as jointly optimal, which holds
// when circuit power dominates: waking RRHs is expensive, so the cheapest
// feasible point sits on the rate boundary.  When noise power dominates,
// the required transmit power P*(mu) ~ mu^(-alpha/2) falls faster than the
// activity cost rises, and the joint optimum moves above the rate boundary;
// the descent and grid searches find it, and tests use them to measure the
// gap.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cransim/analytics.hpp"
#include "cransim/power.hpp"

namespace cransim::provision {

struct Constraints {
  double epsilon;      // required fraction of the no-noise coverage, in (0,1)
  double r_min;        // per-user rate floor, bits/s
  double deadline_us;  // frame-processing budget, microseconds
  int n_prb;           // resource blocks per frame
};

// Demand state of one cluster at one instant.
struct ClusterState {
  double lambda_r;  // deployed RRH density, per m^2
  double lambda_u;  // current user density, per m^2
  double area_m2;   // cluster area
};

struct ProvisioningDecision {
  double mu_a = 0.0;      // RRH activity factor, in [0,1]
  double tx_power = 0.0;  // per-RRH transmit power, watts
  int n_cores = 1;
  bool feasible = false;
  double objective = 0.0;  // total cluster power at this decision, watts
  bool converged = true;   // false only if iterative refinement hit max_iters
};

// Result of the rate-constraint minimum: mu_a may exceed 1, in which case
// the deployed RRHs cannot serve the demand and feasible is false.
struct ActivityResult {
  double mu_a;
  bool feasible;
};

struct GridSpec {
  int mu_points = 64;
  int p_points = 64;
};

inline void check_constraints(const Constraints& c) {
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
    throw std::domain_error("Constraints.epsilon: must lie in (0,1)");
  if (!(c.r_min > 0.0))
    throw std::domain_error("Constraints.r_min: must be positive");
  if (!(c.deadline_us > 0.0))
    throw std::domain_error("Constraints.deadline_us: must be positive");
  if (c.n_prb < 1)
    throw std::domain_error("Constraints.n_prb: must be >= 1");
}

// B_u = B * lambda_active / lambda_u: the bandwidth share of one user when
// active RRHs split the band among the users they serve.
inline double per_user_bandwidth(double lambda_active, double lambda_u,
                                 double bandwidth) {
  if (!(lambda_u > 0.0))
    throw std::domain_error("per_user_bandwidth: lambda_u must be positive");
  return bandwidth * lambda_active / lambda_u;
}

// Per-user data rate: bandwidth share times mean spectral efficiency.
inline double per_user_rate(const analytics::RadioEnv& env, double lambda_r,
                            double mu_a, double lambda_u) {
  return per_user_bandwidth(mu_a * lambda_r, lambda_u, env.bandwidth) *
         analytics::spectral_efficiency(env);
}

// Smallest activity factor meeting the per-user rate floor:
//   mu_a* = R_min * lambda_u / (B * lambda_r * tau).
inline ActivityResult min_activity_factor(const analytics::RadioEnv& env,
                                          double lambda_r, double lambda_u,
                                          const Constraints& c) {
  check_constraints(c);
  if (!(lambda_r > 0.0))
    throw std::domain_error("min_activity_factor: lambda_r must be positive");
  if (lambda_u == 0.0) return {0.0, true};
  const double mu = c.r_min * lambda_u /
                    (env.bandwidth * lambda_r * analytics::spectral_efficiency(env));
  return {mu, mu <= 1.0};
}

namespace detail {

// The coverage constraint "approx coverage >= epsilon * P_inf" inverts to
// P >= L1 / lambda_active^(alpha/2) with
//   L1 = gamma sigma2 Gamma(alpha/2+1) / (pi^(alpha/2) (1+Upsilon)^(alpha/2) (1-epsilon)).
inline double lemma_power_constant(const analytics::RadioEnv& env,
                                   double epsilon,
                                   analytics::KernelVariant variant) {
  if (!(epsilon < 1.0))
    throw std::domain_error("min_tx_power: epsilon must be below 1");
  const double ups = analytics::interference_factor(env, variant);
  const double a_half = env.alpha / 2.0;
  return env.gamma * env.sigma2 * std::tgamma(a_half + 1.0) /
         (std::pow(std::numbers::pi, a_half) * std::pow(1.0 + ups, a_half) *
          (1.0 - epsilon));
}

inline double min_power_from_constant(double l1, double lambda_active,
                                      double alpha) {
  if (l1 == 0.0) return 0.0;
  return l1 / std::pow(lambda_active, alpha / 2.0);
}

}  // namespace detail

// Smallest per-RRH transmit power keeping approximate coverage at
// epsilon * P_inf for the given active density.  Zero noise needs zero power.
inline double min_tx_power(const analytics::RadioEnv& env, double lambda_r,
                           double mu_a, const Constraints& c,
                           analytics::KernelVariant variant) {
  analytics::check_env(env);
  if (!(mu_a * lambda_r > 0.0))
    throw std::domain_error("min_tx_power: active density must be positive");
  return detail::min_power_from_constant(
      detail::lemma_power_constant(env, c.epsilon, variant), mu_a * lambda_r,
      env.alpha);
}

// Smallest core count meeting the processing deadline:
// ceil(M*upsilon / (T_dl*omega)), never below one.  The adjustment loops pin
// the exact boundary semantics against floating-point drift in the ceiling.
inline int min_cores(const Constraints& c, const power::VmPowerParams& p) {
  check_constraints(c);
  const double ratio = static_cast<double>(c.n_prb) * p.msc_constant /
                       (c.deadline_us * p.cpu_speed_ghz);
  int n = std::max(1, static_cast<int>(std::ceil(ratio)));
  while (n > 1 &&
         power::frame_processing_time(c.n_prb, n - 1, p) <= c.deadline_us)
    --n;
  while (power::frame_processing_time(c.n_prb, n, p) > c.deadline_us) ++n;
  return n;
}

namespace detail {

// Total cluster power at a candidate decision; the objective all three
// optimizers minimize.
inline double decision_objective(const ClusterState& s,
                                 const power::PowerParams& pp, double mu,
                                 double p_tx, int n_cores,
                                 double utilization) {
  const double density =
      power::area_power(s.lambda_r, mu, p_tx, pp.rrh, pp.transport);
  return density * s.area_m2 +
         power::vm_power(n_cores, utilization, pp.vm, pp.transport);
}

inline double pool_utilization(const ClusterState& s, const Constraints& c,
                               const power::PowerParams& pp, int n_cores) {
  // Zero demand idles the pool; otherwise the frame pipeline runs every
  // deadline period regardless of load.
  if (s.lambda_u <= 0.0) return 0.0;
  return power::vm_utilization(c.n_prb, c.deadline_us, n_cores, pp.vm);
}

// Re-check all three constraints at a candidate point.
inline bool check_feasible(const analytics::RadioEnv& env,
                           const ClusterState& s, const Constraints& c,
                           const power::PowerParams& pp,
                           analytics::KernelVariant variant, double mu,
                           double p_tx, int n_cores) {
  if (s.lambda_u > 0.0) {
    if (!(mu > 0.0)) return false;
    if (per_user_rate(env, s.lambda_r, mu, s.lambda_u) <
        c.r_min * (1.0 - 1e-3))
      return false;
  }
  if (env.sigma2 > 0.0 && env.gamma > 0.0 && s.lambda_u > 0.0) {
    if (!(p_tx > 0.0)) return false;
    const double target =
        c.epsilon * analytics::coverage_no_noise(env, variant) - 1e-9;
    if (analytics::coverage_approx(env, mu * s.lambda_r, p_tx, variant) <
        target)
      return false;
  }
  if (power::frame_processing_time(c.n_prb, n_cores, pp.vm) >
      c.deadline_us * (1.0 + 1e-12))
    return false;
  return true;
}

inline ProvisioningDecision finalize(const analytics::RadioEnv& env,
                                     const ClusterState& s,
                                     const Constraints& c,
                                     const power::PowerParams& pp,
                                     analytics::KernelVariant variant,
                                     double mu, double p_tx, int n_cores,
                                     bool demand_feasible) {
  ProvisioningDecision d;
  d.mu_a = mu;
  d.tx_power = p_tx;
  d.n_cores = n_cores;
  d.objective = decision_objective(s, pp, mu, p_tx, n_cores,
                                   pool_utilization(s, c, pp, n_cores));
  d.feasible = demand_feasible &&
               check_feasible(env, s, c, pp, variant, mu, p_tx, n_cores);
  return d;
}

inline ProvisioningDecision zero_demand_decision(const ClusterState& s,
                                                 const Constraints& c,
                                                 const power::PowerParams& pp,
                                                 int n_cores) {
  // No users: every RRH sleeps, no transmission, pool at the idle floor;
  // the frame pipeline still needs its minimum cores.
  ProvisioningDecision d;
  d.mu_a = 0.0;
  d.tx_power = 0.0;
  d.n_cores = n_cores;
  d.objective = decision_objective(s, pp, 0.0, 0.0, n_cores, 0.0);
  d.feasible = true;
  return d;
}

// Golden-section minimizer for the (convex) boundary objective; returns the
// argmin clamped to [a, b].  Deterministic, derivative-free.
template <typename F>
double golden_min(F&& f, double a, double b) {
  constexpr double phi = 0.6180339887498949;
  if (!(b - a > 1e-12)) return a;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < 90 && (b - a) > 1e-10; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// The closed-form composition: rate-boundary activity factor, then the
// minimum power at that density, then the minimum cores.  Infeasible demand
// (mu* > 1) clamps the activity factor to 1 and flags the decision.
inline ProvisioningDecision closed_form_provision(
    const analytics::RadioEnv& env, const ClusterState& s,
    const Constraints& c, const power::PowerParams& pp,
    analytics::KernelVariant variant) {
  analytics::check_env(env);
  check_constraints(c);
  if (!(s.lambda_r > 0.0 && s.area_m2 > 0.0))
    throw std::domain_error("closed_form_provision: lambda_r and area must be positive");
  const int n = min_cores(c, pp.vm);
  if (s.lambda_u <= 0.0) return detail::zero_demand_decision(s, c, pp, n);
  const ActivityResult ar = min_activity_factor(env, s.lambda_r, s.lambda_u, c);
  const double mu = ar.feasible ? ar.mu_a : 1.0;
  const double p_tx = min_tx_power(env, s.lambda_r, mu, c, variant);
  return detail::finalize(env, s, c, pp, variant, mu, p_tx, n, ar.feasible);
}

// Coordinate descent on (mu_a, P).  Each sweep picks the cheaper of (a) the
// smallest activity factor feasible at the current power and (b) a golden-
// section line search over mu in [mu*, 1] with power tied to its minimum
// feasible value P*(mu); power then drops to P*(mu) for the chosen mu.
// Stops when a sweep improves the objective by less than tol.
inline ProvisioningDecision coordinate_descent_provision(
    const analytics::RadioEnv& env, const ClusterState& s,
    const Constraints& c, const power::PowerParams& pp,
    analytics::KernelVariant variant, int max_iters = 100,
    double tol = 1e-6) {
  analytics::check_env(env);
  check_constraints(c);
  if (!(s.lambda_r > 0.0 && s.area_m2 > 0.0))
    throw std::domain_error("coordinate_descent_provision: lambda_r and area must be positive");
  const int n = min_cores(c, pp.vm);
  if (s.lambda_u <= 0.0) return detail::zero_demand_decision(s, c, pp, n);
  const ActivityResult ar = min_activity_factor(env, s.lambda_r, s.lambda_u, c);
  if (!ar.feasible) {
    return detail::finalize(env, s, c, pp, variant, 1.0,
                            min_tx_power(env, s.lambda_r, 1.0, c, variant), n,
                            false);
  }

  const double mu_lo = ar.mu_a;
  const double l1 = detail::lemma_power_constant(env, c.epsilon, variant);
  const double u = detail::pool_utilization(s, c, pp, n);
  auto boundary_obj = [&](double mu) {
    const double p = detail::min_power_from_constant(l1, mu * s.lambda_r,
                                                     env.alpha);
    return detail::decision_objective(s, pp, mu, p, n, u);
  };

  double mu_cur = mu_lo;
  double p_cur = detail::min_power_from_constant(l1, mu_cur * s.lambda_r,
                                                 env.alpha);
  double obj_cur = detail::decision_objective(s, pp, mu_cur, p_cur, n, u);
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    // coverage-feasibility bound on mu at the current power
    double mu_alt = mu_lo;
    if (p_cur > 0.0 && l1 > 0.0) {
      const double mu_cov =
          std::pow(l1 / p_cur, 2.0 / env.alpha) / s.lambda_r;
      mu_alt = std::clamp(std::max(mu_lo, mu_cov), mu_lo, 1.0);
    }
    const double mu_ls = std::clamp(detail::golden_min(boundary_obj, mu_lo, 1.0),
                                    mu_lo, 1.0);
    const double mu_next =
        boundary_obj(mu_alt) <= boundary_obj(mu_ls) ? mu_alt : mu_ls;
    const double p_next = detail::min_power_from_constant(
        l1, mu_next * s.lambda_r, env.alpha);
    const double obj_next =
        detail::decision_objective(s, pp, mu_next, p_next, n, u);
    if (obj_next < obj_cur) {
      const bool done = obj_cur - obj_next < tol;
      mu_cur = mu_next;
      p_cur = p_next;
      obj_cur = obj_next;
      if (done) {
        converged = true;
        break;
      }
    } else {
      converged = true;
      break;
    }
  }
  ProvisioningDecision d =
      detail::finalize(env, s, c, pp, variant, mu_cur, p_cur, n, true);
  d.converged = converged;
  return d;
}

// Exhaustive grid oracle: mu linear on [mu*, 1], power log-spaced between the
// minimum feasible power at full activity and ten times the minimum at the
// rate boundary.  Returns the feasible cell of least objective; ties resolve
// to the lowest mu, then the lowest power (scan order guarantees it).
inline ProvisioningDecision brute_force_provision(
    const analytics::RadioEnv& env, const ClusterState& s,
    const Constraints& c, const power::PowerParams& pp,
    analytics::KernelVariant variant, const GridSpec& grid = {}) {
  analytics::check_env(env);
  check_constraints(c);
  if (grid.mu_points < 32 || grid.p_points < 32)
    throw std::invalid_argument("brute_force_provision: grid resolution must be >= 32 per axis");
  if (!(s.lambda_r > 0.0 && s.area_m2 > 0.0))
    throw std::domain_error("brute_force_provision: lambda_r and area must be positive");
  const int n = min_cores(c, pp.vm);
  if (s.lambda_u <= 0.0) return detail::zero_demand_decision(s, c, pp, n);
  const ActivityResult ar = min_activity_factor(env, s.lambda_r, s.lambda_u, c);
  if (!ar.feasible) {
    return detail::finalize(env, s, c, pp, variant, 1.0,
                            min_tx_power(env, s.lambda_r, 1.0, c, variant), n,
                            false);
  }

  const double mu_lo = ar.mu_a;
  const double l1 = detail::lemma_power_constant(env, c.epsilon, variant);
  const double p_lo = detail::min_power_from_constant(l1, s.lambda_r, env.alpha);
  const double p_hi =
      10.0 * detail::min_power_from_constant(l1, mu_lo * s.lambda_r, env.alpha);
  std::vector<double> p_grid;
  if (p_hi <= 0.0) {
    p_grid.push_back(0.0);  // no noise: zero power is feasible and cheapest
  } else {
    p_grid.reserve(grid.p_points);
    const double ratio = p_hi / p_lo;
    for (int j = 0; j < grid.p_points; ++j)
      p_grid.push_back(p_lo * std::pow(ratio, static_cast<double>(j) /
                                                  (grid.p_points - 1)));
  }

  const double u = detail::pool_utilization(s, c, pp, n);
  const double vm_w = power::vm_power(n, u, pp.vm, pp.transport);
  const double ups = analytics::interference_factor(env, variant);
  const double noise_num = l1 * (1.0 - c.epsilon);  // gamma sig2 Gam / (pi(1+U))^(a/2)
  const double cov_slack = 1e-9 * (1.0 + ups);
  const double q2 = pp.rrh.p_sleep + pp.transport.p_onu_sleep;
  const double q1_base = pp.rrh.p_active_circuit + pp.transport.p_onu_active -
                         pp.rrh.p_sleep - pp.transport.p_onu_sleep;
  const bool noise_matters = env.sigma2 > 0.0 && env.gamma > 0.0;

  bool found = false;
  double best_obj = 0.0, best_mu = 0.0, best_p = 0.0;
  for (int i = 0; i < grid.mu_points; ++i) {
    const double mu =
        mu_lo + (1.0 - mu_lo) * static_cast<double>(i) / (grid.mu_points - 1);
    const double dens_pow = std::pow(mu * s.lambda_r, env.alpha / 2.0);
    for (double p : p_grid) {
      if (noise_matters) {
        if (!(p > 0.0)) continue;
        const double noise_term = noise_num / (p * dens_pow);
        if (noise_term > 1.0 - c.epsilon + cov_slack) continue;  // under-covered
      }
      const double obj =
          s.area_m2 * s.lambda_r *
              (mu * (q1_base + p / pp.rrh.amp_efficiency) + q2) +
          vm_w;
      if (!found || obj < best_obj) {
        found = true;
        best_obj = obj;
        best_mu = mu;
        best_p = p;
      }
    }
  }
  if (!found) {
    ProvisioningDecision d = detail::finalize(
        env, s, c, pp, variant, 1.0,
        min_tx_power(env, s.lambda_r, 1.0, c, variant), n, false);
    d.feasible = false;
    return d;
  }
  return detail::finalize(env, s, c, pp, variant, best_mu, best_p, n, true);
}

}  // namespace cransim::provision
