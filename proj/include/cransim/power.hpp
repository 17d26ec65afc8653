#pragma once

// Power-consumption models for an elastically provisioned Cloud-RAN cluster:
// per-RRH radio power with a sleep state, passive-optical transport power,
// area power density of the RRH field plus transport, and the virtualized
// baseband pool (per-core linear power model plus frame-processing time).

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cransim::power {

// Radio unit: active circuit power, sleep power, and power-amplifier
// efficiency (transmit power P costs P/eta at the wall).
struct RrhPowerParams {
  double p_active_circuit;  // watts, active-mode circuit draw
  double p_sleep;           // watts, sleep-mode draw
  double amp_efficiency;    // dimensionless, in (0,1]
};

// Transport network: one optical line terminal per cluster plus an optical
// network unit per RRH with active/sleep states.
struct TransportPowerParams {
  double p_olt;         // watts
  double p_onu_active;  // watts
  double p_onu_sleep;   // watts
};

// Virtualized baseband pool: linear per-core power model and the constants
// of the frame-processing-time law T_fr = M * upsilon / (N_c * omega).
struct VmPowerParams {
  double p_max_per_core;  // watts at full load, per core
  double beta_idle;       // idle fraction of p_max, in [0,1]
  double cpu_speed_ghz;   // omega
  double msc_constant;    // upsilon, processing cost per resource block
};

// The three records bundled, as consumed by the provisioning optimizers.
struct PowerParams {
  RrhPowerParams rrh;
  TransportPowerParams transport;
  VmPowerParams vm;
};

// Per-timestep power accounting for one cluster.
struct PowerBreakdown {
  double area_power_density;  // watts per m^2 (RRH field + transport)
  double vm_power;            // watts (baseband pool + OLT)
  double total_power;         // density * area + vm_power
};

// Piecewise RRH power: sleeping units draw p_sleep; active units draw circuit
// power plus amplifier input.  The discontinuity at 0 is intentional: an
// active RRH transmitting nothing still burns its circuit power.
inline double rrh_power(double tx_power, const RrhPowerParams& p) {
  if (tx_power < 0.0)
    throw std::domain_error("rrh_power: tx_power must be nonnegative");
  if (tx_power == 0.0) return p.p_sleep;
  return p.p_active_circuit + tx_power / p.amp_efficiency;
}

// Area power density of the RRH field and its transport, factored as
// lambda_r * (mu_a * Q1 + Q2) with
//   Q1 = P_rrh^a + P/eta + P_onu^a - P_rrh^s - P_onu^s   (cost of waking one RRH)
//   Q2 = P_rrh^s + P_onu^s                               (floor paid per deployed RRH)
inline double area_power(double lambda_r, double mu_a, double tx_power,
                         const RrhPowerParams& rrh,
                         const TransportPowerParams& tn) {
  if (!(mu_a >= 0.0 && mu_a <= 1.0))
    throw std::domain_error("area_power: mu_a must lie in [0,1]");
  if (tx_power < 0.0)
    throw std::domain_error("area_power: tx_power must be nonnegative");
  const double q1 = rrh.p_active_circuit + tx_power / rrh.amp_efficiency +
                    tn.p_onu_active - rrh.p_sleep - tn.p_onu_sleep;
  const double q2 = rrh.p_sleep + tn.p_onu_sleep;
  return lambda_r * (mu_a * q1 + q2);
}

// The same quantity summed per state (active density * active draw + sleeping
// density * sleeping draw).  Algebraically identical to area_power; kept as a
// separate evaluation path so tests can assert the factoring.
inline double area_power_by_state(double lambda_r, double mu_a,
                                  double tx_power, const RrhPowerParams& rrh,
                                  const TransportPowerParams& tn) {
  if (!(mu_a >= 0.0 && mu_a <= 1.0))
    throw std::domain_error("area_power_by_state: mu_a must lie in [0,1]");
  const double lambda_active = mu_a * lambda_r;
  const double lambda_sleep = (1.0 - mu_a) * lambda_r;
  return lambda_active * (rrh.p_active_circuit + tx_power / rrh.amp_efficiency +
                          tn.p_onu_active) +
         lambda_sleep * (rrh.p_sleep + tn.p_onu_sleep);
}

// Downlink frame processing time in microseconds: M * upsilon / (N_c * omega)
// with omega in GHz (the constants are calibrated so the result is in us).
inline double frame_processing_time(int n_prb, int n_cores,
                                    const VmPowerParams& p) {
  if (n_prb < 1) throw std::domain_error("frame_processing_time: n_prb must be >= 1");
  if (n_cores < 1) throw std::domain_error("frame_processing_time: n_cores must be >= 1");
  return static_cast<double>(n_prb) * p.msc_constant /
         (static_cast<double>(n_cores) * p.cpu_speed_ghz);
}

// Pool utilization: fraction of the deadline spent processing one frame,
// clamped to [0,1] so an under-provisioned pool reads as fully loaded.
inline double vm_utilization(int n_prb, double deadline_us, int n_cores,
                             const VmPowerParams& p) {
  if (!(deadline_us > 0.0))
    throw std::domain_error("vm_utilization: deadline_us must be positive");
  const double u = frame_processing_time(n_prb, n_cores, p) / deadline_us;
  return std::clamp(u, 0.0, 1.0);
}

// Baseband-pool power: n_cores cores at p_max each, drawing the idle fraction
// beta unconditionally and the remaining (1-beta) proportionally to
// utilization, plus the optical line terminal:
//   N_c * P_max * u * (1-beta) + beta * N_c * P_max + P_olt
inline double vm_power(int n_cores, double utilization,
                       const VmPowerParams& p,
                       const TransportPowerParams& tn) {
  if (n_cores < 1) throw std::domain_error("vm_power: n_cores must be >= 1");
  if (!(utilization >= 0.0 && utilization <= 1.0))
    throw std::domain_error("vm_power: utilization must lie in [0,1]");
  const double size = static_cast<double>(n_cores) * p.p_max_per_core;
  return size * utilization * (1.0 - p.beta_idle) + p.beta_idle * size +
         tn.p_olt;
}

// The same pool power written as idle floor plus load-proportional span:
//   P_idle + (P_peak - P_idle) * u, with P_idle = beta*N_c*P_max and
//   P_peak = N_c*P_max.  Kept as a second evaluation path for identity tests.
inline double vm_power_load_interpolation(int n_cores, double utilization,
                                          const VmPowerParams& p,
                                          const TransportPowerParams& tn) {
  if (n_cores < 1) throw std::domain_error("vm_power_load_interpolation: n_cores must be >= 1");
  if (!(utilization >= 0.0 && utilization <= 1.0))
    throw std::domain_error("vm_power_load_interpolation: utilization must lie in [0,1]");
  const double p_peak = static_cast<double>(n_cores) * p.p_max_per_core;
  const double p_idle = p.beta_idle * p_peak;
  return p_idle + (p_peak - p_idle) * utilization + tn.p_olt;
}

inline PowerBreakdown make_breakdown(double area_power_density, double area_m2,
                                     double vm_power_w) {
  return {area_power_density, vm_power_w,
          area_power_density * area_m2 + vm_power_w};
}

}  // namespace cransim::power
