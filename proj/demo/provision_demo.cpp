// Minimal library walkthrough: provision one 25 km^2 cluster across a range
// of user densities and print what the optimizer decides at each load level.
// Build and run:  cmake --build build --target provision_demo &&
//                 ./build/demo/provision_demo

#include <cstdio>

#include "cransim/cransim.hpp"

int main() {
  using namespace cransim;

  // 0 dB SINR threshold, path-loss exponent 4, 20 MHz of spectrum.
  const analytics::RadioEnv env{4.0, 1.0, 1e-13, 20e6};
  // Coverage may sag to 75% of the interference-limited ceiling; every user
  // is owed 200 kb/s; frames must clear in 2.6 ms.
  const provision::Constraints constraints{0.75, 200e3, 2600.0, 100};
  const power::PowerParams power{
      {12.4, 3.5, 0.32},        // RRH: active circuit, sleep, amplifier eta
      {20.0, 4.0, 0.5},         // transport: OLT, ONU active, ONU sleep
      {72.0, 0.7, 3.3, 117.4},  // pool: per-core max, idle fraction, GHz, cost
  };

  const double analytic_coverage =
      analytics::coverage_no_noise(env, analytics::KernelVariant::Reference);
  std::printf("interference-limited coverage ceiling: %.4f\n",
              analytic_coverage);
  std::printf("mean spectral efficiency: %.4f bit/s/Hz\n\n",
              analytics::spectral_efficiency(env));

  std::printf("%12s %10s %14s %8s %12s\n", "users/km^2", "active mu",
              "tx power [mW]", "cores", "total [W]");
  for (double users_per_km2 : {100.0, 400.0, 800.0, 1200.0, 1600.0, 2000.0}) {
    const provision::ClusterState cluster{
        10e-6,                   // 10 RRHs per km^2, in per-m^2 units
        users_per_km2 * 1e-6,    // user density in per-m^2 units
        25e6,                    // 25 km^2 of area
    };
    const auto d = provision::closed_form_provision(
        env, cluster, constraints, power, analytics::KernelVariant::Reference);
    std::printf("%12.0f %10.4f %14.4f %8d %12.2f%s\n", users_per_km2, d.mu_a,
                d.tx_power * 1e3, d.n_cores, d.objective,
                d.feasible ? "" : "  (infeasible)");
  }
  return 0;
}
