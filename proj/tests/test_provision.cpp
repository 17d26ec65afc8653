#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "cransim/analytics.hpp"
#include "cransim/power.hpp"
#include "cransim/provision.hpp"
#include "cransim/rng.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace cransim::provision;
using cransim::SplitMix64;
using cransim::analytics::KernelVariant;
using cransim::analytics::RadioEnv;

namespace {

constexpr double kPi = oracles::kPi;

const RadioEnv kEnv{4.0, 1.0, 1e-13, 20e6};
const Constraints kConstraints{0.75, 200e3, 2600.0, 100};
const cransim::power::PowerParams kPower{
    {12.4, 3.5, 0.32}, {20.0, 4.0, 0.5}, {72.0, 0.7, 3.3, 117.4}};

double objective_recomputed(const ClusterState& s,
                            const cransim::power::PowerParams& pp,
                            const Constraints& c,
                            const ProvisioningDecision& d) {
  const double density = cransim::power::area_power(
      s.lambda_r, d.mu_a, d.tx_power, pp.rrh, pp.transport);
  const double u = s.lambda_u > 0.0
                       ? cransim::power::vm_utilization(c.n_prb, c.deadline_us,
                                                        d.n_cores, pp.vm)
                       : 0.0;
  return density * s.area_m2 +
         cransim::power::vm_power(d.n_cores, u, pp.vm, pp.transport);
}

}  // namespace

TEST_CASE("per-user bandwidth and rate") {
  CHECK(per_user_bandwidth(1e-4, 1e-4, 20e6) == 20e6);
  CHECK_THAT(per_user_bandwidth(2e-6, 1e-4, 20e6), WithinRel(4e5, 1e-12));
  CHECK(per_user_bandwidth(0.0, 1e-4, 20e6) == 0.0);
  CHECK_THROWS_AS(per_user_bandwidth(1e-6, 0.0, 20e6), std::domain_error);

  // golden value: tau(4,1) = 1 + pi/2, bandwidth ratio 20e6 * 0.1945e-5/5e-4
  CHECK_THAT(per_user_rate(kEnv, 1e-5, 0.1945, 5e-4),
             WithinRel(20e6 * 0.1945 * 1e-5 / 5e-4 * (1.0 + kPi / 2.0), 1e-8));
  CHECK_THAT(per_user_rate(kEnv, 1e-5, 0.1945, 5e-4), WithinAbs(2.0e5, 1e3));
  // linear in the activity factor
  CHECK_THAT(per_user_rate(kEnv, 1e-5, 0.4, 5e-4),
             WithinRel(2.0 * per_user_rate(kEnv, 1e-5, 0.2, 5e-4), 1e-12));
}

TEST_CASE("minimum activity factor: golden value and boundary semantics") {
  const auto r = min_activity_factor(kEnv, 1e-5, 5e-4, kConstraints);
  REQUIRE(r.feasible);
  CHECK_THAT(r.mu_a, WithinAbs(0.1945, 5e-5));
  CHECK_THAT(r.mu_a,
             WithinRel(200e3 * 5e-4 / (20e6 * 1e-5 * (1.0 + kPi / 2.0)), 1e-9));

  // the result is the exact rate boundary
  CHECK_THAT(per_user_rate(kEnv, 1e-5, r.mu_a, 5e-4), WithinRel(200e3, 1e-3));
  CHECK(per_user_rate(kEnv, 1e-5, 0.99 * r.mu_a, 5e-4) < 200e3);

  CHECK(min_activity_factor(kEnv, 1e-5, 0.0, kConstraints).mu_a == 0.0);
  CHECK(min_activity_factor(kEnv, 1e-5, 0.0, kConstraints).feasible);

  const auto over = min_activity_factor(kEnv, 1e-5, 5e-3, kConstraints);
  CHECK_FALSE(over.feasible);
  CHECK(over.mu_a > 1.0);
}

TEST_CASE("minimum activity factor monotonicity") {
  double prev = 0.0;
  for (double lu : {1e-4, 3e-4, 6e-4}) {
    const double mu = min_activity_factor(kEnv, 1e-5, lu, kConstraints).mu_a;
    CHECK(mu > prev);
    prev = mu;
  }
  Constraints tighter = kConstraints;
  tighter.r_min = 400e3;
  CHECK(min_activity_factor(kEnv, 1e-5, 3e-4, tighter).mu_a >
        min_activity_factor(kEnv, 1e-5, 3e-4, kConstraints).mu_a);
}

TEST_CASE("minimum transmit power: golden value, scaling, zero-noise limit") {
  // at alpha 4 the power constant evaluates in closed form
  const double ups = kPi / 2.0;  // as-written kernel at (4, 1)
  const double l1 = 1e-13 * 2.0 / (kPi * kPi * (1.0 + ups) * (1.0 + ups) * 0.25);
  const double expected = l1 / (2e-6 * 2e-6);
  const double p = min_tx_power(kEnv, 1e-5, 0.2, kConstraints,
                                KernelVariant::AsWritten);
  CHECK_THAT(p, WithinRel(expected, 1e-8));
  CHECK_THAT(p, WithinAbs(3.07e-3, 5e-5));

  // doubling the active density divides the power by 2^(alpha/2)
  CHECK_THAT(min_tx_power(kEnv, 1e-5, 0.4, kConstraints, KernelVariant::AsWritten),
             WithinRel(p / 4.0, 1e-12));

  const RadioEnv noiseless{4.0, 1.0, 0.0, 20e6};
  CHECK(min_tx_power(noiseless, 1e-5, 0.2, kConstraints,
                     KernelVariant::AsWritten) == 0.0);

  CHECK_THROWS_AS(min_tx_power(kEnv, 1e-5, 0.0, kConstraints,
                               KernelVariant::AsWritten),
                  std::domain_error);
}

TEST_CASE("coverage round-trip: the minimum power restores the target exactly") {
  SplitMix64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const RadioEnv env{2.5 + 2.5 * rng.next_double(),
                       std::pow(10.0, -1.0 + 2.0 * rng.next_double()),
                       std::pow(10.0, -15.0 + 5.0 * rng.next_double()), 20e6};
    Constraints c = kConstraints;
    c.epsilon = 0.05 + 0.9 * rng.next_double();
    const double lambda_r = std::pow(10.0, -6.0 + 2.0 * rng.next_double());
    const double mu = 0.05 + 0.95 * rng.next_double();
    const auto variant =
        i % 2 ? KernelVariant::AsWritten : KernelVariant::Reference;
    const double p = min_tx_power(env, lambda_r, mu, c, variant);
    const double target =
        c.epsilon * cransim::analytics::coverage_no_noise(env, variant);
    CHECK_THAT(cransim::analytics::coverage_approx(env, mu * lambda_r, p, variant),
               WithinRel(target, 1e-9));
  }
}

TEST_CASE("minimum cores: golden value and exact boundaries") {
  CHECK(min_cores(kConstraints, kPower.vm) == 2);
  CHECK(cransim::power::frame_processing_time(100, 2, kPower.vm) <= 2600.0);
  CHECK(cransim::power::frame_processing_time(100, 1, kPower.vm) > 2600.0);

  // exact integer division lands exactly on the boundary core count
  const cransim::power::VmPowerParams easy{72.0, 0.7, 1.0, 2.6};
  Constraints c = kConstraints;
  c.n_prb = 300;
  c.deadline_us = 260.0;  // 300 * 2.6 / (260 * 1) = 3
  CHECK(min_cores(c, easy) == 3);
  CHECK(cransim::power::frame_processing_time(300, 3, easy) ==
        c.deadline_us);

  c.deadline_us = 1e12;
  CHECK(min_cores(c, easy) == 1);  // never zero

  SplitMix64 rng(17);
  for (int i = 0; i < 200; ++i) {
    Constraints rc = kConstraints;
    rc.n_prb = 1 + static_cast<int>(rng.next_double() * 500.0);
    rc.deadline_us = 100.0 + 4000.0 * rng.next_double();
    cransim::power::VmPowerParams vm = kPower.vm;
    vm.cpu_speed_ghz = 0.5 + 4.0 * rng.next_double();
    vm.msc_constant = 20.0 + 200.0 * rng.next_double();
    const int n = min_cores(rc, vm);
    CHECK(cransim::power::frame_processing_time(rc.n_prb, n, vm) <=
          rc.deadline_us);
    if (n >= 2)
      CHECK(cransim::power::frame_processing_time(rc.n_prb, n - 1, vm) >
            rc.deadline_us);
    Constraints more = rc;
    more.n_prb = rc.n_prb * 2;
    CHECK(min_cores(more, vm) >= n);
  }
}

TEST_CASE("closed-form provisioning composes the three minima") {
  const ClusterState s{1e-5, 5e-4, 25e6};
  const auto d = closed_form_provision(kEnv, s, kConstraints, kPower,
                                       KernelVariant::AsWritten);
  REQUIRE(d.feasible);
  CHECK_THAT(d.mu_a, WithinAbs(0.1945, 5e-5));
  CHECK(d.n_cores == 2);
  CHECK_THAT(d.tx_power,
             WithinRel(min_tx_power(kEnv, 1e-5, d.mu_a, kConstraints,
                                    KernelVariant::AsWritten),
                       1e-12));
  CHECK_THAT(d.objective, WithinRel(objective_recomputed(s, kPower, kConstraints, d),
                                    1e-9));
  CHECK(d.converged);
}

TEST_CASE("zero demand idles the cluster but keeps the frame pipeline") {
  const ClusterState s{1e-5, 0.0, 25e6};
  const auto d = closed_form_provision(kEnv, s, kConstraints, kPower,
                                       KernelVariant::Reference);
  CHECK(d.feasible);
  CHECK(d.mu_a == 0.0);
  CHECK(d.tx_power == 0.0);
  CHECK(d.n_cores == 2);
  // sleeping field plus idle pool
  const double expected = 25e6 * 1e-5 * 4.0 +
                          cransim::power::vm_power(2, 0.0, kPower.vm,
                                                   kPower.transport);
  CHECK_THAT(d.objective, WithinRel(expected, 1e-12));
}

TEST_CASE("excess demand is flagged infeasible at full activity") {
  const ClusterState s{1e-5, 5e-3, 25e6};
  const auto d = closed_form_provision(kEnv, s, kConstraints, kPower,
                                       KernelVariant::Reference);
  CHECK_FALSE(d.feasible);
  CHECK(d.mu_a == 1.0);
}

TEST_CASE("coordinate descent matches the closed form when circuit power dominates") {
  const ClusterState s{1e-5, 5e-4, 25e6};
  for (auto variant : {KernelVariant::AsWritten, KernelVariant::Reference}) {
    const auto cf = closed_form_provision(kEnv, s, kConstraints, kPower, variant);
    const auto cd = coordinate_descent_provision(kEnv, s, kConstraints, kPower,
                                                 variant);
    REQUIRE(cd.feasible);
    CHECK(cd.converged);
    CHECK(cd.objective <= cf.objective + 1e-6);
    CHECK_THAT(cd.objective, WithinRel(cf.objective, 1e-4));
    CHECK_THAT(cd.mu_a, WithinAbs(cf.mu_a, 1e-3));
  }
}

TEST_CASE("coordinate descent finds the interior optimum under heavy noise") {
  const RadioEnv noisy{4.0, 1.0, 1e-5, 20e6};  // noise dominates circuit power
  const ClusterState s{1e-5, 5e-4, 25e6};
  const auto cf = closed_form_provision(noisy, s, kConstraints, kPower,
                                        KernelVariant::Reference);
  const auto cd = coordinate_descent_provision(noisy, s, kConstraints, kPower,
                                               KernelVariant::Reference);
  REQUIRE(cf.feasible);
  REQUIRE(cd.feasible);
  CHECK(cd.mu_a > cf.mu_a + 0.05);          // moved off the rate boundary
  CHECK(cd.objective < 0.9 * cf.objective);  // and is strictly cheaper
  const auto bf = brute_force_provision(noisy, s, kConstraints, kPower,
                                        KernelVariant::Reference, {96, 96});
  REQUIRE(bf.feasible);
  // under this much noise the optimum clamps at full activity, a corner both
  // searches contain exactly
  CHECK_THAT(bf.objective, WithinRel(cd.objective, 1e-6));
}

TEST_CASE("brute force: validation, ties, and degenerate grids") {
  const ClusterState s{1e-5, 5e-4, 25e6};
  CHECK_THROWS_AS(brute_force_provision(kEnv, s, kConstraints, kPower,
                                        KernelVariant::Reference, {16, 64}),
                  std::invalid_argument);

  // without noise the only power grid point is zero and cost rises with
  // activity, so the search returns the rate boundary
  const RadioEnv noiseless{4.0, 1.0, 0.0, 20e6};
  const auto bf = brute_force_provision(noiseless, s, kConstraints, kPower,
                                        KernelVariant::Reference, {64, 64});
  const auto mu_lo = min_activity_factor(noiseless, 1e-5, 5e-4, kConstraints);
  REQUIRE(bf.feasible);
  CHECK(bf.tx_power == 0.0);
  CHECK_THAT(bf.mu_a, WithinRel(mu_lo.mu_a, 1e-12));

  // a flat objective resolves ties toward the lowest activity factor
  cransim::power::PowerParams flat = kPower;
  flat.rrh = {4.0, 4.0, 1.0};
  flat.transport = {20.0, 1.0, 1.0};
  const auto tie = brute_force_provision(noiseless, s, kConstraints, flat,
                                         KernelVariant::Reference, {64, 64});
  CHECK_THAT(tie.mu_a, WithinRel(mu_lo.mu_a, 1e-12));
}

TEST_CASE("optimizer dominance holds across regimes") {
  SplitMix64 rng(53);
  for (int i = 0; i < 6; ++i) {
    const bool noisy = i % 2 == 1;
    const RadioEnv env{3.2 + 1.3 * rng.next_double(),
                       0.5 + 1.5 * rng.next_double(),
                       noisy ? std::pow(10.0, -6.0 + 2.0 * rng.next_double())
                             : 1e-13,
                       20e6};
    const double lambda_r = 1e-5;
    const ClusterState s{lambda_r, lambda_r * (10.0 + 40.0 * rng.next_double()),
                         25e6};
    const auto variant =
        i % 2 ? KernelVariant::Reference : KernelVariant::AsWritten;
    const auto cf = closed_form_provision(env, s, kConstraints, kPower, variant);
    const auto cd =
        coordinate_descent_provision(env, s, kConstraints, kPower, variant);
    const auto bf = brute_force_provision(env, s, kConstraints, kPower, variant,
                                          {64, 64});
    REQUIRE(cf.feasible);
    REQUIRE(cd.feasible);
    REQUIRE(bf.feasible);
    // descent starts at the closed form and only ever improves
    CHECK(cd.objective <= cf.objective + 1e-6);
    // the grid search cannot beat the continuous optimum
    CHECK(cd.objective <= bf.objective * (1.0 + 1e-6));
    // and lands within one grid cell of it
    CHECK(bf.objective <= cf.objective * 1.01 + 1e-6);
    for (const auto& d : {cf, cd, bf})
      CHECK_THAT(d.objective,
                 WithinRel(objective_recomputed(s, kPower, kConstraints, d), 1e-9));
  }
}

TEST_CASE("constraint validation") {
  Constraints bad = kConstraints;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(check_constraints(bad), std::domain_error);
  bad = kConstraints;
  bad.r_min = 0.0;
  CHECK_THROWS_AS(check_constraints(bad), std::domain_error);
  bad = kConstraints;
  bad.n_prb = 0;
  CHECK_THROWS_AS(check_constraints(bad), std::domain_error);
}
