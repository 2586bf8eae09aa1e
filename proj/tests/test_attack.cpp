#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "sps/attack.hpp"
#include "sps/errors.hpp"

using namespace sps;

namespace {

SystemState two_machine_state() {
  SystemState s;
  s.machines.resize(2);
  s.machines[0].delta_omega = 0.001;
  s.machines[0].v_bd = 0.99;
  s.machines[0].v_bq = -0.02;
  s.machines[1].delta_omega = -0.002;
  s.machines[1].v_bd = 1.01;
  s.machines[1].v_bq = 0.03;
  s.v_dc = 1.0;
  return s;
}

}  // namespace

TEST_CASE("apply_fdia is the identity when every coefficient vanishes") {
  AttackSpec spec;
  spec.t_start = 0.0;
  CHECK(apply_fdia(0.5, spec, 1.0) == 0.5);
}

TEST_CASE("apply_fdia adds amplification and bias inside the window") {
  AttackSpec spec;
  spec.alpha = 0.1;
  spec.gamma = 0.05;
  spec.t_start = 0.0;
  CHECK(apply_fdia(1.0, spec, 1.0) == doctest::Approx(1.15).epsilon(1e-15));
}

TEST_CASE("apply_fdia passes through before the window opens") {
  AttackSpec spec;
  spec.alpha = 1.0;
  spec.gamma = 1.0;
  spec.t_start = 5.0;
  CHECK(apply_fdia(1.0, spec, 4.0) == 1.0);
}

TEST_CASE("attack window is half-open: corrupted at t_start, clean at t_end") {
  AttackSpec spec;
  spec.gamma = 1.0;
  spec.t_start = 1.0;
  spec.t_end = 2.0;
  CHECK(apply_fdia(0.0, spec, 1.0) == 1.0);
  CHECK(apply_fdia(0.0, spec, 2.0) == 0.0);
}

TEST_CASE("beta waveforms are referenced to the window start") {
  AttackSpec spec;
  spec.beta = TimeVaryingTerm::ramp(2.0);
  spec.t_start = 3.0;
  CHECK(apply_fdia(0.0, spec, 3.5) == doctest::Approx(1.0).epsilon(1e-15));
  spec.beta = TimeVaryingTerm::sinusoid(1.0, 0.25);  // quarter period = 1 s
  CHECK(apply_fdia(0.0, spec, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_fdia identity property over random inputs") {
  AttackSpec spec;  // alpha = gamma = 0, beta = Zero
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_real_distribution<double> time(-5.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    const double x = val(rng);
    CHECK(apply_fdia(x, spec, time(rng)) == x);
  }
}

TEST_CASE("apply_fdia is affine with slope 1+alpha in the signal") {
  AttackSpec spec;
  spec.alpha = 0.37;
  spec.gamma = -0.2;
  spec.beta = TimeVaryingTerm::sinusoid(0.4, 1.3, 0.2);
  spec.t_start = 0.0;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double ax = val(rng);
    const double t = 2.5;
    const double lhs = apply_fdia(ax, spec, t) - apply_fdia(0.0, spec, t);
    CHECK(lhs == doctest::Approx((1.0 + spec.alpha) * ax).epsilon(1e-12));
  }
}

TEST_CASE("corrupted_measurements without attacks is a pure passthrough") {
  const SystemState s = two_machine_state();
  const std::vector<double> pe{0.4, 0.6};
  const auto meas = corrupted_measurements(s, pe, {}, 1.0);
  CHECK(meas.delta_omega[0] == s.machines[0].delta_omega);
  CHECK(meas.delta_omega[1] == s.machines[1].delta_omega);
  CHECK(meas.p_e[0] == pe[0]);
  CHECK(meas.p_e[1] == pe[1]);
  CHECK(meas.v_bd[0] == s.machines[0].v_bd);
  CHECK(meas.v_bq[1] == s.machines[1].v_bq);
}

TEST_CASE("a speed bias corrupts exactly one channel") {
  const SystemState s = two_machine_state();
  const std::vector<double> pe{0.4, 0.6};
  AttackSpec a;
  a.target = AttackTarget::RotorSpeedDeviation;
  a.machine = 0;
  a.gamma = 0.01;
  a.t_start = 0.0;
  const std::vector<AttackSpec> attacks{a};
  const auto meas = corrupted_measurements(s, pe, attacks, 1.0);
  CHECK(meas.delta_omega[0] ==
        doctest::Approx(s.machines[0].delta_omega + 0.01).epsilon(1e-15));
  CHECK(meas.delta_omega[1] == s.machines[1].delta_omega);
  CHECK(meas.p_e[0] == pe[0]);
  CHECK(meas.v_bd[0] == s.machines[0].v_bd);
}

TEST_CASE("two overlapping attacks on one channel are rejected") {
  const SystemState s = two_machine_state();
  const std::vector<double> pe{0.4, 0.6};
  AttackSpec a;
  a.target = AttackTarget::BusVoltageD;
  a.machine = 0;
  a.gamma = 0.1;
  a.t_start = 0.0;
  AttackSpec b = a;
  b.gamma = -0.1;
  b.t_start = 0.5;
  const std::vector<AttackSpec> attacks{a, b};
  CHECK_THROWS_AS(corrupted_measurements(s, pe, attacks, 1.0),
                  OverlappingAttacks);
  // Disjoint in time: fine.
  CHECK_NOTHROW(corrupted_measurements(s, pe, attacks, 0.25));
}
