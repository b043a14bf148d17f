#include "doctest.h"

#include <cmath>
#include <limits>

#include "dsdm/dynamics.hpp"

using namespace dsdm;

namespace {

ActuatorConfig frictionless() {
  ActuatorConfig cfg = prototype_config();
  cfg.train.coulomb = 0.0;
  return cfg;
}

ActuatorConfig lossless() {
  ActuatorConfig cfg = frictionless();
  cfg.ports.output.damping = 0.0;
  cfg.ports.m1.damping = 0.0;
  cfg.ports.m2.damping = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("lumped inertia and first input entry on the prototype") {
  const ActuatorConfig cfg = prototype_config();
  const DerivedDynamics d = derive_dynamics(cfg);
  const double jo = cfg.ports.output.inertia;
  const double j = cfg.ports.m1.inertia;  // both ports share the motor
  const double jt = jo + 16.0 * j + (4.0 / 72.0) * (4.0 / 72.0) * jo;
  CHECK(d.lumped_inertia == doctest::Approx(jt).epsilon(1e-14));
  CHECK(d.input[0][0] == doctest::Approx(cfg.m1.torque_constant * 4.0 / jt).epsilon(1e-14));
  // M1 dominates the output response when R1 << R2.
  CHECK(d.input[0][0] > 10.0 * d.input[0][1]);
}

TEST_CASE("derive_dynamics needs a non-zero M2 inertia") {
  ActuatorConfig cfg = prototype_config();
  cfg.ports.m2.inertia = 0.0;
  CHECK_THROWS_AS(derive_dynamics(cfg), ConfigError);
}

TEST_CASE("free acceleration matches the lumped model without input damping") {
  ActuatorConfig cfg = frictionless();
  cfg.ports.m1.damping = 0.0;
  cfg.ports.m2.damping = 0.0;
  const DerivedDynamics d = derive_dynamics(cfg);
  PlantState s;
  s.w_o = 3.0;
  s.w1 = -40.0;
  const MotorCurrents i{0.4, -0.7};
  const Acceleration a = accel_free(s, i, {}, cfg);
  const double expect =
      -d.lumped_damping / d.lumped_inertia * s.w_o + d.input[0][0] * i.i1 + d.input[0][1] * i.i2;
  CHECK(a.w_o == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("instantaneous power balance in the free state") {
  // Without dissipation the kinetic energy rate equals the electrical
  // input k1 i1 w1 + k2 i2 w2 plus the external power.
  const ActuatorConfig cfg = lossless();
  LoadModel load;
  load.external = [](double) { return 0.003; };
  PlantState s;
  s.w_o = 2.0;
  s.w1 = 15.0;
  const MotorCurrents i{0.3, 0.2};
  const Acceleration a = accel_free(s, i, load, cfg);
  const double r1 = cfg.junction.m1_ratio();
  const double r2 = cfg.junction.m2_ratio();
  const double w2 = m2_speed(s, cfg.junction);
  const double dw2 = r2 * (a.w_o - a.w1 / r1);
  const double dke = cfg.ports.output.inertia * s.w_o * a.w_o + cfg.ports.m1.inertia * s.w1 * a.w1 +
                     cfg.ports.m2.inertia * w2 * dw2;
  const double input = cfg.m1.torque_constant * i.i1 * s.w1 +
                       cfg.m2.torque_constant * i.i2 * w2 + 0.003 * s.w_o;
  CHECK(dke == doctest::Approx(input).epsilon(1e-10));
}

TEST_CASE("energy is conserved when nothing drives or dissipates") {
  const ActuatorConfig cfg = lossless();
  PlantState s;
  s.w_o = 5.0;
  s.w1 = -30.0;
  const double e0 = kinetic_energy(s, cfg);
  for (int k = 0; k < 2000; ++k) s = step(s, {}, {}, cfg, 1e-4);
  CHECK(kinetic_energy(s, cfg) == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("locked output follows the first-order closed form") {
  const ActuatorConfig cfg = frictionless();
  const LoadModel load;
  const double i2 = 0.2;
  const double j = locked_inertia(cfg, load);
  const double b = locked_damping(cfg, load);
  const double tau = cfg.m2.torque_constant * cfg.junction.m2_ratio() * i2;
  PlantState s;
  s.brake = BrakeState::Locked;
  const double dt = 1e-3;
  for (int k = 0; k < 500; ++k) s = step(s, {0.0, i2}, load, cfg, dt);
  const double t = s.t;
  const double w = tau / b * (1.0 - std::exp(-b * t / j));
  const double theta = tau / b * (t - j / b * (1.0 - std::exp(-b * t / j)));
  CHECK(s.w_o == doctest::Approx(w).epsilon(1e-9));
  CHECK(s.theta_o == doctest::Approx(theta).epsilon(1e-9));
  CHECK(s.w1 == 0.0);
  CHECK(s.theta1 == 0.0);
  CHECK(s.brake == BrakeState::Locked);
}

TEST_CASE("free state approaches the locked state as M1 becomes immovable") {
  ActuatorConfig cfg = frictionless();
  PlantState s;
  s.w_o = 1.5;
  const double locked = [&] {
    PlantState l = s;
    l.brake = BrakeState::Locked;
    return accel_locked(l, 0.5, {}, cfg);
  }();
  cfg.ports.m1.inertia = 1e6;
  cfg.ports.m1.damping = 0.0;
  const Acceleration a = accel_free(s, {0.0, 0.5}, {}, cfg);
  CHECK(a.w_o == doctest::Approx(locked).epsilon(1e-6));
  CHECK(std::abs(a.w1) < 1e-6 * std::abs(a.w_o));
}

TEST_CASE("one-sided and bilateral springs") {
  LoadModel load;
  load.stiffness = 100.0;
  CHECK(load.spring_torque(0.5) == doctest::Approx(-50.0));
  CHECK(load.spring_torque(-0.5) == doctest::Approx(50.0));
  load.wall = 1.0;
  CHECK(load.spring_torque(0.5) == 0.0);
  CHECK(load.spring_torque(1.5) == doctest::Approx(-50.0));
}

TEST_CASE("friction opposes motion and vanishes at rest") {
  const ActuatorConfig cfg = prototype_config();
  const LoadModel load;
  CHECK(output_friction_torque(0.0, cfg, load) == 0.0);
  CHECK(output_friction_torque(1.0, cfg, load) ==
        doctest::Approx(-cfg.train.coulomb_torque()).epsilon(1e-9));
  CHECK(output_friction_torque(-1.0, cfg, load) ==
        doctest::Approx(cfg.train.coulomb_torque()).epsilon(1e-9));
}

TEST_CASE("non-finite state is a simulation fault") {
  const ActuatorConfig cfg = prototype_config();
  PlantState s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(s, {nan, 0.0}, {}, cfg, 1e-5), SimulationFault);
  CHECK_THROWS_AS(step(s, {}, {}, cfg, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(advance(s, {}, {}, cfg, 1e-5, 0), std::invalid_argument);
}

TEST_CASE("substep count keeps stiff friction stable") {
  const ActuatorConfig cfg = prototype_config();
  const LoadModel load;
  const int n = stable_substeps(cfg, load, BrakeState::Free, 50e-6);
  CHECK(n > 1);
  CHECK(stable_substeps(cfg, load, BrakeState::Locked, 50e-6) >= 1);
  // Start inside the friction band: the tanh slope is the stiff mode.
  PlantState s;
  s.w_o = 5e-4;
  for (int k = 0; k < 200; ++k) s = advance(s, {}, load, cfg, 50e-6, n);
  CHECK(std::abs(s.w_o) < 5e-4);
}

TEST_CASE("current and voltage saturation") {
  const MotorParams m = prototype_config().m1;
  CHECK(apply_saturation(0.5, 0.0, m) == doctest::Approx(0.5));
  CHECK(apply_saturation(5.0, 0.0, m) == doctest::Approx(m.current_limit));
  CHECK(apply_saturation(-5.0, 0.0, m) == doctest::Approx(-m.current_limit));
  // Near no-load speed the supply can only push (V - k w) / r.
  const double w = 0.95 * m.no_load_speed();
  const double i = apply_saturation(1.0, w, m);
  CHECK(i == doctest::Approx((m.voltage_limit - m.torque_constant * w) / m.resistance));
  CHECK(m.resistance * i + m.torque_constant * w <= m.voltage_limit + 1e-12);
  // Braking against motion gets the full current limit.
  CHECK(apply_saturation(-1.0, w, m) == doctest::Approx(-1.0));
}

TEST_CASE("torque estimate from currents") {
  const ActuatorConfig cfg = prototype_config();
  const double k = cfg.m2.torque_constant;
  CHECK(estimated_output_torque({0.0, 1.0}, BrakeState::Locked, cfg) == doctest::Approx(k * 72.0));
  // Currents along the dynamic nullspace produce no output torque.
  const double j = cfg.ports.m1.inertia;
  const MotorCurrents n{j / k, -72.0 * j / (4.0 * k)};
  CHECK(std::abs(estimated_output_torque(n, BrakeState::Free, cfg)) < 1e-15);
}
