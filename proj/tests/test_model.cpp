#include "doctest.h"

#include <cmath>

#include "dsdm/model.hpp"

using namespace dsdm;

TEST_CASE("prototype junction advantages") {
  const JunctionGeometry g(3.0, 54.0);
  CHECK(g.m1_ratio() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(g.m2_ratio() == doctest::Approx(72.0).epsilon(1e-15));
  CHECK(g.m2_ratio() / g.m1_ratio() == doctest::Approx(18.0));
}

TEST_CASE("geometry rejects non-positive parameters") {
  CHECK_THROWS_AS(JunctionGeometry(0.0, 54.0), ConfigError);
  CHECK_THROWS_AS(JunctionGeometry(3.0, -1.0), ConfigError);
  CHECK_THROWS_AS(JunctionGeometry(std::nan(""), 54.0), ConfigError);
}

TEST_CASE("stored advantages must agree with the teeth ratio") {
  CHECK_NOTHROW(JunctionGeometry::from_stored(3.0, 54.0, 4.0, 72.0));
  CHECK_THROWS_AS(JunctionGeometry::from_stored(3.0, 54.0, 4.0, 70.0), ConfigError);
  CHECK_THROWS_AS(JunctionGeometry::from_stored(3.0, 54.0, 4.1, 72.0), ConfigError);
}

TEST_CASE("equal advantages are a valid geometry but not a valid actuator") {
  // r2 == N makes both ports equally geared.
  const JunctionGeometry g(3.0, 3.0);
  CHECK(g.m1_ratio() == doctest::Approx(g.m2_ratio()));
  ActuatorConfig cfg = prototype_config();
  cfg.junction = g;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("output speed") {
  const JunctionGeometry g(3.0, 54.0);
  CHECK(output_speed(0.0, 0.0, g) == 0.0);
  CHECK(output_speed(4.0, 0.0, g) == doctest::Approx(1.0));
  CHECK(output_speed(0.0, 72.0, g) == doctest::Approx(1.0));
  // Motion along (1, -R2/R1) leaves the output still.
  CHECK(std::abs(output_speed(10.0, -180.0, g)) < 1e-14);
}

TEST_CASE("torque split follows the lever ratios") {
  const JunctionGeometry g(3.0, 54.0);
  const PortTorques t = torque_split(1.0, g);
  CHECK(t.m1 == doctest::Approx(-0.25));
  CHECK(t.m2 == doctest::Approx(-1.0 / 72.0));
  const PortTorques z = torque_split(0.0, g);
  CHECK(z.m1 == 0.0);
  CHECK(z.m2 == 0.0);
}

TEST_CASE("reflected output mass") {
  const ActuatorConfig cfg = prototype_config();
  const double k = kTwoPi / cfg.train.lead;
  const double hf = (cfg.ports.output.inertia + 72.0 * 72.0 * cfg.ports.m2.inertia) * k * k;
  const double hs = (cfg.ports.output.inertia + 16.0 * cfg.ports.m1.inertia) * k * k;
  CHECK(reflected_output_mass(cfg, GearMode::HighForce) == doctest::Approx(hf));
  CHECK(reflected_output_mass(cfg, GearMode::HighSpeed) == doctest::Approx(hs));
  // Same order as the bench: hundreds of kg against a couple of kg.
  CHECK(hf > 300.0);
  CHECK(hf < 1000.0);
  CHECK(hs > 1.0);
  CHECK(hs < 5.0);
}

TEST_CASE("prototype validates and motor checks reject nonsense") {
  CHECK_NOTHROW(validate(prototype_config()));
  ActuatorConfig cfg = prototype_config();
  cfg.m1.torque_constant = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = prototype_config();
  cfg.ports.m2.inertia = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = prototype_config();
  cfg.train.lead = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("output train conversions") {
  const OutputTrain t{0.020, 4.0};
  CHECK(t.to_linear(kTwoPi) == doctest::Approx(0.020));
  CHECK(t.to_rotary(t.to_linear(3.7)) == doctest::Approx(3.7));
  CHECK(t.torque_to_force(t.force_to_torque(222.0)) == doctest::Approx(222.0));
  // Power is the same on both sides of the screw.
  const double w = 5.0;
  const double tau = 0.01;
  CHECK(tau * w == doctest::Approx(t.torque_to_force(tau) * t.to_linear(w)));
  CHECK(t.linear_to_rotary_damping(30.0) * w == doctest::Approx(t.force_to_torque(30.0 * t.to_linear(w))));
}
