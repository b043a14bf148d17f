#include "dsdm/model.hpp"

#include <algorithm>
#include <cmath>

namespace dsdm {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

JunctionGeometry::JunctionGeometry(double ring_sun_ratio, double m2_reduction)
    : ring_sun_ratio_(ring_sun_ratio), m2_reduction_(m2_reduction) {
  require(finite_positive(ring_sun_ratio), "junction: ring_sun_ratio must be > 0");
  require(finite_positive(m2_reduction), "junction: m2_reduction must be > 0");
  m1_ratio_ = ring_sun_ratio + 1.0;
  m2_ratio_ = m2_reduction * (ring_sun_ratio + 1.0) / ring_sun_ratio;
}

JunctionGeometry JunctionGeometry::from_stored(double ring_sun_ratio, double m2_reduction,
                                               double m1_ratio, double m2_ratio) {
  JunctionGeometry g(ring_sun_ratio, m2_reduction);
  require(close_rel(g.m1_ratio(), m1_ratio, 1e-9),
          "junction: stored m1_ratio " + std::to_string(m1_ratio) +
              " does not match N + 1 = " + std::to_string(g.m1_ratio()));
  require(close_rel(g.m2_ratio(), m2_ratio, 1e-9),
          "junction: stored m2_ratio " + std::to_string(m2_ratio) +
              " does not match r2 (N + 1) / N = " + std::to_string(g.m2_ratio()));
  return g;
}

void validate(const MotorParams& m, const std::string& name) {
  require(finite_positive(m.torque_constant), name + ": torque_constant must be > 0");
  require(finite_positive(m.resistance), name + ": resistance must be > 0");
  require(finite_positive(m.inertia), name + ": inertia must be > 0");
  require(finite_nonnegative(m.damping), name + ": damping must be >= 0");
  require(finite_positive(m.current_limit), name + ": current_limit must be > 0");
  require(finite_positive(m.voltage_limit), name + ": voltage_limit must be > 0");
  require(finite_positive(m.speed_limit), name + ": speed_limit must be > 0");
}

void validate(const PortImpedance& p, const std::string& name) {
  require(finite_positive(p.inertia), name + ": inertia must be > 0");
  require(finite_nonnegative(p.damping), name + ": damping must be >= 0");
}

void validate(const OutputTrain& t) {
  require(finite_positive(t.lead), "output_train: lead must be > 0");
  require(finite_nonnegative(t.coulomb), "output_train: coulomb must be >= 0");
}

void validate(const ActuatorConfig& cfg) {
  validate(cfg.m1, "motor1");
  validate(cfg.m2, "motor2");
  validate(cfg.ports.output, "ports.output");
  validate(cfg.ports.m1, "ports.m1");
  validate(cfg.ports.m2, "ports.m2");
  validate(cfg.train);
  require(finite_positive(cfg.brake_engage_speed), "brake_engage_speed must be > 0");
  // Re-derive the cached advantages; a geometry assembled by hand must agree.
  JunctionGeometry::from_stored(cfg.junction.ring_sun_ratio(), cfg.junction.m2_reduction(),
                                cfg.junction.m1_ratio(), cfg.junction.m2_ratio());
  require(cfg.junction.m1_ratio() < cfg.junction.m2_ratio(),
          "junction: m1_ratio must be smaller than m2_ratio (got " +
              std::to_string(cfg.junction.m1_ratio()) + " vs " +
              std::to_string(cfg.junction.m2_ratio()) + ")");
}

ActuatorConfig prototype_config() {
  // 24 V brushed DC motor, catalog-like constants.
  const MotorParams motor{
      .torque_constant = 0.0234,
      .resistance = 2.32,
      .inertia = 1.05e-6,
      .damping = 1.0e-7,
      .current_limit = 1.14,
      .voltage_limit = 24.0,
      .speed_limit = 1466.0,
  };
  const OutputTrain train{.lead = 0.020, .coulomb = 4.0};
  return ActuatorConfig{
      .junction = JunctionGeometry(3.0, 54.0),
      .m1 = motor,
      .m2 = motor,
      .ports =
          PortSet{
              .output = {.inertia = 5.0e-6, .damping = train.linear_to_rotary_damping(30.0)},
              .m1 = {.inertia = motor.inertia, .damping = motor.damping},
              .m2 = {.inertia = motor.inertia, .damping = motor.damping},
          },
      .train = train,
      .brake_engage_speed = 0.5,
  };
}

double output_speed(double w1, double w2, const JunctionGeometry& g) {
  return w1 / g.m1_ratio() + w2 / g.m2_ratio();
}

PortTorques torque_split(double tau_o, const JunctionGeometry& g) {
  return {-tau_o / g.m1_ratio(), -tau_o / g.m2_ratio()};
}

double reflected_output_mass(const ActuatorConfig& cfg, GearMode mode) {
  const double scale = kTwoPi / cfg.train.lead;
  const double j_o = cfg.ports.output.inertia;
  double j = 0.0;
  if (mode == GearMode::HighForce) {
    const double r = cfg.junction.m2_ratio();
    j = j_o + r * r * cfg.ports.m2.inertia;
  } else {
    const double r = cfg.junction.m1_ratio();
    j = j_o + r * r * cfg.ports.m1.inertia;
  }
  return j * scale * scale;
}

const char* to_string(GearMode mode) {
  return mode == GearMode::HighForce ? "HighForce" : "HighSpeed";
}

}  // namespace dsdm
