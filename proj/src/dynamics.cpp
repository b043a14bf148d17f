#include "dsdm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dsdm {

double m2_speed(const PlantState& s, const JunctionGeometry& g) {
  return g.m2_ratio() * (s.w_o - s.w1 / g.m1_ratio());
}

double m2_angle(const PlantState& s, const JunctionGeometry& g) {
  return g.m2_ratio() * (s.theta_o - s.theta1 / g.m1_ratio());
}

double LoadModel::spring_torque(double theta) const {
  if (stiffness == 0.0) return 0.0;
  if (wall) {
    return theta > *wall ? -stiffness * (theta - *wall) : 0.0;
  }
  return -stiffness * theta;
}

DerivedDynamics derive_dynamics(const JunctionGeometry& g, const PortSet& ports, double k1,
                                double k2) {
  const double j_o = ports.output.inertia;
  const double j1 = ports.m1.inertia;
  const double j2 = ports.m2.inertia;
  if (!(j2 > 0.0)) throw ConfigError("derive_dynamics: M2 port inertia must be > 0");
  const double r1 = g.m1_ratio();
  const double r2 = g.m2_ratio();

  const double coupling = (r1 / r2) * (r1 / r2) * (j1 / j2);
  const double j_t = j_o + r1 * r1 * j1 + coupling * j_o;
  const double b_t = ports.output.damping * (1.0 + coupling);

  DerivedDynamics d{};
  d.lumped_inertia = j_t;
  d.lumped_damping = b_t;
  d.input[0][0] = k1 * r1 / j_t;
  d.input[0][1] = k2 * r1 * (r1 * j1 / (r2 * j2)) / j_t;
  d.input[1][0] = k1 * (r1 * r1 + r1 * r1 * j_o / (r2 * r2 * j2)) / j_t;
  d.input[1][1] = -k2 * r1 * j_o / (r2 * j2) / j_t;
  return d;
}

DerivedDynamics derive_dynamics(const ActuatorConfig& cfg) {
  return derive_dynamics(cfg.junction, cfg.ports, cfg.m1.torque_constant,
                         cfg.m2.torque_constant);
}

double output_friction_torque(double w_o, const ActuatorConfig& cfg, const LoadModel& load) {
  const double f = cfg.train.coulomb_torque() + load.coulomb;
  return -f * std::tanh(w_o / kCoulombRegularization);
}

double output_load_torque(const PlantState& s, const ActuatorConfig& cfg, const LoadModel& load) {
  return load.external_torque(s.t) + load.spring_torque(s.theta_o) +
         output_friction_torque(s.w_o, cfg, load);
}

Acceleration accel_free(const PlantState& s, MotorCurrents i, const LoadModel& load,
                        const ActuatorConfig& cfg) {
  const double r1 = cfg.junction.m1_ratio();
  const double r2 = cfg.junction.m2_ratio();
  const double j_o = cfg.ports.output.inertia + load.inertia;
  const double b_o = cfg.ports.output.damping + load.damping;
  const double j1 = cfg.ports.m1.inertia;
  const double b1 = cfg.ports.m1.damping;
  const double j2 = cfg.ports.m2.inertia;
  const double b2 = cfg.ports.m2.damping;
  const double tau = output_load_torque(s, cfg, load);

  // Row 1 is the M1 port with tau_1 = -tau_o / R1 substituted, row 2 the M2
  // port with w2 = R2 (w_o - w1 / R1).
  const double f1 = cfg.m1.torque_constant * i.i1 + tau / r1 - b_o * s.w_o / r1 - b1 * s.w1;
  const double f2 = cfg.m2.torque_constant * i.i2 + tau / r2 - (b_o / r2 + r2 * b2) * s.w_o +
                    (r2 / r1) * b2 * s.w1;
  const double m11 = j_o / r1;
  const double m12 = j1;
  const double m21 = j_o / r2 + r2 * j2;
  const double m22 = -r2 * j2 / r1;
  const double det = m11 * m22 - m12 * m21;
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw ConfigError("accel_free: singular inertia matrix");
  }
  return {(f1 * m22 - m12 * f2) / det, (m11 * f2 - m21 * f1) / det};
}

double locked_inertia(const ActuatorConfig& cfg, const LoadModel& load) {
  const double r2 = cfg.junction.m2_ratio();
  return cfg.ports.output.inertia + load.inertia + r2 * r2 * cfg.ports.m2.inertia;
}

double locked_damping(const ActuatorConfig& cfg, const LoadModel& load) {
  const double r2 = cfg.junction.m2_ratio();
  return cfg.ports.output.damping + load.damping + r2 * r2 * cfg.ports.m2.damping;
}

double accel_locked(const PlantState& s, double i2, const LoadModel& load,
                    const ActuatorConfig& cfg) {
  const double drive = cfg.m2.torque_constant * i2 * cfg.junction.m2_ratio();
  const double tau = output_load_torque(s, cfg, load);
  return (drive + tau - locked_damping(cfg, load) * s.w_o) / locked_inertia(cfg, load);
}

namespace {

struct Derivative {
  double theta_o, w_o, theta1, w1;
};

Derivative derivative(const PlantState& s, MotorCurrents i, const LoadModel& load,
                      const ActuatorConfig& cfg) {
  if (s.brake == BrakeState::Locked) {
    return {s.w_o, accel_locked(s, i.i2, load, cfg), 0.0, 0.0};
  }
  const Acceleration a = accel_free(s, i, load, cfg);
  return {s.w_o, a.w_o, s.w1, a.w1};
}

PlantState offset(const PlantState& s, const Derivative& d, double h) {
  PlantState out = s;
  out.theta_o += h * d.theta_o;
  out.w_o += h * d.w_o;
  out.theta1 += h * d.theta1;
  out.w1 += h * d.w1;
  out.t += h;
  return out;
}

void check_finite(const PlantState& s) {
  if (std::isfinite(s.w_o) && std::isfinite(s.w1) && std::isfinite(s.theta_o) &&
      std::isfinite(s.theta1)) {
    return;
  }
  std::ostringstream msg;
  msg << "non-finite plant state at t=" << s.t << " s: w_o=" << s.w_o << " w1=" << s.w1
      << " theta_o=" << s.theta_o << " theta1=" << s.theta1;
  throw SimulationFault(msg.str());
}

}  // namespace

PlantState step(const PlantState& s, MotorCurrents i, const LoadModel& load,
                const ActuatorConfig& cfg, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  const Derivative k1 = derivative(s, i, load, cfg);
  const Derivative k2 = derivative(offset(s, k1, 0.5 * dt), i, load, cfg);
  const Derivative k3 = derivative(offset(s, k2, 0.5 * dt), i, load, cfg);
  const Derivative k4 = derivative(offset(s, k3, dt), i, load, cfg);

  PlantState out = s;
  const double h6 = dt / 6.0;
  out.theta_o += h6 * (k1.theta_o + 2.0 * k2.theta_o + 2.0 * k3.theta_o + k4.theta_o);
  out.w_o += h6 * (k1.w_o + 2.0 * k2.w_o + 2.0 * k3.w_o + k4.w_o);
  if (s.brake == BrakeState::Free) {
    out.theta1 += h6 * (k1.theta1 + 2.0 * k2.theta1 + 2.0 * k3.theta1 + k4.theta1);
    out.w1 += h6 * (k1.w1 + 2.0 * k2.w1 + 2.0 * k3.w1 + k4.w1);
  } else {
    out.w1 = 0.0;
  }
  out.t = s.t + dt;
  check_finite(out);
  return out;
}

int stable_substeps(const ActuatorConfig& cfg, const LoadModel& load, BrakeState brake,
                    double dt) {
  const double friction_slope =
      (cfg.train.coulomb_torque() + load.coulomb) / kCoulombRegularization;
  double damping_rate = 0.0;
  double spring_rate = 0.0;
  if (brake == BrakeState::Locked) {
    const double j = locked_inertia(cfg, load);
    damping_rate = (locked_damping(cfg, load) + friction_slope) / j;
    spring_rate = std::sqrt(load.stiffness / j);
  } else {
    PortSet ports = cfg.ports;
    ports.output.inertia += load.inertia;
    const DerivedDynamics d = derive_dynamics(cfg.junction, ports, 1.0, 1.0);
    const double r1 = cfg.junction.m1_ratio();
    const double r2 = cfg.junction.m2_ratio();
    const double gain = (1.0 + (r1 / r2) * (r1 / r2) * cfg.ports.m1.inertia / cfg.ports.m2.inertia) /
                        d.lumped_inertia;
    damping_rate = (cfg.ports.output.damping + load.damping + friction_slope) * gain +
                   std::max(cfg.ports.m1.damping / cfg.ports.m1.inertia,
                            cfg.ports.m2.damping / cfg.ports.m2.inertia);
    spring_rate = std::sqrt(load.stiffness * gain);
  }
  // RK4 is stable up to |h·lambda| ~ 2.8 on both axes; keep a 2x margin.
  const double n = std::ceil(dt * (damping_rate + spring_rate) / 1.4);
  return std::max(1, static_cast<int>(n));
}

PlantState advance(const PlantState& s, MotorCurrents i, const LoadModel& load,
                   const ActuatorConfig& cfg, double dt, int substeps) {
  if (substeps < 1) throw std::invalid_argument("advance: substeps must be >= 1");
  const double h = dt / substeps;
  const double t_end = s.t + dt;
  PlantState out = s;
  for (int k = 0; k < substeps; ++k) out = step(out, i, load, cfg, h);
  out.t = t_end;
  return out;
}

double apply_saturation(double i_cmd, double w, const MotorParams& m) {
  double i = std::clamp(i_cmd, -m.current_limit, m.current_limit);
  const double emf = m.torque_constant * w;
  if (m.resistance * i + emf > m.voltage_limit) {
    i = (m.voltage_limit - emf) / m.resistance;
  } else if (m.resistance * i + emf < -m.voltage_limit) {
    i = (-m.voltage_limit - emf) / m.resistance;
  }
  return std::clamp(i, -m.current_limit, m.current_limit);
}

double kinetic_energy(const PlantState& s, const ActuatorConfig& cfg) {
  const double w2 = m2_speed(s, cfg.junction);
  return 0.5 * (cfg.ports.output.inertia * s.w_o * s.w_o + cfg.ports.m1.inertia * s.w1 * s.w1 +
                cfg.ports.m2.inertia * w2 * w2);
}

double estimated_output_torque(MotorCurrents i, BrakeState brake, const ActuatorConfig& cfg) {
  const double r1 = cfg.junction.m1_ratio();
  const double r2 = cfg.junction.m2_ratio();
  const double k1 = cfg.m1.torque_constant;
  const double k2 = cfg.m2.torque_constant;
  if (brake == BrakeState::Locked) return k2 * r2 * i.i2;
  const double m2_share = r1 * cfg.ports.m1.inertia / (r2 * cfg.ports.m2.inertia);
  return k1 * r1 * i.i1 + k2 * r1 * m2_share * i.i2;
}

}  // namespace dsdm
