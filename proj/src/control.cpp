#include "dsdm/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dsdm {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::HighForce: return "HighForce";
    case Mode::HighSpeed: return "HighSpeed";
    case Mode::ShiftingToHF: return "ShiftingToHF";
  }
  return "?";
}

const char* to_string(Impedance i) { return i == Impedance::High ? "High" : "Low"; }

NullspaceProjector::NullspaceProjector(const ActuatorConfig& cfg) {
  const double r1 = cfg.junction.m1_ratio();
  const double r2 = cfg.junction.m2_ratio();
  kinematic_ = {1.0, -r2 / r1};
  dynamic_ = {cfg.ports.m1.inertia / cfg.m1.torque_constant,
              -r2 * cfg.ports.m2.inertia / (r1 * cfg.m2.torque_constant)};
  m1_torque_gain_ = 1.0 / (cfg.m1.torque_constant * r1);
  m2_ratio_ = r2;
}

double hf_position_pi(PiState& state, const MotionReference& ref, double x, double v,
                      double dt, const PiGains& gains, double output_limit) {
  const double e = ref.x - x;
  const double unclamped_p = gains.kp * e + gains.kv * (ref.v - v);
  const double candidate =
      std::clamp(state.integral + gains.ki * e * dt, -gains.windup_limit, gains.windup_limit);
  const double out = unclamped_p + candidate;
  // Clamping anti-windup: only accept the new integral when it does not
  // drive an already saturated output further out.
  const bool saturated_high = out > output_limit && e > 0.0;
  const bool saturated_low = out < -output_limit && e < 0.0;
  if (!saturated_high && !saturated_low) state.integral = candidate;
  return std::clamp(unclamped_p + state.integral, -output_limit, output_limit);
}

double pi_seed_integral(double current, const MotionReference& ref, double x, double v,
                        const PiGains& gains) {
  const double p = gains.kp * (ref.x - x) + gains.kv * (ref.v - v);
  return std::clamp(current - p, -gains.windup_limit, gains.windup_limit);
}

double hs_impedance(const MotionReference& ref, double x, double v, const ImpedanceParams& p,
                    const OutputTrain& train, std::optional<double> torque_limit) {
  const double force = p.stiffness * (ref.x - x) + p.damping * (ref.v - v);
  const double tau = train.force_to_torque(force);
  if (torque_limit) return std::clamp(tau, -*torque_limit, *torque_limit);
  return tau;
}

MotorCurrents hs_inner_allocation(double tau_d, double friction_comp, double secondary_u,
                                  const NullspaceProjector& proj) {
  const auto& n = proj.dynamic();
  return {n[0] * secondary_u + proj.m1_torque_gain() * (tau_d + friction_comp),
          n[1] * secondary_u};
}

double braking_secondary(double w1, double gain) { return -gain * w1; }

double m2_unload_secondary(double w2, double gain, const JunctionGeometry& g) {
  return gain * g.m1_ratio() / g.m2_ratio() * w2;
}

std::array<double, 2> kinematic_transition(double u1, double u2, const NullspaceProjector& proj) {
  const auto& n = proj.kinematic();
  return {n[0] * u1, n[1] * u1 + proj.m2_ratio() * u2};
}

double friction_compensation(double w_o, const ActuatorConfig& cfg, double fraction) {
  return fraction * cfg.train.coulomb_torque() * std::tanh(w_o / kCoulombRegularization);
}

ModeState mode_selector(const ModeState& current, const SelectorObservation& obs,
                        const TaskSpec& task, const SelectorLimits& limits, double dt) {
  ModeState next = current;
  next.desired_impedance = task.desired_impedance;
  next.torque_limit = task.torque_limit;
  if (current.mode == Mode::ShiftingToHF) return next;

  const bool high_speed_only = task.desired_impedance == Impedance::Low || task.torque_limit;
  if (high_speed_only) {
    next.mode = Mode::HighSpeed;
    next.resistance_timer = 0.0;
    next.upshift_timer = 0.0;
    return next;
  }

  if (current.mode == Mode::HighSpeed) {
    const bool resisted = obs.i1_saturated && std::abs(obs.w_o) < limits.stall_speed;
    next.resistance_timer = resisted ? current.resistance_timer + dt : 0.0;
    if (next.resistance_timer >= limits.dwell) {
      next.mode = Mode::ShiftingToHF;
      next.resistance_timer = 0.0;
    }
  } else {
    const bool free_motion = std::abs(obs.i2) < limits.upshift_current &&
                             std::abs(obs.position_error) > limits.upshift_error;
    next.upshift_timer = free_motion ? current.upshift_timer + dt : 0.0;
    if (next.upshift_timer >= limits.dwell) {
      next.mode = Mode::HighSpeed;
      next.upshift_timer = 0.0;
    }
  }
  return next;
}

SelectorLimits selector_limits(const ActuatorConfig& cfg, const SelectorSettings& s) {
  const double r1 = cfg.junction.m1_ratio();
  const double r2 = cfg.junction.m2_ratio();
  const double top_speed = std::min(cfg.m1.no_load_speed(), cfg.m1.speed_limit) / r1;
  const double hs_torque = cfg.m1.torque_constant * r1 * cfg.m1.current_limit;
  return {
      .stall_speed = s.stall_speed_fraction * top_speed,
      .upshift_current =
          s.upshift_capacity_fraction * hs_torque / (cfg.m2.torque_constant * r2),
      .upshift_error = s.upshift_error,
      .dwell = s.dwell,
  };
}

Controller::Controller(const ActuatorConfig& cfg, const ControllerSettings& settings,
                       Mode initial, const TaskSpec& task)
    : cfg_(cfg),
      settings_(settings),
      proj_(cfg),
      limits_(selector_limits(cfg, settings.selector)),
      task_(task) {
  if (initial == Mode::ShiftingToHF) {
    throw std::invalid_argument("Controller: cannot start in the middle of a shift");
  }
  if (!(settings.outer_period > 0.0) || settings.inner_per_outer < 1) {
    throw ConfigError("controller: outer_period must be > 0 and inner_per_outer >= 1");
  }
  state_.mode = initial;
  state_.desired_impedance = task.desired_impedance;
  state_.torque_limit = task.torque_limit;
}

void Controller::request_mode(Mode target) { pending_request_ = target; }

void Controller::record(const Observation& obs, Mode from, Mode to) {
  shifts_.push_back({obs.t, from, to, obs.w1});
}

void Controller::enter_high_speed(const Observation& obs, const MotionReference& ref) {
  const Mode from = state_.mode;
  state_.mode = Mode::HighSpeed;
  pending_brake_ = BrakeRequest::Release;
  handoff_offset_ = 0.0;
  pi_error_offset_ = 0.0;
  if (settings_.seed_handoff) {
    // Torque M2 was delivering, carried over to M1 through the other port,
    // minus the part spent on M2's own drag.
    const double r2 = cfg_.junction.m2_ratio();
    const double seed = cfg_.m2.torque_constant * r2 * obs.applied.i2 -
                        r2 * r2 * cfg_.ports.m2.damping * obs.w_o;
    const double tau_now =
        hs_impedance(ref, obs.x, obs.v, settings_.hs_impedance, cfg_.train, std::nullopt);
    const double comp = friction_compensation(obs.w_o, cfg_, settings_.friction_comp_fraction);
    handoff_offset_ = seed - tau_now - comp;
  }
  record(obs, from, Mode::HighSpeed);
}

void Controller::begin_shift(const Observation& obs) {
  state_.mode = Mode::ShiftingToHF;
  shift_elapsed_ = 0.0;
  record(obs, Mode::HighSpeed, Mode::ShiftingToHF);
}

void Controller::engage(const Observation& obs, const MotionReference& ref) {
  state_.mode = Mode::HighForce;
  pending_brake_ = BrakeRequest::Engage;
  const double demand = tau_d_ + friction_comp_;
  const double current = demand / (cfg_.m2.torque_constant * cfg_.junction.m2_ratio());
  // The impedance loop leaves a tracking error the PI would otherwise close
  // at once; it is faded out instead.
  pi_error_offset_ = settings_.seed_handoff ? ref.x - obs.x : 0.0;
  MotionReference shifted = ref;
  shifted.x -= pi_error_offset_;
  pi_.integral = pi_seed_integral(current, shifted, obs.x, obs.v, settings_.hf_pi);
  tau_d_ = 0.0;
  friction_comp_ = 0.0;
  handoff_offset_ = 0.0;
  record(obs, Mode::ShiftingToHF, Mode::HighForce);
}

void Controller::outer_tick(const Observation& obs, const MotionReference& ref) {
  const double dt = settings_.outer_period;

  if (pending_request_) {
    const Mode target = *pending_request_;
    pending_request_.reset();
    if (target == Mode::HighForce && state_.mode == Mode::HighSpeed) {
      begin_shift(obs);
    } else if (target == Mode::HighSpeed && state_.mode == Mode::HighForce) {
      enter_high_speed(obs, ref);
    }
  }

  if (automatic_) {
    const SelectorObservation so{obs.w_o, ref.x - obs.x, obs.i1_saturated, obs.applied.i2};
    ModeState next = mode_selector(state_, so, task_, limits_, dt);
    const Mode before = state_.mode;
    const Mode wanted = next.mode;
    next.mode = before;
    state_ = next;
    if (before == Mode::HighSpeed && wanted == Mode::ShiftingToHF && !shift_inhibited_) {
      begin_shift(obs);
    } else if (before == Mode::HighForce && wanted == Mode::HighSpeed) {
      enter_high_speed(obs, ref);
    }
  }

  if (state_.mode == Mode::ShiftingToHF) {
    if (std::abs(obs.w1) < cfg_.brake_engage_speed) {
      engage(obs, ref);
    } else if (shift_elapsed_ >= settings_.max_shift_time) {
      std::ostringstream msg;
      msg << "shift to high-force aborted at t=" << obs.t << " s: |w1|=" << std::abs(obs.w1)
          << " rad/s still above " << cfg_.brake_engage_speed << " rad/s after "
          << settings_.max_shift_time << " s";
      faults_.push_back(msg.str());
      shift_inhibited_ = true;
      state_.mode = Mode::HighSpeed;
      record(obs, Mode::ShiftingToHF, Mode::HighSpeed);
    } else {
      shift_elapsed_ += dt;
    }
  }

  if (state_.mode == Mode::HighForce) {
    MotionReference shifted = ref;
    shifted.x -= pi_error_offset_;
    hf_current_ = hf_position_pi(pi_, shifted, obs.x, obs.v, dt, settings_.hf_pi,
                                 cfg_.m2.current_limit);
    pi_error_offset_ *= decay_factor(dt);
    tau_d_ = 0.0;
    friction_comp_ = 0.0;
    return;
  }

  double tau = hs_impedance(ref, obs.x, obs.v, settings_.hs_impedance, cfg_.train, std::nullopt);
  tau += handoff_offset_;
  if (task_.torque_limit) tau = std::clamp(tau, -*task_.torque_limit, *task_.torque_limit);
  tau_d_ = tau;
  friction_comp_ = friction_compensation(obs.w_o, cfg_, settings_.friction_comp_fraction);
  handoff_offset_ *= decay_factor(dt);
}

double Controller::decay_factor(double dt) const {
  return settings_.handoff_decay > 0.0 ? std::exp(-dt / settings_.handoff_decay) : 0.0;
}

ControlCommand Controller::inner_tick(const Observation& obs) {
  ControlCommand cmd;
  cmd.brake_request = pending_brake_;
  pending_brake_ = BrakeRequest::Hold;
  if (state_.mode == Mode::HighForce) {
    cmd.i1_sp = 0.0;
    cmd.i2_sp = hf_current_;
    return cmd;
  }
  double u = 0.0;
  if (state_.mode == Mode::ShiftingToHF) {
    u = braking_secondary(obs.w1, settings_.braking_gain);
  } else if (settings_.m2_unload_gain > 0.0) {
    u = m2_unload_secondary(obs.w2, settings_.m2_unload_gain, cfg_.junction);
  }
  const MotorCurrents i = hs_inner_allocation(tau_d_, friction_comp_, u, proj_);
  cmd.i1_sp = i.i1;
  cmd.i2_sp = i.i2;
  if (state_.mode == Mode::ShiftingToHF) {
    // With the output blocked, M2 has to carry the reaction of the M1
    // torque or the braking law settles at a nonzero w1.
    const double r1 = cfg_.junction.m1_ratio();
    const double capacity = cfg_.m1.torque_constant * r1 * cfg_.m1.current_limit;
    const double tau = std::clamp(tau_d_ + friction_comp_, -capacity, capacity);
    cmd.i2_sp += tau / (cfg_.m2.torque_constant * cfg_.junction.m2_ratio());
  }
  return cmd;
}

}  // namespace dsdm
