#include <cmath>
#include <sstream>

#include "dsdm/scenario.hpp"

namespace dsdm {

namespace {

double quantize(double angle, int counts) {
  if (counts <= 0) return angle;
  const double q = kTwoPi / counts;
  return std::round(angle / q) * q;
}

bool clipped(double requested, double applied) {
  return std::abs(requested - applied) > 1e-12 * std::max(1.0, std::abs(requested));
}

}  // namespace

RunResult run_scenario(const Scenario& s) {
  validate(s);
  const ActuatorConfig& cfg = s.setup.plant;
  const JunctionGeometry& g = cfg.junction;
  const OutputTrain& train = cfg.train;
  const double dt = s.setup.plant_dt;
  const int per_outer = s.setup.controller.inner_per_outer;
  const int counts = s.setup.sensors.encoder_counts;

  const LoadModel load = to_rotary(s.load, train);
  const int substeps_free = stable_substeps(cfg, load, BrakeState::Free, dt);
  const int substeps_locked = stable_substeps(cfg, load, BrakeState::Locked, dt);

  PlantState state = s.initial_state;
  state.brake = s.initial_mode == Mode::HighForce ? BrakeState::Locked : BrakeState::Free;
  if (state.brake == BrakeState::Locked) state.w1 = 0.0;

  Controller ctl(cfg, s.setup.controller, s.initial_mode, s.task);
  ctl.set_automatic(s.automatic);

  RunResult result;
  result.scenario = s.name;
  const auto ticks = static_cast<long>(std::llround(s.duration / dt));
  result.trace.reserve(static_cast<std::size_t>(ticks / per_outer + 2));

  MotorCurrents applied;
  bool i1_sat = false;
  bool i2_sat = false;
  std::size_t next_request = 0;

  for (long k = 0; k <= ticks; ++k) {
    state.t = static_cast<double>(k) * dt;
    const double w2 = m2_speed(state, g);

    Observation obs;
    obs.t = state.t;
    const double theta1 = quantize(state.theta1, counts);
    const double theta2 = quantize(m2_angle(state, g), counts);
    obs.x = counts > 0 ? train.to_linear(theta1 / g.m1_ratio() + theta2 / g.m2_ratio())
                       : train.to_linear(state.theta_o);
    obs.v = train.to_linear(state.w_o);
    obs.w_o = state.w_o;
    obs.w1 = state.w1;
    obs.w2 = w2;
    obs.brake = state.brake;
    obs.applied = applied;
    obs.i1_saturated = i1_sat;
    obs.i2_saturated = i2_sat;

    const bool outer = k % per_outer == 0;
    if (outer) {
      while (next_request < s.mode_requests.size() &&
             s.mode_requests[next_request].time <= state.t + 0.5 * dt) {
        ctl.request_mode(s.mode_requests[next_request].target);
        ++next_request;
      }
      ctl.outer_tick(obs, s.reference(state.t));
    }

    const ControlCommand cmd = ctl.inner_tick(obs);
    if (cmd.brake_request == BrakeRequest::Engage) {
      if (std::abs(state.w1) >= cfg.brake_engage_speed) {
        std::ostringstream msg;
        msg << "brake engaged at t=" << state.t << " s with |w1|=" << std::abs(state.w1)
            << " rad/s (limit " << cfg.brake_engage_speed << ")";
        throw SimulationFault(msg.str());
      }
      result.engagements.push_back({state.t, state.w1});
      state.brake = BrakeState::Locked;
      state.w1 = 0.0;
    } else if (cmd.brake_request == BrakeRequest::Release) {
      state.brake = BrakeState::Free;
    }

    const double i1 =
        state.brake == BrakeState::Locked ? 0.0 : apply_saturation(cmd.i1_sp, state.w1, cfg.m1);
    const double i2 = apply_saturation(cmd.i2_sp, m2_speed(state, g), cfg.m2);
    i1_sat = state.brake == BrakeState::Free && clipped(cmd.i1_sp, i1);
    i2_sat = clipped(cmd.i2_sp, i2);
    applied = {i1, i2};

    if (outer) {
      result.trace.push_back({
          .t = state.t,
          .x_o = train.to_linear(state.theta_o),
          .v_o = train.to_linear(state.w_o),
          .w1 = state.w1,
          .w2 = m2_speed(state, g),
          .i1 = i1,
          .i2 = i2,
          .mode = ctl.mode(),
          .brake = state.brake,
          .tau_o_est = estimated_output_torque(applied, state.brake, cfg),
      });
    }
    if (k == ticks) break;

    const int n = state.brake == BrakeState::Locked ? substeps_locked : substeps_free;
    state = advance(state, applied, load, cfg, dt, n);
  }

  result.shifts = ctl.shifts();
  result.faults = ctl.faults();
  return result;
}

}  // namespace dsdm
