#include "doctest.h"

#include <cmath>

#include "dsdm/control.hpp"

using namespace dsdm;

TEST_CASE("kinematic nullspace keeps the output still") {
  const ActuatorConfig cfg = prototype_config();
  const NullspaceProjector p(cfg);
  const auto& n = p.kinematic();
  CHECK(std::abs(output_speed(7.0 * n[0], 7.0 * n[1], cfg.junction)) < 1e-14);
}

TEST_CASE("dynamic nullspace accelerates M1 only") {
  const ActuatorConfig cfg = prototype_config();
  const NullspaceProjector p(cfg);
  const double u = 250.0;
  const MotorCurrents i = hs_inner_allocation(0.0, 0.0, u, p);
  const Acceleration a = accel_free(PlantState{}, i, {}, cfg);
  CHECK(a.w1 == doctest::Approx(u).epsilon(1e-12));
  CHECK(std::abs(a.w_o) < 1e-12 * u);
}

TEST_CASE("torque demand goes to M1 alone") {
  const ActuatorConfig cfg = prototype_config();
  const NullspaceProjector p(cfg);
  const MotorCurrents i = hs_inner_allocation(0.02, 0.005, 0.0, p);
  CHECK(i.i2 == 0.0);
  CHECK(i.i1 * cfg.m1.torque_constant * 4.0 == doctest::Approx(0.025));
}

TEST_CASE("position PI") {
  const PiGains g{.kp = 100.0, .ki = 10.0, .kv = 0.0, .windup_limit = 1.0};
  PiState st;
  // Small error: proportional plus one integration step.
  const double out = hf_position_pi(st, {0.001, 0.0}, 0.0, 0.0, 0.01, g, 2.0);
  CHECK(out == doctest::Approx(0.1 + 10.0 * 0.001 * 0.01));
  CHECK(st.integral == doctest::Approx(1e-4));
}

TEST_CASE("position PI rate feedback") {
  const PiGains g{.kp = 0.0, .ki = 0.0, .kv = 3.0, .windup_limit = 1.0};
  PiState st;
  CHECK(hf_position_pi(st, {0.0, 0.1}, 0.0, 0.05, 0.01, g, 2.0) == doctest::Approx(0.15));
}

TEST_CASE("anti-windup freezes the integrator on saturation") {
  const PiGains g{.kp = 1000.0, .ki = 100.0, .kv = 0.0, .windup_limit = 5.0};
  PiState st;
  for (int k = 0; k < 1000; ++k) {
    const double out = hf_position_pi(st, {0.2, 0.0}, 0.0, 0.0, 0.002, g, 1.14);
    CHECK(out == doctest::Approx(1.14));
  }
  CHECK(st.integral == 0.0);
  // Once the error reverses the output leaves the limit immediately.
  CHECK(hf_position_pi(st, {0.0, 0.0}, 0.0001, 0.0, 0.002, g, 1.14) < 0.0);
}

TEST_CASE("integrator is bounded by the windup limit") {
  const PiGains g{.kp = 0.0, .ki = 100.0, .kv = 0.0, .windup_limit = 0.3};
  PiState st;
  for (int k = 0; k < 1000; ++k) hf_position_pi(st, {0.01, 0.0}, 0.0, 0.0, 0.002, g, 10.0);
  CHECK(st.integral == doctest::Approx(0.3));
}

TEST_CASE("seeded integrator reproduces a given current") {
  const PiGains g{.kp = 5600.0, .ki = 73000.0, .kv = 118.0, .windup_limit = 1.14};
  PiState st;
  const MotionReference ref{0.1, 0.0};
  st.integral = pi_seed_integral(0.3, ref, 0.1001, 0.002, g);
  const double p = g.kp * (ref.x - 0.1001) + g.kv * (0.0 - 0.002);
  CHECK(st.integral + p == doctest::Approx(0.3));
}

TEST_CASE("impedance law") {
  const OutputTrain t{0.02, 0.0};
  const ImpedanceParams p{2000.0, 50.0};
  CHECK(hs_impedance({0.0, 0.0}, 0.0, 0.0, p, t, std::nullopt) == 0.0);
  const double tau = hs_impedance({0.01, 0.0}, 0.0, 0.1, p, t, std::nullopt);
  CHECK(tau == doctest::Approx(t.force_to_torque(2000.0 * 0.01 - 50.0 * 0.1)));
  const double cap = t.force_to_torque(30.0);
  CHECK(hs_impedance({1.0, 0.0}, 0.0, 0.0, p, t, cap) == doctest::Approx(cap));
  CHECK(hs_impedance({-1.0, 0.0}, 0.0, 0.0, p, t, cap) == doctest::Approx(-cap));
}

TEST_CASE("braking and unload laws") {
  CHECK(braking_secondary(0.0, 50.0) == 0.0);
  CHECK(braking_secondary(2.0, 50.0) == doctest::Approx(-100.0));
  const JunctionGeometry g(3.0, 54.0);
  // Driving w1 towards R1 w_o is the same as driving w2 to zero.
  const double w_o = 1.0;
  const double w1 = 1.0;
  PlantState s;
  s.w_o = w_o;
  s.w1 = w1;
  const double w2 = m2_speed(s, g);
  CHECK(m2_unload_secondary(w2, 20.0, g) == doctest::Approx(-20.0 * (w1 - 4.0 * w_o)));
}

TEST_CASE("kinematic transition set-points") {
  const ActuatorConfig cfg = prototype_config();
  const NullspaceProjector p(cfg);
  const auto sp = kinematic_transition(0.0, 2.0, p);
  CHECK(sp[0] == 0.0);
  CHECK(sp[1] == doctest::Approx(144.0));
  CHECK(output_speed(sp[0], sp[1], cfg.junction) == doctest::Approx(2.0));
  // Reproducing the current state is bumpless.
  PlantState s;
  s.w_o = 1.3;
  s.w1 = 3.0;
  const auto here = kinematic_transition(s.w1, s.w_o, p);
  CHECK(here[0] == doctest::Approx(s.w1));
  CHECK(here[1] == doctest::Approx(m2_speed(s, cfg.junction)));
}

TEST_CASE("kinematic transition under stiff velocity loops") {
  // M1 ramps to rest while the output is asked to hold its speed.
  ActuatorConfig cfg = prototype_config();
  const NullspaceProjector p(cfg);
  const double w_out = 3.0;
  PlantState s;
  s.w_o = w_out;
  s.w1 = 4.0 * w_out;
  const double dt = 50e-6;
  const int n = stable_substeps(cfg, {}, BrakeState::Free, dt);
  const double kv = 1.0;  // A per rad/s
  double worst = 0.0;
  for (int k = 0; k < 8000; ++k) {
    const double t = k * dt;
    const double u1 = 4.0 * w_out * std::max(0.0, 1.0 - t / 0.2);
    const auto sp = kinematic_transition(u1, w_out, p);
    const MotorCurrents i{kv * (sp[0] - s.w1), kv * (sp[1] - m2_speed(s, cfg.junction))};
    s = advance(s, i, {}, cfg, dt, n);
    worst = std::max(worst, std::abs(s.w_o - w_out) / w_out);
  }
  CHECK(worst < 0.02);
  // What is left on M1 is the P-loop offset against screw friction.
  CHECK(std::abs(s.w1) < cfg.brake_engage_speed);
}

namespace {

SelectorLimits limits() { return selector_limits(prototype_config(), SelectorSettings{}); }

}  // namespace

TEST_CASE("selector stays in high speed for low impedance or a force limit") {
  ModeState st;
  SelectorObservation obs{.w_o = 0.0, .position_error = 0.1, .i1_saturated = true, .i2 = 0.0};
  for (int k = 0; k < 100; ++k) st = mode_selector(st, obs, {Impedance::Low, std::nullopt}, limits(), 0.002);
  CHECK(st.mode == Mode::HighSpeed);
  for (int k = 0; k < 100; ++k) st = mode_selector(st, obs, {Impedance::High, 0.01}, limits(), 0.002);
  CHECK(st.mode == Mode::HighSpeed);
  ModeState hf;
  hf.mode = Mode::HighForce;
  CHECK(mode_selector(hf, obs, {Impedance::Low, std::nullopt}, limits(), 0.002).mode == Mode::HighSpeed);
}

TEST_CASE("selector downshifts after sustained resistance") {
  const SelectorLimits lim = limits();
  ModeState st;
  const SelectorObservation stalled{.w_o = 0.0, .position_error = 0.05, .i1_saturated = true, .i2 = 0.0};
  const SelectorObservation free_run{.w_o = 10.0, .position_error = 0.05, .i1_saturated = true, .i2 = 0.0};
  const TaskSpec task;
  const int needed = static_cast<int>(std::ceil(lim.dwell / 0.002 - 1e-9));
  for (int k = 0; k < needed - 1; ++k) {
    st = mode_selector(st, stalled, task, lim, 0.002);
    CHECK(st.mode == Mode::HighSpeed);
  }
  // A fast-moving sample resets the timer.
  st = mode_selector(st, free_run, task, lim, 0.002);
  CHECK(st.resistance_timer == 0.0);
  for (int k = 0; k < needed; ++k) st = mode_selector(st, stalled, task, lim, 0.002);
  CHECK(st.mode == Mode::ShiftingToHF);
}

TEST_CASE("selector upshifts when high force is no longer needed") {
  const SelectorLimits lim = limits();
  ModeState st;
  st.mode = Mode::HighForce;
  const SelectorObservation light{.w_o = 0.1, .position_error = 0.05, .i1_saturated = false, .i2 = 0.0};
  const SelectorObservation loaded{.w_o = 0.1, .position_error = 0.05, .i1_saturated = false, .i2 = 0.5};
  for (int k = 0; k < 100; ++k) st = mode_selector(st, loaded, {}, lim, 0.002);
  CHECK(st.mode == Mode::HighForce);
  for (int k = 0; k < 100 && st.mode == Mode::HighForce; ++k) st = mode_selector(st, light, {}, lim, 0.002);
  CHECK(st.mode == Mode::HighSpeed);
}

TEST_CASE("selector thresholds come from the plant") {
  const ActuatorConfig cfg = prototype_config();
  const SelectorLimits lim = limits();
  const double hs_torque = cfg.m1.torque_constant * 4.0 * cfg.m1.current_limit;
  CHECK(lim.upshift_current * cfg.m2.torque_constant * 72.0 == doctest::Approx(0.3 * hs_torque));
  CHECK(lim.stall_speed == doctest::Approx(0.05 * cfg.m1.no_load_speed() / 4.0));
}

namespace {

Observation at_rest(double t, BrakeState brake) {
  Observation o;
  o.t = t;
  o.brake = brake;
  return o;
}

}  // namespace

TEST_CASE("releasing the brake switches mode in the same tick") {
  const ActuatorConfig cfg = prototype_config();
  Controller c(cfg, ControllerSettings{}, Mode::HighForce, {});
  c.request_mode(Mode::HighSpeed);
  c.outer_tick(at_rest(0.0, BrakeState::Locked), {});
  CHECK(c.mode() == Mode::HighSpeed);
  const ControlCommand cmd = c.inner_tick(at_rest(0.0, BrakeState::Locked));
  CHECK(cmd.brake_request == BrakeRequest::Release);
  CHECK(c.inner_tick(at_rest(0.0, BrakeState::Free)).brake_request == BrakeRequest::Hold);
  REQUIRE(c.shifts().size() == 1);
  CHECK(c.shifts()[0].from == Mode::HighForce);
}

TEST_CASE("shift with M1 already at rest engages on the first tick") {
  const ActuatorConfig cfg = prototype_config();
  Controller c(cfg, ControllerSettings{}, Mode::HighSpeed, {});
  c.request_mode(Mode::HighForce);
  c.outer_tick(at_rest(0.0, BrakeState::Free), {});
  CHECK(c.mode() == Mode::HighForce);
  CHECK(c.inner_tick(at_rest(0.0, BrakeState::Free)).brake_request == BrakeRequest::Engage);
}

TEST_CASE("shift times out when M1 will not slow down") {
  const ActuatorConfig cfg = prototype_config();
  ControllerSettings st;
  st.max_shift_time = 0.01;
  Controller c(cfg, st, Mode::HighSpeed, {});
  c.request_mode(Mode::HighForce);
  Observation o = at_rest(0.0, BrakeState::Free);
  o.w1 = 10.0;
  for (int k = 0; k < 20; ++k) {
    o.t = k * st.outer_period;
    c.outer_tick(o, {});
    const ControlCommand cmd = c.inner_tick(o);
    CHECK(cmd.brake_request != BrakeRequest::Engage);
  }
  CHECK(c.mode() == Mode::HighSpeed);
  REQUIRE(c.faults().size() == 1);
  CHECK(c.faults()[0].find("aborted") != std::string::npos);
}

TEST_CASE("controller rejects starting mid-shift") {
  CHECK_THROWS(Controller(prototype_config(), ControllerSettings{}, Mode::ShiftingToHF, {}));
}
