#include "dsdm/scenario.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsdm {

LoadModel to_rotary(const LinearLoad& load, const OutputTrain& train) {
  // Carriage quantities reflect through (lead / 2 pi) once per force and
  // once per displacement.
  const double k = train.lead / kTwoPi;
  LoadModel out;
  out.inertia = load.mass * k * k;
  out.damping = load.damping * k * k;
  out.stiffness = load.stiffness * k * k;
  if (load.wall) out.wall = train.to_rotary(*load.wall);
  out.coulomb = train.force_to_torque(load.coulomb);
  if (!load.pulses.empty()) {
    out.external = [pulses = load.pulses, k](double t) {
      double f = 0.0;
      for (const auto& p : pulses) {
        if (t >= p.start && t < p.start + p.duration) f += p.force;
      }
      return f * k;
    };
  }
  return out;
}

ReferenceFn step_reference(double from, double to, double at) {
  return [=](double t) { return MotionReference{t >= at ? to : from, 0.0}; };
}

ReferenceFn ramp_reference(double x0, double speed, double start) {
  return [=](double t) {
    if (t < start) return MotionReference{x0, 0.0};
    return MotionReference{x0 + speed * (t - start), speed};
  };
}

void validate(const Scenario& s) {
  validate(s.setup);
  if (!(s.duration > 0.0)) throw ConfigError("scenario " + s.name + ": duration must be > 0");
  if (!s.reference) throw ConfigError("scenario " + s.name + ": missing reference");
  if (s.initial_mode == Mode::ShiftingToHF) {
    throw ConfigError("scenario " + s.name + ": cannot start mid-shift");
  }
  for (std::size_t k = 1; k < s.mode_requests.size(); ++k) {
    if (s.mode_requests[k].time < s.mode_requests[k - 1].time) {
      throw ConfigError("scenario " + s.name + ": mode requests must be time ordered");
    }
  }
  for (std::size_t k = 1; k < s.load.pulses.size(); ++k) {
    if (s.load.pulses[k].start < s.load.pulses[k - 1].start) {
      throw ConfigError("scenario " + s.name + ": force pulses must be time ordered");
    }
  }
  if (s.load.mass < 0.0 || s.load.damping < 0.0 || s.load.stiffness < 0.0 || s.load.coulomb < 0.0) {
    throw ConfigError("scenario " + s.name + ": load parameters must be >= 0");
  }
}

std::vector<std::string> scenario_names() {
  return {"hf-step-200mm",      "hs-step-200mm",         "backdrive-zero-impedance",
          "constant-speed-shift", "collision-force-limit", "auto-downshift-300mm"};
}

Scenario make_scenario(const std::string& name, const Setup& setup) {
  Scenario s;
  s.name = name;
  s.setup = setup;
  const OutputTrain& train = setup.plant.train;

  if (name == "hf-step-200mm") {
    s.description =
        "High-force mode, 200 mm position step at t=0.2 s; 222 N push for 1 s at t=5 s";
    s.initial_mode = Mode::HighForce;
    s.reference = step_reference(0.0, 0.200, 0.2);
    s.load.pulses = {{5.0, 1.0, 222.0}};
    s.duration = 10.0;
  } else if (name == "hs-step-200mm") {
    s.description = "High-speed mode, 200 mm step under a pure-stiffness impedance";
    s.initial_mode = Mode::HighSpeed;
    s.reference = step_reference(0.0, 0.200, 0.1);
    s.setup.controller.hs_impedance.damping = 0.0;
    s.duration = 3.0;
  } else if (name == "backdrive-zero-impedance") {
    s.description = "High-speed mode with zero impedance; a 10 N push for 0.3 s moves the output";
    s.initial_mode = Mode::HighSpeed;
    s.task.desired_impedance = Impedance::Low;
    s.setup.controller.hs_impedance = {.stiffness = 0.0, .damping = 0.0};
    s.reference = step_reference(0.0, 0.0, 0.0);
    s.load.pulses = {{0.2, 0.3, 10.0}};
    s.duration = 1.5;
  } else if (name == "constant-speed-shift") {
    s.description =
        "10 mm/s constant-speed tracking: high-force, release to high-speed at t=1 s, back to "
        "high-force at t=2 s";
    const double speed = 0.010;
    s.initial_mode = Mode::HighForce;
    s.initial_state.w_o = train.to_rotary(speed);
    s.reference = ramp_reference(0.0, speed, 0.0);
    s.setup.controller.hs_impedance = {.stiffness = 20000.0, .damping = 150.0};
    s.mode_requests = {{1.0, Mode::HighSpeed}, {2.0, Mode::HighForce}};
    s.duration = 3.0;
  } else if (name == "collision-force-limit") {
    s.description =
        "High-speed mode with a 30 N force limit, target 150 mm behind a stiff wall at 100 mm";
    s.initial_mode = Mode::HighSpeed;
    s.task.torque_limit = train.force_to_torque(30.0);
    s.reference = step_reference(0.0, 0.150, 0.1);
    s.load.stiffness = 2.0e5;
    s.load.wall = 0.100;
    s.duration = 1.5;
  } else if (name == "auto-downshift-300mm") {
    s.description =
        "Automatic mode selection, 300 mm target; a 4 N/mm one-sided spring starts at 250 mm";
    s.initial_mode = Mode::HighSpeed;
    s.automatic = true;
    s.task.desired_impedance = Impedance::High;
    s.reference = step_reference(0.0, 0.300, 0.1);
    s.load.stiffness = 4000.0;
    s.load.wall = 0.250;
    s.duration = 4.0;
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  if (s.initial_mode == Mode::HighForce) s.initial_state.brake = BrakeState::Locked;
  validate(s);
  return s;
}

}  // namespace dsdm
