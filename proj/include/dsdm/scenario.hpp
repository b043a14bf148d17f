#pragma once

// Built-in experiment catalog and the fixed-step closed-loop runner.

#include <functional>
#include <string>
#include <vector>

#include "dsdm/config.hpp"
#include "dsdm/control.hpp"
#include "dsdm/dynamics.hpp"

namespace dsdm {

/// Rectangular force applied on the carriage, N.
struct ForcePulse {
  double start;
  double duration;
  double force;
};

struct ModeRequestEvent {
  double time;
  Mode target;
};

/// Output load in carriage units.
struct LinearLoad {
  double mass = 0.0;       // kg
  double damping = 0.0;    // N·s/m
  double stiffness = 0.0;  // N/m
  std::optional<double> wall;  // m, one-sided contact position
  double coulomb = 0.0;    // N
  std::vector<ForcePulse> pulses;
};

LoadModel to_rotary(const LinearLoad& load, const OutputTrain& train);

using ReferenceFn = std::function<MotionReference(double)>;

ReferenceFn step_reference(double from, double to, double at);
ReferenceFn ramp_reference(double x0, double speed, double start);

struct Scenario {
  std::string name;
  std::string description;
  Setup setup;
  LinearLoad load;
  TaskSpec task;
  bool automatic = false;
  Mode initial_mode = Mode::HighSpeed;
  PlantState initial_state;
  ReferenceFn reference;
  double duration = 1.0;
  std::vector<ModeRequestEvent> mode_requests;  // time ordered
};

void validate(const Scenario& s);

std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name, const Setup& setup);

struct TraceRecord {
  double t;
  double x_o;   // m
  double v_o;   // m/s
  double w1;    // rad/s
  double w2;    // rad/s
  double i1;    // A, applied
  double i2;    // A, applied
  Mode mode;
  BrakeState brake;
  double tau_o_est;  // N·m, reconstructed from currents
};

struct BrakeEngagement {
  double t;
  double w1;
};

struct RunResult {
  std::string scenario;
  std::vector<TraceRecord> trace;
  std::vector<ShiftEvent> shifts;
  std::vector<BrakeEngagement> engagements;
  std::vector<std::string> faults;
};

/// Runs the closed loop at the plant step, records at the outer rate.
/// Throws SimulationFault on a non-finite state or a brake engagement
/// commanded above the engage speed.
RunResult run_scenario(const Scenario& s);

}  // namespace dsdm
