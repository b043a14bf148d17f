#pragma once

// Controller stack: high-force position PI, high-speed impedance with
// friction compensation, nullspace allocation of the two motor currents,
// the two gear-shift procedures and automatic mode selection.
//
// Clocks: outer loop at 500 Hz (reference tracking, mode logic), inner
// allocation at 20 kHz (current set-points, nullspace secondary terms).
// Outer-loop quantities are linear (m, m/s, N); currents are in A and the
// output torque demand in N·m on the screw.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dsdm/dynamics.hpp"
#include "dsdm/model.hpp"

namespace dsdm {

enum class Mode { HighForce, HighSpeed, ShiftingToHF };
enum class BrakeRequest { Hold, Engage, Release };
enum class Impedance { High, Low };

const char* to_string(Mode m);
const char* to_string(Impedance i);

struct ControlCommand {
  double i1_sp = 0.0;
  double i2_sp = 0.0;
  BrakeRequest brake_request = BrakeRequest::Hold;
};

struct ModeState {
  Mode mode = Mode::HighSpeed;
  Impedance desired_impedance = Impedance::High;
  std::optional<double> torque_limit;  // N·m
  double resistance_timer = 0.0;       // s
  double upshift_timer = 0.0;          // s
};

/// Input directions that leave the output unaffected.
class NullspaceProjector {
 public:
  explicit NullspaceProjector(const ActuatorConfig& cfg);

  /// (w1, w2) direction with zero output speed: (1, -R2/R1).
  const std::array<double, 2>& kinematic() const { return kinematic_; }
  /// (i1, i2) direction with zero output acceleration:
  /// (J1/k1, -R2 J2 / (R1 k2)).
  const std::array<double, 2>& dynamic() const { return dynamic_; }
  /// Current on M1 per N·m of output torque demand, 1 / (k1 R1).
  double m1_torque_gain() const { return m1_torque_gain_; }
  double m2_ratio() const { return m2_ratio_; }

 private:
  std::array<double, 2> kinematic_;
  std::array<double, 2> dynamic_;
  double m1_torque_gain_;
  double m2_ratio_;
};

struct MotionReference {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
};

/// High-force position loop gains, current output on M2.
struct PiGains {
  double kp;             // A/m
  double ki;             // A/(m·s)
  double kv;             // A·s/m, rate feedback on the velocity error
  double windup_limit;   // A, bound on the integral contribution
};

struct PiState {
  double integral = 0.0;  // A
};

/// PI on position error with rate feedback and clamping anti-windup: the
/// integrator freezes while the output sits on `output_limit` and the error
/// pushes further into it. Returns the saturated M2 current set-point.
double hf_position_pi(PiState& state, const MotionReference& ref, double x, double v,
                      double dt, const PiGains& gains, double output_limit);

/// Integrator value that makes the PI output equal `current` right now.
double pi_seed_integral(double current, const MotionReference& ref, double x, double v,
                        const PiGains& gains);

struct ImpedanceParams {
  double stiffness = 0.0;  // N/m
  double damping = 0.0;    // N·s/m
};

/// tau_d = K (x_ref - x) + B (v_ref - v), clamped to |tau_d| <= torque_limit
/// when one is given. v_ref is zero for set-point tasks.
double hs_impedance(const MotionReference& ref, double x, double v, const ImpedanceParams& p,
                    const OutputTrain& train, std::optional<double> torque_limit);

/// Current set-points from an output torque demand plus a nullspace
/// secondary signal (units of 1/s², the M1 acceleration it produces).
MotorCurrents hs_inner_allocation(double tau_d, double friction_comp, double secondary_u,
                                  const NullspaceProjector& proj);

/// Braking law on M1 projected through the nullspace.
double braking_secondary(double w1, double gain);

/// Secondary law that brings M2 to rest by moving the output motion onto
/// M1; equivalent to braking (w1 - R1 w_o).
double m2_unload_secondary(double w2, double gain, const JunctionGeometry& g);

/// Velocity set-points for the kinematic transition: w1 tracks u1 and the
/// output tracks u2.
std::array<double, 2> kinematic_transition(double u1, double u2, const NullspaceProjector& proj);

/// Fraction `fraction` of the modeled ballscrew coulomb friction, as a
/// torque in the direction of motion.
double friction_compensation(double w_o, const ActuatorConfig& cfg, double fraction);

struct TaskSpec {
  Impedance desired_impedance = Impedance::High;
  std::optional<double> torque_limit;  // N·m on the screw
};

/// Absolute thresholds of the mode selector, derived from the plant.
struct SelectorLimits {
  double stall_speed;        // rad/s on the output, resistance detected below
  double upshift_current;    // A on M2, free motion detected below
  double upshift_error;      // m, minimum position error to bother upshifting
  double dwell;              // s, conditions must hold this long
};

struct SelectorObservation {
  double w_o = 0.0;
  double position_error = 0.0;
  bool i1_saturated = false;
  double i2 = 0.0;
};

/// Automatic mode selection. Returns the next mode state; a change from
/// HighSpeed to ShiftingToHF is a downshift request, HighForce to HighSpeed
/// an upshift. ShiftingToHF itself is left to the transition logic.
ModeState mode_selector(const ModeState& current, const SelectorObservation& obs,
                        const TaskSpec& task, const SelectorLimits& limits, double dt);

struct SelectorSettings {
  double stall_speed_fraction = 0.05;     // of the high-speed mode top speed
  double upshift_capacity_fraction = 0.3;  // of the high-speed mode torque capacity
  double upshift_error = 0.010;           // m
  double dwell = 0.050;                   // s
};

SelectorLimits selector_limits(const ActuatorConfig& cfg, const SelectorSettings& s);

struct ControllerSettings {
  PiGains hf_pi{.kp = 5600.0, .ki = 73000.0, .kv = 118.0, .windup_limit = 1.14};
  ImpedanceParams hs_impedance{.stiffness = 2000.0, .damping = 0.0};
  double braking_gain = 50.0;            // 1/s
  double m2_unload_gain = 20.0;          // 1/s, 0 disables
  double max_shift_time = 2.0;           // s
  double friction_comp_fraction = 0.8;
  double handoff_decay = 0.2;            // s, decay of the offsets that make mode changes bumpless
  bool seed_handoff = true;
  SelectorSettings selector;
  double outer_period = 1.0 / 500.0;     // s
  int inner_per_outer = 40;
};

struct Observation {
  double t = 0.0;
  double x = 0.0;   // m
  double v = 0.0;   // m/s
  double w_o = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  BrakeState brake = BrakeState::Free;
  MotorCurrents applied;
  bool i1_saturated = false;
  bool i2_saturated = false;
};

struct ShiftEvent {
  double t;
  Mode from;
  Mode to;
  double w1;
};

/// The full controller. The caller ticks `outer_tick` every
/// `inner_per_outer` inner ticks, immediately before the inner tick that
/// shares its sample.
class Controller {
 public:
  Controller(const ActuatorConfig& cfg, const ControllerSettings& settings, Mode initial,
             const TaskSpec& task);

  void outer_tick(const Observation& obs, const MotionReference& ref);
  ControlCommand inner_tick(const Observation& obs);

  /// Scheduled mode change (scripted scenarios). HighForce starts the
  /// HS->HF procedure, HighSpeed releases the brake.
  void request_mode(Mode target);
  void set_task(const TaskSpec& task) { task_ = task; }
  /// Whether the selector runs on every outer tick.
  void set_automatic(bool on) { automatic_ = on; }

  const ModeState& mode_state() const { return state_; }
  Mode mode() const { return state_.mode; }
  const std::vector<std::string>& faults() const { return faults_; }
  const std::vector<ShiftEvent>& shifts() const { return shifts_; }
  /// Output torque demand of the high-speed loop (N·m), including friction
  /// compensation; zero in high-force mode.
  double torque_demand() const { return tau_d_ + friction_comp_; }
  const NullspaceProjector& projector() const { return proj_; }

 private:
  void enter_high_speed(const Observation& obs, const MotionReference& ref);
  void begin_shift(const Observation& obs);
  void engage(const Observation& obs, const MotionReference& ref);
  void record(const Observation& obs, Mode from, Mode to);
  double decay_factor(double dt) const;

  ActuatorConfig cfg_;
  ControllerSettings settings_;
  NullspaceProjector proj_;
  SelectorLimits limits_;
  ModeState state_;
  TaskSpec task_;
  bool automatic_ = false;
  std::optional<Mode> pending_request_;

  PiState pi_;
  double hf_current_ = 0.0;
  double tau_d_ = 0.0;
  double friction_comp_ = 0.0;
  double handoff_offset_ = 0.0;
  double pi_error_offset_ = 0.0;  // m, position error carried into high-force mode
  double shift_elapsed_ = 0.0;
  bool shift_inhibited_ = false;
  BrakeRequest pending_brake_ = BrakeRequest::Hold;

  std::vector<std::string> faults_;
  std::vector<ShiftEvent> shifts_;
};

}  // namespace dsdm
