#pragma once

// Time-domain plant for both brake states.
//
// Free brake: two degrees of freedom (output speed, M1 speed). The three
// port equations
//   tau_ext - tau_o = J_o dw_o + b_o w_o
//   k1 i1   - tau_1 = J_1 dw_1 + b_1 w_1
//   k2 i2   - tau_2 = J_2 dw_2 + b_2 w_2
// are reduced with the junction constraints to a 2x2 linear system in
// (dw_o, dw_1). Locked brake: w1 == 0 and a single output DOF remains.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>

#include "dsdm/model.hpp"

namespace dsdm {

class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Width of the tanh band used to regularize coulomb friction, rad/s.
inline constexpr double kCoulombRegularization = 1e-3;

enum class BrakeState { Locked, Free };

struct PlantState {
  double w_o = 0.0;      // output (screw) speed, rad/s
  double w1 = 0.0;       // M1 shaft speed, rad/s
  double theta_o = 0.0;  // rad
  double theta1 = 0.0;   // rad
  BrakeState brake = BrakeState::Free;
  double t = 0.0;        // s
};

/// M2 shaft speed implied by the kinematic constraint.
double m2_speed(const PlantState& s, const JunctionGeometry& g);
/// M2 shaft angle implied by the kinematic constraint, taking all angles
/// zero at the same instant.
double m2_angle(const PlantState& s, const JunctionGeometry& g);

/// Output-side load, all quantities on the rotary screw side.
struct LoadModel {
  double inertia = 0.0;    // kg·m² added to the output port
  double damping = 0.0;    // N·m·s/rad
  double stiffness = 0.0;  // N·m/rad
  /// Contact position of a one-sided spring; the spring is bilateral
  /// (anchored at theta = 0) when unset.
  std::optional<double> wall;
  double coulomb = 0.0;    // N·m, added to the ballscrew friction
  std::function<double(double)> external;  // tau_ext(t), N·m

  double spring_torque(double theta) const;
  double external_torque(double t) const { return external ? external(t) : 0.0; }
};

struct MotorCurrents {
  double i1 = 0.0;
  double i2 = 0.0;
};

struct Acceleration {
  double w_o = 0.0;
  double w1 = 0.0;
};

/// Lumped output-side quantities of the free-brake plant with the input
/// port dampings and tau_ext neglected.
struct DerivedDynamics {
  double lumped_inertia;                          // kg·m²
  double lumped_damping;                          // N·m·s/rad
  std::array<std::array<double, 2>, 2> input;     // (dw_o, dw_1) per (i1, i2)
};

DerivedDynamics derive_dynamics(const JunctionGeometry& g, const PortSet& ports,
                                double k1, double k2);
DerivedDynamics derive_dynamics(const ActuatorConfig& cfg);

/// Friction torque acting on the output (sign opposes w_o), ballscrew plus load.
double output_friction_torque(double w_o, const ActuatorConfig& cfg, const LoadModel& load);

/// Sum of all load torques acting on the output port (tau_ext, spring,
/// coulomb), excluding inertia and viscous damping.
double output_load_torque(const PlantState& s, const ActuatorConfig& cfg, const LoadModel& load);

Acceleration accel_free(const PlantState& s, MotorCurrents i, const LoadModel& load,
                        const ActuatorConfig& cfg);

/// Output acceleration with M1 locked.
double accel_locked(const PlantState& s, double i2, const LoadModel& load,
                    const ActuatorConfig& cfg);

/// Effective inertia and damping seen by the output when M1 is locked.
double locked_inertia(const ActuatorConfig& cfg, const LoadModel& load);
double locked_damping(const ActuatorConfig& cfg, const LoadModel& load);

/// One classical RK4 step with currents held constant over dt. The brake
/// state is not changed here.
PlantState step(const PlantState& s, MotorCurrents i, const LoadModel& load,
                const ActuatorConfig& cfg, double dt);

/// Number of RK4 substeps that keeps the fastest plant mode inside the
/// stability region of RK4 for a control period of dt.
int stable_substeps(const ActuatorConfig& cfg, const LoadModel& load, BrakeState brake, double dt);

/// Advances a control period of dt with `substeps` RK4 steps.
PlantState advance(const PlantState& s, MotorCurrents i, const LoadModel& load,
                   const ActuatorConfig& cfg, double dt, int substeps);

/// Clamps a current set-point to the drive's current limit and to what the
/// supply voltage can push against back-EMF at shaft speed w.
double apply_saturation(double i_cmd, double w, const MotorParams& m);

/// Total kinetic energy in the three ports.
double kinetic_energy(const PlantState& s, const ActuatorConfig& cfg);

/// Drive torque the junction applies on the output port, reconstructed from
/// motor currents the way a sensorless controller would see it.
double estimated_output_torque(MotorCurrents i, BrakeState brake, const ActuatorConfig& cfg);

}  // namespace dsdm
