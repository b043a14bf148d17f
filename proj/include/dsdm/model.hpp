#pragma once

// Parameter types and the algebraic relations of the 3-port planetary
// junction: sun gear on M1, ring gear on M2 (after its own reduction),
// carrier on the output.

#include <stdexcept>
#include <string>

namespace dsdm {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GearMode { HighForce, HighSpeed };

/// Planetary junction geometry.
///
/// Holds the ring-to-sun teeth ratio and the upstream reduction on the M2
/// port, plus the two mechanical advantages they imply:
///   m1 advantage = N + 1
///   m2 advantage = r2 (N + 1) / N
/// so that w_out = w1 / m1_ratio + w2 / m2_ratio.
class JunctionGeometry {
 public:
  JunctionGeometry(double ring_sun_ratio, double m2_reduction);

  /// Rebuilds a geometry from stored advantages and rejects them when they
  /// do not match the teeth ratio and reduction within 1e-9 relative.
  static JunctionGeometry from_stored(double ring_sun_ratio, double m2_reduction,
                                      double m1_ratio, double m2_ratio);

  double ring_sun_ratio() const { return ring_sun_ratio_; }
  double m2_reduction() const { return m2_reduction_; }
  double m1_ratio() const { return m1_ratio_; }
  double m2_ratio() const { return m2_ratio_; }

 private:
  double ring_sun_ratio_;
  double m2_reduction_;
  double m1_ratio_;
  double m2_ratio_;
};

struct MotorParams {
  double torque_constant;  // N·m/A
  double resistance;       // Ω
  double inertia;          // kg·m², rotor + shaft
  double damping;          // N·m·s/rad
  double current_limit;    // A
  double voltage_limit;    // V
  double speed_limit;      // rad/s

  /// Back-EMF limited no-load speed.
  double no_load_speed() const { return voltage_limit / torque_constant; }
};

struct PortImpedance {
  double inertia;  // kg·m²
  double damping;  // N·m·s/rad
};

struct PortSet {
  PortImpedance output;
  PortImpedance m1;
  PortImpedance m2;
};

/// Ballscrew between the planetary carrier and the linear output.
struct OutputTrain {
  double lead;     // m/rev
  double coulomb;  // N, output-side coulomb friction force

  double to_linear(double theta) const { return theta * lead / kTwoPi; }
  double to_rotary(double x) const { return x * kTwoPi / lead; }
  double force_to_torque(double force) const { return force * lead / kTwoPi; }
  double torque_to_force(double torque) const { return torque * kTwoPi / lead; }
  double coulomb_torque() const { return force_to_torque(coulomb); }
  /// N·s/m at the carriage to N·m·s/rad at the screw.
  double linear_to_rotary_damping(double c) const {
    const double k = lead / kTwoPi;
    return c * k * k;
  }
};

struct ActuatorConfig {
  JunctionGeometry junction;
  MotorParams m1;
  MotorParams m2;
  PortSet ports;
  OutputTrain train;
  double brake_engage_speed;  // rad/s on M1
};

void validate(const MotorParams& m, const std::string& name);
void validate(const PortImpedance& p, const std::string& name);
void validate(const OutputTrain& t);

/// Full configuration check; also requires m1_ratio < m2_ratio.
void validate(const ActuatorConfig& cfg);

/// The linear test-bench prototype: two 20 W brushed DC motors, N = 3,
/// r2 = 54 (18:1 gearhead times the 3:1 ring input), 20 mm lead ballscrew.
/// Motor and port inertias/dampings are calibration constants chosen so
/// the apparent output masses land near the published 750 kg / 2 kg.
ActuatorConfig prototype_config();

double output_speed(double w1, double w2, const JunctionGeometry& g);

struct PortTorques {
  double m1;
  double m2;
};

/// Torques on the two input ports that balance a torque tau_o on the
/// output port of a massless junction.
PortTorques torque_split(double tau_o, const JunctionGeometry& g);

/// Apparent linear mass at the ballscrew output, kg.
double reflected_output_mass(const ActuatorConfig& cfg, GearMode mode);

const char* to_string(GearMode mode);

}  // namespace dsdm
