#pragma once

// Weight and winding-loss comparison of a single geared motor against the
// dual-motor arrangement for two operating points of equal power.
//
// Every component mass is proportional to the maximum torque at its own
// output shaft. Motors have a rectangular torque/speed envelope whose
// speed side is capped by the family's `motor_speed_limit`.

#include <array>
#include <optional>
#include <vector>

#include "dsdm/model.hpp"

namespace dsdm {

struct OperatingPoint {
  double torque;  // N·m
  double speed;   // rad/s

  double power() const { return torque * speed; }
};

struct MassModel {
  double motor_density = 2.0;       // kg/(N·m)
  double gearbox_density = 0.1;     // kg/(N·m), gearboxes and differentials
  double brake_density = 0.2;       // kg/(N·m)
  double motor_speed_limit = 733.0; // rad/s, top speed of the motor family
};

struct SingleMotorDesign {
  double ratio;        // motor speed / output speed
  double motor_torque; // N·m at the motor shaft
  double motor_mass;
  double gearbox_mass;
  double total() const { return motor_mass + gearbox_mass; }
};

struct DsdmDesign {
  double m1_ratio;
  double m2_ratio;
  double m1_mass;
  double m2_mass;
  double gearbox_mass;       // M2 reduction
  double differential_mass;
  double brake_mass;         // holds M1 while M2 carries the low-speed point
  double total() const {
    return m1_mass + m2_mass + gearbox_mass + differential_mass + brake_mass;
  }
};

/// Dense log-spaced sweep over the gear ratio (1000 points, upper end at the
/// largest ratio that keeps the motor under its speed limit).
SingleMotorDesign size_single_motor(const std::array<OperatingPoint, 2>& points,
                                    const MassModel& mm);
DsdmDesign size_dsdm(const std::array<OperatingPoint, 2>& points, const MassModel& mm);

double single_motor_mass(const std::array<OperatingPoint, 2>& points, const MassModel& mm);
double dsdm_mass(const std::array<OperatingPoint, 2>& points, const MassModel& mm);

/// Copper loss r I² for an output torque delivered through ratio R.
double winding_loss(double tau_out, double ratio, const MotorParams& motor);

/// The two equal-power points of the weight study: the fast one at
/// `high_speed`, the slow one `lambda` times slower.
std::array<OperatingPoint, 2> equal_power_points(double power, double high_speed, double lambda);

struct SizingRow {
  double lambda;
  double single_mass;
  double dsdm_mass;
};

/// Log-spaced sweep of lambda over [lambda_lo, lambda_hi].
std::vector<SizingRow> sizing_sweep(double power, double high_speed, double lambda_lo,
                                    double lambda_hi, int steps, const MassModel& mm);

/// Speed ratio above which the dual-motor design is lighter, found by
/// bisection on [lo, hi]. Returns nothing when the sign does not change.
std::optional<double> sizing_crossover(double power, double high_speed, double lo, double hi,
                                       const MassModel& mm);

}  // namespace dsdm
