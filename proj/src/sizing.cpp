#include "dsdm/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dsdm {

namespace {

constexpr int kRatioSweepPoints = 1000;
constexpr double kRatioSweepDecades = 3.0;

void check_inputs(const std::array<OperatingPoint, 2>& points, const MassModel& mm) {
  for (const auto& p : points) {
    if (!(std::isfinite(p.torque) && p.torque > 0.0 && std::isfinite(p.speed) && p.speed > 0.0)) {
      throw ConfigError("sizing: operating points need torque > 0 and speed > 0");
    }
  }
  const double p0 = points[0].power();
  const double p1 = points[1].power();
  if (std::abs(p0 - p1) > 0.01 * std::max(p0, p1)) {
    throw ConfigError("sizing: operating points must have the same power within 1% (got " +
                      std::to_string(p0) + " W and " + std::to_string(p1) + " W)");
  }
  if (!(mm.motor_density > 0.0) || !(mm.gearbox_density >= 0.0) || !(mm.brake_density >= 0.0) ||
      !(mm.motor_speed_limit > 0.0)) {
    throw ConfigError("sizing: densities must be >= 0 (motor > 0) and motor_speed_limit > 0");
  }
}

}  // namespace

SingleMotorDesign size_single_motor(const std::array<OperatingPoint, 2>& points,
                                    const MassModel& mm) {
  check_inputs(points, mm);
  const double max_torque = std::max(points[0].torque, points[1].torque);
  const double max_speed = std::max(points[0].speed, points[1].speed);
  const double ratio_hi = mm.motor_speed_limit / max_speed;

  SingleMotorDesign best{};
  double best_mass = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kRatioSweepPoints; ++k) {
    const double decades =
        kRatioSweepDecades * static_cast<double>(kRatioSweepPoints - 1 - k) / (kRatioSweepPoints - 1);
    const double ratio = ratio_hi * std::pow(10.0, -decades);
    if (max_speed * ratio > mm.motor_speed_limit * (1.0 + 1e-12)) continue;
    const double motor_torque = max_torque / ratio;
    const SingleMotorDesign d{
        .ratio = ratio,
        .motor_torque = motor_torque,
        .motor_mass = mm.motor_density * motor_torque,
        .gearbox_mass = mm.gearbox_density * max_torque,
    };
    if (d.total() < best_mass) {
      best_mass = d.total();
      best = d;
    }
  }
  if (!std::isfinite(best_mass)) throw ConfigError("sizing: no feasible single-motor ratio");
  return best;
}

DsdmDesign size_dsdm(const std::array<OperatingPoint, 2>& points, const MassModel& mm) {
  check_inputs(points, mm);
  const OperatingPoint& fast = points[0].speed >= points[1].speed ? points[0] : points[1];
  const OperatingPoint& slow = points[0].speed >= points[1].speed ? points[1] : points[0];

  DsdmDesign d{};
  d.m1_ratio = mm.motor_speed_limit / fast.speed;
  d.m2_ratio = mm.motor_speed_limit / slow.speed;
  d.m1_mass = mm.motor_density * fast.torque / d.m1_ratio;
  d.m2_mass = mm.motor_density * slow.torque / d.m2_ratio;
  d.gearbox_mass = mm.gearbox_density * slow.torque;
  d.differential_mass = mm.gearbox_density * std::max(fast.torque, slow.torque);
  d.brake_mass = mm.brake_density * slow.torque / d.m1_ratio;
  return d;
}

double single_motor_mass(const std::array<OperatingPoint, 2>& points, const MassModel& mm) {
  return size_single_motor(points, mm).total();
}

double dsdm_mass(const std::array<OperatingPoint, 2>& points, const MassModel& mm) {
  return size_dsdm(points, mm).total();
}

double winding_loss(double tau_out, double ratio, const MotorParams& motor) {
  if (!(ratio > 0.0)) throw ConfigError("winding_loss: ratio must be > 0");
  const double k = motor.torque_constant * ratio;
  return motor.resistance * tau_out * tau_out / (k * k);
}

std::array<OperatingPoint, 2> equal_power_points(double power, double high_speed, double lambda) {
  if (!(power > 0.0) || !(high_speed > 0.0) || !(lambda >= 1.0)) {
    throw ConfigError("sizing: need power > 0, high_speed > 0 and lambda >= 1");
  }
  const double slow_speed = high_speed / lambda;
  return {OperatingPoint{power / high_speed, high_speed},
          OperatingPoint{power / slow_speed, slow_speed}};
}

std::vector<SizingRow> sizing_sweep(double power, double high_speed, double lambda_lo,
                                    double lambda_hi, int steps, const MassModel& mm) {
  if (!(lambda_lo >= 1.0) || !(lambda_hi >= lambda_lo) || steps < 1) {
    throw ConfigError("sizing: lambda range must satisfy 1 <= lo <= hi, steps >= 1");
  }
  std::vector<SizingRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
    const double lambda = lambda_lo * std::pow(lambda_hi / lambda_lo, f);
    const auto points = equal_power_points(power, high_speed, lambda);
    rows.push_back({lambda, single_motor_mass(points, mm), dsdm_mass(points, mm)});
  }
  return rows;
}

std::optional<double> sizing_crossover(double power, double high_speed, double lo, double hi,
                                       const MassModel& mm) {
  auto gap = [&](double lambda) {
    const auto points = equal_power_points(power, high_speed, lambda);
    return dsdm_mass(points, mm) - single_motor_mass(points, mm);
  };
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (g_lo == 0.0) return lo;
  if ((g_lo > 0.0) == (g_hi > 0.0)) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = gap(mid);
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dsdm
