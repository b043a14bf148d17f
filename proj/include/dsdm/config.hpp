#pragma once

// Setup = plant parameters + controller gains + sensor options, loaded from
// a JSON file. Every key is SI; any key not listed below is rejected.
//
// {
//   "junction":   {"ring_sun_ratio", "m2_reduction", "m1_ratio"?, "m2_ratio"?},
//   "motor1":     {"torque_constant", "resistance", "inertia", "damping",
//                  "current_limit", "voltage_limit", "speed_limit"},
//   "motor2":     { same keys },
//   "ports":      {"output": {"inertia", "damping"}, "m1": {...}, "m2": {...}},
//   "output_train": {"lead", "coulomb"},
//   "brake_engage_speed": rad/s,
//   "plant_dt": s,
//   "sensors":    {"encoder_counts"},
//   "controller": {"hf_pi": {"kp", "ki", "kv", "windup_limit"},
//                  "hs_impedance": {"stiffness", "damping"},
//                  "braking_gain", "m2_unload_gain", "max_shift_time",
//                  "friction_comp_fraction", "handoff_decay", "seed_handoff",
//                  "outer_period", "inner_per_outer",
//                  "selector": {"stall_speed_fraction", "upshift_capacity_fraction",
//                               "upshift_error", "dwell"}}
// }
//
// Missing keys keep the prototype defaults.

#include <optional>
#include <string>

#include "dsdm/control.hpp"
#include "dsdm/model.hpp"

namespace dsdm {

struct SensorSettings {
  int encoder_counts = 0;  // per motor revolution; 0 reads exact angles
};

struct Setup {
  ActuatorConfig plant = prototype_config();
  ControllerSettings controller;
  SensorSettings sensors;
  double plant_dt = 50e-6;  // s, also the inner control period
};

void validate(const Setup& setup);

Setup parse_setup(const std::string& json_text);
Setup load_setup(const std::string& path);
std::string dump_setup(const Setup& setup);

/// Environment variable consulted when no --config flag is given.
inline constexpr const char* kConfigEnvVar = "DSDM_CONFIG";

/// `explicit_path` if set, else $DSDM_CONFIG, else the built-in prototype.
Setup resolve_setup(const std::optional<std::string>& explicit_path);

}  // namespace dsdm
