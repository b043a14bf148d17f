#include "dsdm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dsdm {

namespace {

using nlohmann::json;

using Handler = std::function<void(const json&, const std::string&)>;

void visit(const json& obj, const std::string& where, const std::map<std::string, Handler>& fields) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = fields.find(key);
    const std::string path = where.empty() ? key : where + "." + key;
    if (it == fields.end()) throw ConfigError("unknown config key '" + path + "'");
    it->second(value, path);
  }
}

Handler number(double& out) {
  return [&out](const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(path + ": must be finite");
  };
}

Handler integer(int& out) {
  return [&out](const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
    out = v.get<int>();
  };
}

Handler boolean(bool& out) {
  return [&out](const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
    out = v.get<bool>();
  };
}

Handler motor(MotorParams& m) {
  return [&m](const json& v, const std::string& path) {
    visit(v, path,
          {{"torque_constant", number(m.torque_constant)},
           {"resistance", number(m.resistance)},
           {"inertia", number(m.inertia)},
           {"damping", number(m.damping)},
           {"current_limit", number(m.current_limit)},
           {"voltage_limit", number(m.voltage_limit)},
           {"speed_limit", number(m.speed_limit)}});
  };
}

Handler port(PortImpedance& p) {
  return [&p](const json& v, const std::string& path) {
    visit(v, path, {{"inertia", number(p.inertia)}, {"damping", number(p.damping)}});
  };
}

json to_json(const MotorParams& m) {
  return {{"torque_constant", m.torque_constant}, {"resistance", m.resistance},
          {"inertia", m.inertia},                 {"damping", m.damping},
          {"current_limit", m.current_limit},     {"voltage_limit", m.voltage_limit},
          {"speed_limit", m.speed_limit}};
}

json to_json(const PortImpedance& p) { return {{"inertia", p.inertia}, {"damping", p.damping}}; }

}  // namespace

void validate(const Setup& setup) {
  validate(setup.plant);
  const auto& c = setup.controller;
  if (!(setup.plant_dt > 0.0)) throw ConfigError("plant_dt must be > 0");
  if (setup.sensors.encoder_counts < 0) throw ConfigError("sensors.encoder_counts must be >= 0");
  if (c.inner_per_outer < 1) throw ConfigError("controller.inner_per_outer must be >= 1");
  if (std::abs(c.outer_period - setup.plant_dt * c.inner_per_outer) > 1e-9 * c.outer_period) {
    throw ConfigError("controller.outer_period must equal plant_dt * inner_per_outer");
  }
  if (c.hf_pi.kp < 0.0 || c.hf_pi.ki < 0.0 || c.hf_pi.kv < 0.0 || c.hf_pi.windup_limit < 0.0) {
    throw ConfigError("controller.hf_pi: gains must be >= 0");
  }
  if (c.hs_impedance.stiffness < 0.0 || c.hs_impedance.damping < 0.0) {
    throw ConfigError("controller.hs_impedance: stiffness and damping must be >= 0");
  }
  if (!(c.braking_gain > 0.0)) throw ConfigError("controller.braking_gain must be > 0");
  if (c.m2_unload_gain < 0.0) throw ConfigError("controller.m2_unload_gain must be >= 0");
  if (!(c.max_shift_time > 0.0)) throw ConfigError("controller.max_shift_time must be > 0");
  if (c.friction_comp_fraction < 0.0 || c.friction_comp_fraction > 1.0) {
    throw ConfigError("controller.friction_comp_fraction must be in [0, 1]");
  }
  if (c.handoff_decay < 0.0) throw ConfigError("controller.handoff_decay must be >= 0");
  const auto& s = c.selector;
  if (!(s.stall_speed_fraction > 0.0) || !(s.upshift_capacity_fraction >= 0.0) ||
      !(s.upshift_error >= 0.0) || !(s.dwell >= 0.0)) {
    throw ConfigError("controller.selector: thresholds must be positive");
  }
}

Setup parse_setup(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Setup setup;
  ActuatorConfig& p = setup.plant;
  ControllerSettings& c = setup.controller;
  double ring_sun = p.junction.ring_sun_ratio();
  double m2_reduction = p.junction.m2_reduction();
  std::optional<double> stored_m1;
  std::optional<double> stored_m2;

  visit(root, "",
        {{"junction",
          [&](const json& v, const std::string& path) {
            visit(v, path,
                  {{"ring_sun_ratio", number(ring_sun)},
                   {"m2_reduction", number(m2_reduction)},
                   {"m1_ratio", [&](const json& x, const std::string& q) {
                      double r = 0;
                      number(r)(x, q);
                      stored_m1 = r;
                    }},
                   {"m2_ratio", [&](const json& x, const std::string& q) {
                      double r = 0;
                      number(r)(x, q);
                      stored_m2 = r;
                    }}});
          }},
         {"motor1", motor(p.m1)},
         {"motor2", motor(p.m2)},
         {"ports",
          [&](const json& v, const std::string& path) {
            visit(v, path,
                  {{"output", port(p.ports.output)}, {"m1", port(p.ports.m1)}, {"m2", port(p.ports.m2)}});
          }},
         {"output_train",
          [&](const json& v, const std::string& path) {
            visit(v, path, {{"lead", number(p.train.lead)}, {"coulomb", number(p.train.coulomb)}});
          }},
         {"brake_engage_speed", number(p.brake_engage_speed)},
         {"plant_dt", number(setup.plant_dt)},
         {"sensors",
          [&](const json& v, const std::string& path) {
            visit(v, path, {{"encoder_counts", integer(setup.sensors.encoder_counts)}});
          }},
         {"controller", [&](const json& v, const std::string& path) {
            visit(v, path,
                  {{"hf_pi",
                    [&](const json& x, const std::string& q) {
                      visit(x, q,
                            {{"kp", number(c.hf_pi.kp)},
                             {"ki", number(c.hf_pi.ki)},
                             {"kv", number(c.hf_pi.kv)},
                             {"windup_limit", number(c.hf_pi.windup_limit)}});
                    }},
                   {"hs_impedance",
                    [&](const json& x, const std::string& q) {
                      visit(x, q,
                            {{"stiffness", number(c.hs_impedance.stiffness)},
                             {"damping", number(c.hs_impedance.damping)}});
                    }},
                   {"braking_gain", number(c.braking_gain)},
                   {"m2_unload_gain", number(c.m2_unload_gain)},
                   {"max_shift_time", number(c.max_shift_time)},
                   {"friction_comp_fraction", number(c.friction_comp_fraction)},
                   {"handoff_decay", number(c.handoff_decay)},
                   {"seed_handoff", boolean(c.seed_handoff)},
                   {"outer_period", number(c.outer_period)},
                   {"inner_per_outer", integer(c.inner_per_outer)},
                   {"selector", [&](const json& x, const std::string& q) {
                      visit(x, q,
                            {{"stall_speed_fraction", number(c.selector.stall_speed_fraction)},
                             {"upshift_capacity_fraction", number(c.selector.upshift_capacity_fraction)},
                             {"upshift_error", number(c.selector.upshift_error)},
                             {"dwell", number(c.selector.dwell)}});
                    }}});
          }}});

  JunctionGeometry g(ring_sun, m2_reduction);
  if (stored_m1 || stored_m2) {
    g = JunctionGeometry::from_stored(ring_sun, m2_reduction, stored_m1.value_or(g.m1_ratio()),
                                      stored_m2.value_or(g.m2_ratio()));
  }
  p.junction = g;
  validate(setup);
  return setup;
}

Setup load_setup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_setup(text.str());
}

std::string dump_setup(const Setup& setup) {
  const auto& p = setup.plant;
  const auto& c = setup.controller;
  json j = {
      {"junction",
       {{"ring_sun_ratio", p.junction.ring_sun_ratio()},
        {"m2_reduction", p.junction.m2_reduction()},
        {"m1_ratio", p.junction.m1_ratio()},
        {"m2_ratio", p.junction.m2_ratio()}}},
      {"motor1", to_json(p.m1)},
      {"motor2", to_json(p.m2)},
      {"ports",
       {{"output", to_json(p.ports.output)}, {"m1", to_json(p.ports.m1)}, {"m2", to_json(p.ports.m2)}}},
      {"output_train", {{"lead", p.train.lead}, {"coulomb", p.train.coulomb}}},
      {"brake_engage_speed", p.brake_engage_speed},
      {"plant_dt", setup.plant_dt},
      {"sensors", {{"encoder_counts", setup.sensors.encoder_counts}}},
      {"controller",
       {{"hf_pi",
         {{"kp", c.hf_pi.kp}, {"ki", c.hf_pi.ki}, {"kv", c.hf_pi.kv}, {"windup_limit", c.hf_pi.windup_limit}}},
        {"hs_impedance", {{"stiffness", c.hs_impedance.stiffness}, {"damping", c.hs_impedance.damping}}},
        {"braking_gain", c.braking_gain},
        {"m2_unload_gain", c.m2_unload_gain},
        {"max_shift_time", c.max_shift_time},
        {"friction_comp_fraction", c.friction_comp_fraction},
        {"handoff_decay", c.handoff_decay},
        {"seed_handoff", c.seed_handoff},
        {"outer_period", c.outer_period},
        {"inner_per_outer", c.inner_per_outer},
        {"selector",
         {{"stall_speed_fraction", c.selector.stall_speed_fraction},
          {"upshift_capacity_fraction", c.selector.upshift_capacity_fraction},
          {"upshift_error", c.selector.upshift_error},
          {"dwell", c.selector.dwell}}}}},
  };
  return j.dump(2) + "\n";
}

Setup resolve_setup(const std::optional<std::string>& explicit_path) {
  if (explicit_path) return load_setup(*explicit_path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
    return load_setup(env);
  }
  Setup setup;
  validate(setup);
  return setup;
}

}  // namespace dsdm
