#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "dsdm/acceptance.hpp"
#include "dsdm/config.hpp"
#include "dsdm/scenario.hpp"
#include "dsdm/sizing.hpp"
#include "dsdm/trace.hpp"

namespace py = pybind11;
using namespace dsdm;

namespace {

Setup setup_from(const std::optional<std::string>& config_json) {
  return config_json ? parse_setup(*config_json) : Setup{};
}

py::dict run(const std::string& name, const std::optional<std::string>& config_json) {
  RunResult r;
  {
    const Scenario s = make_scenario(name, setup_from(config_json));
    py::gil_scoped_release release;
    r = run_scenario(s);
  }
  py::dict cols;
  auto column = [&](const char* key, auto field) {
    py::list values;
    for (const auto& rec : r.trace) values.append(field(rec));
    cols[key] = values;
  };
  column("t", [](const TraceRecord& x) { return x.t; });
  column("x_o", [](const TraceRecord& x) { return x.x_o; });
  column("v_o", [](const TraceRecord& x) { return x.v_o; });
  column("w1", [](const TraceRecord& x) { return x.w1; });
  column("w2", [](const TraceRecord& x) { return x.w2; });
  column("i1", [](const TraceRecord& x) { return x.i1; });
  column("i2", [](const TraceRecord& x) { return x.i2; });
  column("mode", [](const TraceRecord& x) { return std::string(to_string(x.mode)); });
  column("brake", [](const TraceRecord& x) { return std::string(to_string(x.brake)); });
  column("tau_o_est", [](const TraceRecord& x) { return x.tau_o_est; });

  py::list shifts;
  for (const auto& e : r.shifts) {
    shifts.append(py::make_tuple(e.t, to_string(e.from), to_string(e.to), e.w1));
  }
  py::dict out;
  out["scenario"] = r.scenario;
  out["trace"] = cols;
  out["shifts"] = shifts;
  out["faults"] = r.faults;
  return out;
}

}  // namespace

PYBIND11_MODULE(_dsdm, m) {
  m.doc() = "Dual-speed dual-motor actuator simulator";

  m.def("scenario_names", &scenario_names);
  m.def("describe", [](const std::string& name) { return make_scenario(name, Setup{}).description; });
  m.def("run_scenario", &run, py::arg("name"), py::arg("config_json") = py::none(),
        "Run a built-in scenario; returns the trace as columns plus mode changes and faults.");
  m.def(
      "trace_csv",
      [](const std::string& name, const std::optional<std::string>& config_json) {
        const Scenario s = make_scenario(name, setup_from(config_json));
        py::gil_scoped_release release;
        return trace_csv(run_scenario(s).trace);
      },
      py::arg("name"), py::arg("config_json") = py::none());

  m.def(
      "check",
      [](const std::optional<std::string>& config_json, unsigned workers) {
        const Setup setup = setup_from(config_json);
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance(setup, workers);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["title"] = r.title;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("config_json") = py::none(), py::arg("workers") = 0);

  m.def("default_config", [] { return dump_setup(Setup{}); });
  m.def("normalize_config", [](const std::string& text) { return dump_setup(parse_setup(text)); });

  m.def(
      "output_speed",
      [](double w1, double w2, double n, double r2) {
        return output_speed(w1, w2, JunctionGeometry(n, r2));
      },
      py::arg("w1"), py::arg("w2"), py::arg("ring_sun_ratio") = 3.0, py::arg("m2_reduction") = 54.0);
  m.def(
      "torque_split",
      [](double tau_o, double n, double r2) {
        const PortTorques t = torque_split(tau_o, JunctionGeometry(n, r2));
        return py::make_tuple(t.m1, t.m2);
      },
      py::arg("tau_o"), py::arg("ring_sun_ratio") = 3.0, py::arg("m2_reduction") = 54.0);
  m.def(
      "reflected_output_mass",
      [](const std::string& mode, const std::optional<std::string>& config_json) {
        GearMode g;
        if (mode == "high_force") g = GearMode::HighForce;
        else if (mode == "high_speed") g = GearMode::HighSpeed;
        else throw py::value_error("mode must be 'high_force' or 'high_speed'");
        return reflected_output_mass(setup_from(config_json).plant, g);
      },
      py::arg("mode"), py::arg("config_json") = py::none());
  m.def(
      "winding_loss",
      [](double tau_out, double ratio, const std::optional<std::string>& config_json) {
        return winding_loss(tau_out, ratio, setup_from(config_json).plant.m1);
      },
      py::arg("tau_out"), py::arg("ratio"), py::arg("config_json") = py::none());

  py::class_<MassModel>(m, "MassModel")
      .def(py::init<>())
      .def_readwrite("motor_density", &MassModel::motor_density)
      .def_readwrite("gearbox_density", &MassModel::gearbox_density)
      .def_readwrite("brake_density", &MassModel::brake_density)
      .def_readwrite("motor_speed_limit", &MassModel::motor_speed_limit);

  m.def(
      "sizing_sweep",
      [](double power, double lo, double hi, int steps, double w_high, const MassModel& mm) {
        py::list out;
        for (const auto& r : sizing_sweep(power, w_high, lo, hi, steps, mm)) {
          out.append(py::make_tuple(r.lambda, r.single_mass, r.dsdm_mass));
        }
        return out;
      },
      py::arg("power"), py::arg("lambda_lo"), py::arg("lambda_hi"), py::arg("steps") = 40,
      py::arg("w_high") = 100.0, py::arg("mass_model") = MassModel{});
  m.def(
      "sizing_crossover",
      [](double power, double lo, double hi, double w_high, const MassModel& mm) {
        return sizing_crossover(power, w_high, lo, hi, mm);
      },
      py::arg("power"), py::arg("lambda_lo") = 1.0, py::arg("lambda_hi") = 10.0,
      py::arg("w_high") = 100.0, py::arg("mass_model") = MassModel{});

  py::register_exception<SimulationFault>(m, "SimulationFault", PyExc_RuntimeError);
}
