#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dsdm/acceptance.hpp"
#include "dsdm/config.hpp"
#include "dsdm/scenario.hpp"
#include "dsdm/sizing.hpp"
#include "dsdm/trace.hpp"

namespace {

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--lambda-range", "expected A:B");
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw CLI::ValidationError("--lambda-range", "not a number: '" + std::string(s) + "'");
    }
    return v;
  };
  const std::string_view all(text);
  return {number(all.substr(0, colon)), number(all.substr(colon + 1))};
}

std::string fmt(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-speed dual-motor actuator simulator"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path,
                    std::string("JSON setup file (default: $") + dsdm::kConfigEnvVar +
                        ", else the built-in prototype)");
  };

  auto* run = app.add_subcommand("run", "Run a built-in scenario and write its trace as CSV");
  std::string scenario;
  std::optional<std::string> out_path;
  run->add_option("scenario", scenario, "Scenario name (see `dsdm list`)")->required();
  run->add_option("--out", out_path, "Output CSV path (default: stdout)");
  add_config(run);

  auto* list = app.add_subcommand("list", "List the built-in scenarios");

  auto* size = app.add_subcommand("size", "Weight comparison table for equal-power points, CSV");
  double power = 10.0;
  std::string lambda_range = "1:20";
  int steps = 40;
  double w_high = 100.0;
  dsdm::MassModel mm;
  size->add_option("--power", power, "Power of both operating points, W")->required();
  size->add_option("--lambda-range", lambda_range, "Speed ratio range A:B")->required();
  size->add_option("--steps", steps, "Number of log-spaced rows")->capture_default_str();
  size->add_option("--w-high", w_high, "Output speed of the fast point, rad/s")
      ->capture_default_str();
  size->add_option("--motor-density", mm.motor_density, "kg per N·m")->capture_default_str();
  size->add_option("--gearbox-density", mm.gearbox_density, "kg per N·m")->capture_default_str();
  size->add_option("--brake-density", mm.brake_density, "kg per N·m")->capture_default_str();
  size->add_option("--motor-speed-limit", mm.motor_speed_limit, "rad/s")->capture_default_str();

  auto* config = app.add_subcommand("config", "Print the resolved setup as JSON");
  add_config(config);

  auto* check = app.add_subcommand("check", "Run the acceptance suite");
  unsigned workers = 0;
  check->add_option("--jobs,-j", workers, "Worker threads for scenarios (0 = all cores)");
  add_config(check);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      const dsdm::Setup setup;
      for (const auto& name : dsdm::scenario_names()) {
        std::cout << name << "  " << dsdm::make_scenario(name, setup).description << '\n';
      }
      return 0;
    }

    if (*size) {
      const auto [lo, hi] = parse_range(lambda_range);
      const auto rows = dsdm::sizing_sweep(power, w_high, lo, hi, steps, mm);
      std::cout << "lambda,single_motor_kg,dsdm_kg\n";
      for (const auto& r : rows) {
        std::cout << fmt(r.lambda) << ',' << fmt(r.single_mass) << ',' << fmt(r.dsdm_mass) << '\n';
      }
      return 0;
    }

    const dsdm::Setup setup = dsdm::resolve_setup(config_path);

    if (*config) {
      std::cout << dsdm::dump_setup(setup) << '\n';
      return 0;
    }

    if (*run) {
      const auto result = dsdm::run_scenario(dsdm::make_scenario(scenario, setup));
      if (out_path) {
        std::ofstream out(*out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + *out_path + " for writing");
        dsdm::write_trace_csv(out, result.trace);
      } else {
        dsdm::write_trace_csv(std::cout, result.trace);
      }
      for (const auto& f : result.faults) std::cerr << "fault: " << f << '\n';
      return result.faults.empty() ? 0 : 2;
    }

    if (*check) {
      bool ok = true;
      for (const auto& r : dsdm::run_acceptance(setup, workers)) {
        std::cout << dsdm::format_result(r) << '\n';
        ok = ok && r.passed;
      }
      std::cout << (ok ? "all criteria passed" : "FAILED") << '\n';
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "dsdm: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
