#include "dsdm/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "dsdm/dynamics.hpp"
#include "dsdm/scenario.hpp"
#include "dsdm/sizing.hpp"
#include "dsdm/trace.hpp"

namespace dsdm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(gen_); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  ActuatorConfig config() {
    ActuatorConfig cfg = prototype_config();
    const double n = uniform(1.2, 8.0);
    cfg.junction = JunctionGeometry(n, uniform(n + 0.5, 150.0));
    cfg.m1.torque_constant = log_uniform(0.005, 0.2);
    cfg.m2.torque_constant = log_uniform(0.005, 0.2);
    cfg.ports.output = {log_uniform(1e-7, 1e-3), log_uniform(1e-6, 1e-2)};
    cfg.ports.m1 = {log_uniform(1e-8, 1e-4), log_uniform(1e-9, 1e-5)};
    cfg.ports.m2 = {log_uniform(1e-8, 1e-4), log_uniform(1e-9, 1e-5)};
    return cfg;
  }

 private:
  std::mt19937_64 gen_;
};

CriterionResult make(const std::string& id, const std::string& title) {
  CriterionResult r;
  r.id = id;
  r.title = title;
  return r;
}

// 1 ---------------------------------------------------------------------------

CriterionResult junction_power() {
  auto r = make("1", "junction power conservation");
  const auto t0 = Clock::now();
  Sampler rng(1);
  constexpr int kSamples = 10000;
  double worst = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double n = rng.uniform(1.2, 10.0);
    const JunctionGeometry g(n, rng.uniform(0.5, 200.0));
    const double w1 = rng.uniform(-2000.0, 2000.0);
    const double w2 = rng.uniform(-2000.0, 2000.0);
    const double tau_o = rng.uniform(-20.0, 20.0);
    const double w_o = output_speed(w1, w2, g);
    const PortTorques t = torque_split(tau_o, g);
    const double residual = t.m1 * w1 + t.m2 * w2 + tau_o * w_o;
    const double scale = std::abs(t.m1 * w1) + std::abs(t.m2 * w2) + std::abs(tau_o * w_o);
    if (scale > 0.0) worst = std::max(worst, std::abs(residual) / scale);
  }
  const double elapsed = seconds_since(t0);
  r.passed = worst < 1e-12 && elapsed < 1.0;
  r.detail = "worst relative residual " + num(worst) + " over " + std::to_string(kSamples) +
             " samples in " + num(elapsed) + " s";
  return r;
}

// 2 ---------------------------------------------------------------------------

double nullspace_algebraic_worst() {
  Sampler rng(2);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ActuatorConfig cfg = rng.config();
    const DerivedDynamics d = derive_dynamics(cfg);
    const NullspaceProjector proj(cfg);
    const auto& n = proj.dynamic();
    const double a = d.input[0][0] * n[0];
    const double b = d.input[0][1] * n[1];
    worst = std::max(worst, std::abs(a + b) / (std::abs(a) + std::abs(b)));
  }
  return worst;
}

/// Output speed deviation caused by adding a nullspace signal on top of an
/// ordinary drive, relative to the peak output speed.
double nullspace_simulated_ratio(const ActuatorConfig& cfg) {
  const NullspaceProjector proj(cfg);
  const LoadModel load;
  const double dt = 50e-6;
  const int substeps = stable_substeps(cfg, load, BrakeState::Free, dt);
  PlantState plain;
  PlantState injected;
  double peak = 0.0;
  double deviation = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double t = k * dt;
    const MotorCurrents drive{0.3 * std::sin(kTwoPi * 3.0 * t), 0.0};
    const double u = 400.0 * std::sin(kTwoPi * 7.0 * t);
    const MotorCurrents extra = hs_inner_allocation(0.0, 0.0, u, proj);
    plain = advance(plain, drive, load, cfg, dt, substeps);
    injected = advance(injected, {drive.i1 + extra.i1, drive.i2 + extra.i2}, load, cfg, dt,
                       substeps);
    peak = std::max(peak, std::abs(plain.w_o));
    deviation = std::max(deviation, std::abs(injected.w_o - plain.w_o));
  }
  return deviation / peak;
}

CriterionResult nullspace(const Setup& setup) {
  auto r = make("2", "nullspace exactness");
  const double algebraic = nullspace_algebraic_worst();
  const double simulated = nullspace_simulated_ratio(setup.plant);
  const double eps = std::numeric_limits<double>::epsilon();
  r.passed = algebraic < 16.0 * eps && simulated < 1e-9;
  r.detail = "algebraic worst " + num(algebraic) + " (1000 configs), simulated |dw_o|/max|w_o| " +
             num(simulated) + " over 1 s";
  return r;
}

// 3 ---------------------------------------------------------------------------

/// Reference two-state model with input-port damping and external torque
/// dropped, evaluated from its closed-form coefficients.
Acceleration reduced_state_space(const ActuatorConfig& cfg, double w_o, MotorCurrents i) {
  const double r1 = cfg.junction.m1_ratio();
  const double r2 = cfg.junction.m2_ratio();
  const double jo = cfg.ports.output.inertia;
  const double j1 = cfg.ports.m1.inertia;
  const double j2 = cfg.ports.m2.inertia;
  const double bo = cfg.ports.output.damping;
  const double k1 = cfg.m1.torque_constant;
  const double k2 = cfg.m2.torque_constant;
  const double q = (r1 / r2) * (r1 / r2) * (j1 / j2);
  const double jt = jo + r1 * r1 * j1 + q * jo;
  const double bt = bo + q * bo;
  const double b00 = k1 * r1 / jt;
  const double b01 = k2 * r1 * (r1 * j1 / (r2 * j2)) / jt;
  const double b10 = k1 * (r1 * r1 + r1 * r1 * jo / (r2 * r2 * j2)) / jt;
  const double b11 = -k2 * (r1 * jo / (r2 * j2)) / jt;
  return {-bt * w_o / jt + b00 * i.i1 + b01 * i.i2, -r1 * bo * w_o / jt + b10 * i.i1 + b11 * i.i2};
}

CriterionResult model_equivalence() {
  auto r = make("3", "coupled model reduces to the state-space form");
  Sampler rng(3);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    ActuatorConfig cfg = rng.config();
    cfg.ports.m1.damping = 0.0;
    cfg.ports.m2.damping = 0.0;
    cfg.train.coulomb = 0.0;
    PlantState s;
    s.w_o = rng.uniform(-50.0, 50.0);
    s.w1 = rng.uniform(-500.0, 500.0);
    s.theta_o = rng.uniform(-10.0, 10.0);
    const MotorCurrents i{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const Acceleration full = accel_free(s, i, LoadModel{}, cfg);
    const Acceleration ref = reduced_state_space(cfg, s.w_o, i);
    for (auto [a, b] : {std::pair{full.w_o, ref.w_o}, std::pair{full.w1, ref.w1}}) {
      const double scale = std::max(std::abs(b), 1e-300);
      worst = std::max(worst, std::abs(a - b) / scale);
    }
  }
  r.passed = worst < 1e-10;
  r.detail = "worst relative error " + num(worst) + " over 1000 random evaluations";
  return r;
}

// 4 ---------------------------------------------------------------------------

CriterionResult winding_scaling(const Setup& setup) {
  auto r = make("4", "winding loss scales with the square of the ratio");
  Sampler rng(4);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double tau = rng.uniform(0.01, 10.0);
    const double ratio = rng.log_uniform(1.0, 500.0);
    const double lambda = rng.log_uniform(1.0, 100.0);
    const double q = winding_loss(tau, ratio, setup.plant.m1) /
                     winding_loss(tau, lambda * ratio, setup.plant.m1);
    worst = std::max(worst, std::abs(q - lambda * lambda) / (lambda * lambda));
  }
  const JunctionGeometry& g = setup.plant.junction;
  const double tau = 0.1;
  const double proto = winding_loss(tau, g.m1_ratio(), setup.plant.m1) /
                       winding_loss(tau, g.m2_ratio(), setup.plant.m1);
  const double expect = std::pow(g.m2_ratio() / g.m1_ratio(), 2);
  r.passed = worst < 1e-12 && std::abs(proto - expect) < 1e-9 * expect;
  r.detail = "worst relative error " + num(worst) + "; loss(R1)/loss(R2) = " + num(proto) +
             " (ratio " + num(g.m2_ratio() / g.m1_ratio()) + ")";
  return r;
}

// Scenario runs ---------------------------------------------------------------

struct Job {
  Scenario scenario;
  RunResult result{};
  std::string csv{};
  std::string error{};
  double seconds = 0.0;
};

void run_jobs(std::vector<Job>& jobs, unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      Job& job = jobs[k];
      const auto t0 = Clock::now();
      try {
        job.result = run_scenario(job.scenario);
        job.csv = trace_csv(job.result.trace);
      } catch (const std::exception& e) {
        job.error = e.what();
      }
      job.seconds = seconds_since(t0);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

/// Common failure reasons for a scenario run; empty when it ran cleanly.
std::string run_problems(const Job& job) {
  if (!job.error.empty()) return "run failed: " + job.error;
  const auto& trace = job.result.trace;
  if (trace.empty()) return "empty trace";
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (!(trace[k].t > trace[k - 1].t)) return "trace time not monotone";
  }
  if (trace.back().t > job.scenario.duration + 1e-9) return "ran past its duration";
  if (!job.result.faults.empty()) return "fault: " + job.result.faults.front();
  return {};
}

double error_at_end(const Job& job, double target) {
  return std::abs(job.result.trace.back().x_o - target);
}

// 5 ---------------------------------------------------------------------------

CriterionResult hf_step(const Job& job) {
  auto r = make("5", "high-force step, 200 mm");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const ActuatorConfig& cfg = job.scenario.setup.plant;
  const auto& trace = job.result.trace;
  const double target = job.scenario.reference(job.scenario.duration).x;

  // Top speed: M2 at its back-EMF limit through the locked reduction.
  const double w2_top = std::min(cfg.m2.voltage_limit / cfg.m2.torque_constant, cfg.m2.speed_limit);
  const double v_top = cfg.train.to_linear(w2_top / cfg.junction.m2_ratio());
  double v_peak = 0.0;
  int moving = 0;
  int plateau = 0;
  for (const auto& rec : trace) {
    if (rec.t >= 5.0) break;
    v_peak = std::max(v_peak, rec.v_o);
    if (std::abs(rec.x_o - target) > 0.005) {
      ++moving;
      if (rec.v_o > 0.9 * v_top) ++plateau;
    }
  }
  const double plateau_share = moving > 0 ? static_cast<double>(plateau) / moving : 0.0;

  double pulse_deflection = 0.0;
  double settled = 0.0;
  for (const auto& rec : trace) {
    if (rec.t >= 5.0 && rec.t < 7.0) {
      pulse_deflection = std::max(pulse_deflection, std::abs(rec.x_o - target));
    }
    if (rec.t >= job.scenario.duration - 1.0) {
      settled = std::max(settled, std::abs(rec.x_o - target));
    }
  }
  const double final_error = error_at_end(job, target);
  r.passed = final_error < 1e-6 && settled < 1e-6 && pulse_deflection > 1e-6 &&
             plateau_share > 0.8 && v_peak < 1.05 * v_top && job.seconds < 10.0;
  r.detail = "final error " + num(final_error * 1e6) + " um, worst over last 1 s " +
             num(settled * 1e6) + " um, pulse deflection " + num(pulse_deflection * 1e3) +
             " mm, peak speed " + num(v_peak * 1e3) + " mm/s (limit " + num(v_top * 1e3) +
             ", " + num(plateau_share * 100) + "% of travel at plateau), runtime " +
             num(job.seconds) + " s";
  return r;
}

// 6 ---------------------------------------------------------------------------

CriterionResult hs_step(const Job& job) {
  auto r = make("6", "high-speed step, 200 mm, pure stiffness");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const double target = job.scenario.reference(job.scenario.duration).x;
  double v_peak = 0.0;
  double x_peak = 0.0;
  for (const auto& rec : job.result.trace) {
    v_peak = std::max(v_peak, rec.v_o);
    x_peak = std::max(x_peak, rec.x_o);
  }
  const double overshoot = (x_peak - target) / target;
  const double final_error = error_at_end(job, target);
  const bool pure_stiffness = job.scenario.setup.controller.hs_impedance.damping == 0.0;
  r.passed = pure_stiffness && v_peak >= 0.3 && final_error < 1e-3 && overshoot > 0.0 &&
             overshoot < 0.1;
  r.detail = "peak speed " + num(v_peak) + " m/s, final error " + num(final_error * 1e3) +
             " mm, overshoot " + num(overshoot * 100) + "% of the step";
  return r;
}

// 7 ---------------------------------------------------------------------------

CriterionResult seamless_shift(const Job& job) {
  auto r = make("7", "constant-speed shift HF -> HS -> HF");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const Scenario& s = job.scenario;
  const double v_cmd = s.reference(s.duration).v;
  double first = s.duration;
  double last = 0.0;
  for (const auto& m : s.mode_requests) {
    first = std::min(first, m.time);
    last = std::max(last, m.time);
  }
  // Window: from well before the first switch to the end of the run.
  const double from = std::max(0.0, first - 0.5);
  double worst = 0.0;
  for (const auto& rec : job.result.trace) {
    if (rec.t < from) continue;
    worst = std::max(worst, std::abs(rec.v_o - v_cmd) / v_cmd);
  }
  double worst_w1 = 0.0;
  for (const auto& e : job.result.engagements) worst_w1 = std::max(worst_w1, std::abs(e.w1));

  bool released = false;
  bool relocked = false;
  for (const auto& e : job.result.shifts) {
    if (e.from == Mode::HighForce && e.to == Mode::HighSpeed) released = true;
    if (e.from == Mode::ShiftingToHF && e.to == Mode::HighForce && e.t >= last) relocked = true;
  }
  const double limit = s.setup.plant.brake_engage_speed;
  r.passed = released && relocked && worst <= 0.05 && worst_w1 < limit &&
             job.result.engagements.size() == 1;
  r.detail = "worst speed deviation " + num(worst * 100) + "% of " + num(v_cmd * 1e3) +
             " mm/s from t=" + num(from) + " s, brake engaged at |w1| " + num(worst_w1) +
             " rad/s (limit " + num(limit) + "), " + std::to_string(job.result.shifts.size()) +
             " mode changes";
  return r;
}

// 8 ---------------------------------------------------------------------------

Scenario braking_scenario(const Setup& setup) {
  Scenario s;
  s.name = "braking-decay";
  s.description = "M1 spinning at 20 rad/s with the output at rest, shift to high-force";
  s.setup = setup;
  s.initial_mode = Mode::HighSpeed;
  s.initial_state.w1 = 20.0;
  s.reference = step_reference(0.0, 0.0, 0.0);
  s.mode_requests = {{0.0, Mode::HighForce}};
  s.duration = 0.6;
  return s;
}

CriterionResult braking_law(const Job& job) {
  auto r = make("8", "nullspace braking law");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const ActuatorConfig& cfg = job.scenario.setup.plant;
  const double gain = job.scenario.setup.controller.braking_gain;

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int n = 0;
  bool saturated = false;
  for (const auto& rec : job.result.trace) {
    if (rec.mode != Mode::ShiftingToHF) continue;
    saturated = saturated || std::abs(rec.i1) >= 0.999 * cfg.m1.current_limit ||
                std::abs(rec.i2) >= 0.999 * cfg.m2.current_limit;
    if (std::abs(rec.w1) <= cfg.brake_engage_speed) continue;
    const double y = std::log(std::abs(rec.w1));
    st += rec.t;
    sy += y;
    stt += rec.t * rec.t;
    sty += rec.t * y;
    ++n;
  }
  double rate = 0.0;
  if (n >= 3) rate = -(n * sty - st * sy) / (n * stt - st * st);

  double start = -1.0;
  double end = -1.0;
  for (const auto& e : job.result.shifts) {
    if (e.to == Mode::ShiftingToHF && start < 0.0) start = e.t;
    if (e.from == Mode::ShiftingToHF && e.to == Mode::HighForce) end = e.t;
  }
  const double duration = end >= 0.0 && start >= 0.0 ? end - start : -1.0;
  r.passed = n >= 3 && !saturated && std::abs(rate - gain) <= 0.05 * gain && duration >= 0.0 &&
             duration < 0.5;
  r.detail = "fitted decay " + num(rate) + " 1/s vs C = " + num(gain) + " (" + std::to_string(n) +
             " samples" + (saturated ? ", saturated" : "") + "), shift took " +
             (duration >= 0.0 ? num(duration) + " s" : std::string("forever"));
  return r;
}

// 9 ---------------------------------------------------------------------------

CriterionResult auto_downshift(const Job& job) {
  auto r = make("9", "automatic downshift against a spring");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const Scenario& s = job.scenario;
  const ActuatorConfig& cfg = s.setup.plant;
  const double target = s.reference(s.duration).x;
  const double wall = s.load.wall.value_or(0.0);
  const double spring_force = s.load.stiffness * (target - wall);
  const double hs_capacity = cfg.train.torque_to_force(
      cfg.m1.torque_constant * cfg.junction.m1_ratio() * cfg.m1.current_limit);
  const double hf_capacity = cfg.train.torque_to_force(
      cfg.m2.torque_constant * cfg.junction.m2_ratio() * cfg.m2.current_limit);

  int downshifts = 0;
  bool after_contact = true;
  for (const auto& e : job.result.shifts) {
    if (e.from == Mode::ShiftingToHF && e.to == Mode::HighForce) ++downshifts;
    if (e.to == Mode::ShiftingToHF) {
      const auto it = std::lower_bound(
          job.result.trace.begin(), job.result.trace.end(), e.t,
          [](const TraceRecord& rec, double t) { return rec.t < t; });
      if (it == job.result.trace.end() || it->x_o < wall) after_contact = false;
    }
  }
  const double final_error = error_at_end(job, target);
  const bool ends_hf = job.result.trace.back().mode == Mode::HighForce;
  r.passed = spring_force > 30.0 && spring_force < 600.0 && spring_force > hs_capacity &&
             spring_force < hf_capacity && downshifts == 1 && after_contact && ends_hf &&
             final_error < 1e-4;
  r.detail = "spring force at target " + num(spring_force) + " N (HS capacity " +
             num(hs_capacity) + " N, HF " + num(hf_capacity) + " N), " +
             std::to_string(downshifts) + " downshift(s)" +
             (after_contact ? ", after contact" : ", before contact") + ", final error " +
             num(final_error * 1e6) + " um";
  return r;
}

// 10 --------------------------------------------------------------------------

CriterionResult sizing_check() {
  auto r = make("10", "sizing crossover");
  const MassModel mm;
  const double power = 10.0;
  const double fast = 100.0;
  const auto cross = sizing_crossover(power, fast, 1.0, 10.0, mm);
  bool beyond = cross.has_value();
  if (cross) {
    for (const auto& row : sizing_sweep(power, fast, *cross * (1.0 + 1e-9), 1000.0, 400, mm)) {
      beyond = beyond && row.dsdm_mass < row.single_mass;
    }
  }
  const auto five = equal_power_points(power, fast, 5.0);
  const double single5 = single_motor_mass(five, mm);
  const double dsdm5 = dsdm_mass(five, mm);
  r.passed = cross && *cross >= 1.0 && *cross <= 10.0 && beyond && dsdm5 < single5;
  r.detail = "crossover at lambda " + (cross ? num(*cross) : std::string("none")) +
             (beyond ? ", dual-motor lighter beyond it" : ", not lighter everywhere beyond") +
             "; lambda 5: single " + num(single5) + " kg, dual " + num(dsdm5) + " kg";
  return r;
}

// 11 --------------------------------------------------------------------------

PlantState integrate(const ActuatorConfig& cfg, const LoadModel& load, double h, double t_end) {
  PlantState s;
  s.w_o = 2.0;
  s.w1 = -5.0;
  const auto n = static_cast<long>(std::llround(t_end / h));
  for (long k = 0; k < n; ++k) s = step(s, {0.2, 0.05}, load, cfg, h);
  return s;
}

double state_distance(const PlantState& a, const PlantState& b) {
  return std::hypot(a.w_o - b.w_o, a.w1 - b.w1, std::hypot(a.theta_o - b.theta_o, a.theta1 - b.theta1));
}

CriterionResult integrator_order(const Setup& setup) {
  auto r = make("11", "RK4 convergence order");
  ActuatorConfig cfg = setup.plant;
  cfg.train.coulomb = 0.0;
  LoadModel load;
  load.stiffness = 0.01;
  load.external = [](double t) { return 0.002 * std::sin(5.0 * t); };
  const double t_end = 1.0;
  const double h = 1e-2;
  const PlantState ref = integrate(cfg, load, h / 64.0, t_end);
  const double e1 = state_distance(integrate(cfg, load, h, t_end), ref);
  const double e2 = state_distance(integrate(cfg, load, h / 2.0, t_end), ref);
  const double e3 = state_distance(integrate(cfg, load, h / 4.0, t_end), ref);
  const double f1 = e1 / e2;
  const double f2 = e2 / e3;
  r.passed = f1 >= 12.0 && f1 <= 20.0 && f2 >= 12.0 && f2 <= 20.0;
  r.detail = "error factors per halving " + num(f1) + ", " + num(f2);
  return r;
}

// 12 --------------------------------------------------------------------------

CriterionResult determinism(const std::vector<Job>& first, const std::vector<Job>& second) {
  auto r = make("12", "deterministic traces");
  std::vector<std::string> differing;
  std::size_t bytes = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    bytes += first[k].csv.size();
    if (!first[k].error.empty() || first[k].csv != second[k].csv) {
      differing.push_back(first[k].scenario.name);
    }
  }
  r.passed = differing.empty();
  if (r.passed) {
    r.detail = std::to_string(first.size()) + " scenarios, " + std::to_string(bytes) +
               " CSV bytes identical across two runs";
  } else {
    std::string names;
    for (const auto& n : differing) names += (names.empty() ? "" : ", ") + n;
    r.detail = "differs or failed: " + names;
  }
  return r;
}

// Catalog scenarios without a numbered criterion ------------------------------

CriterionResult backdrive(const Job& job) {
  auto r = make("S:" + job.scenario.name, "back-driving with zero impedance");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const Scenario& s = job.scenario;
  const ActuatorConfig& cfg = s.setup.plant;
  const ForcePulse& pulse = s.load.pulses.front();

  // First-order oracle: the reflected high-speed mass pushed by the pulse
  // against viscous damping and the uncompensated share of coulomb friction.
  const double m = reflected_output_mass(cfg, GearMode::HighSpeed) + s.load.mass;
  const double c = cfg.ports.output.damping * std::pow(kTwoPi / cfg.train.lead, 2) + s.load.damping;
  const double residual = (1.0 - s.setup.controller.friction_comp_fraction) * cfg.train.coulomb;
  const double net = pulse.force - residual;
  const double v_oracle = net / c * (1.0 - std::exp(-c * pulse.duration / m));

  double v_end_of_pulse = 0.0;
  double x_peak = 0.0;
  bool follows = true;
  for (const auto& rec : job.result.trace) {
    if (rec.t <= pulse.start + pulse.duration) v_end_of_pulse = rec.v_o;
    if (rec.t > pulse.start + 0.01 && rec.t <= pulse.start + pulse.duration) {
      follows = follows && rec.v_o > 0.0;
    }
    x_peak = std::max(x_peak, rec.x_o);
  }
  const auto& last = job.result.trace.back();
  const bool at_rest = std::abs(last.v_o) < 1e-4;
  const bool no_return = x_peak - last.x_o < 1e-4;
  const double mismatch = std::abs(v_end_of_pulse - v_oracle) / v_oracle;
  r.passed = follows && at_rest && no_return && mismatch < 0.05;
  r.detail = "speed at pulse end " + num(v_end_of_pulse) + " m/s vs " + num(v_oracle) +
             " m/s for the bare mass, comes to rest at " + num(last.x_o * 1e3) + " mm (peak " +
             num(x_peak * 1e3) + " mm)";
  return r;
}

CriterionResult collision(const Job& job) {
  auto r = make("S:" + job.scenario.name, "force limit on contact");
  if (auto p = run_problems(job); !p.empty()) return r.detail = p, r;
  const Scenario& s = job.scenario;
  const ActuatorConfig& cfg = s.setup.plant;
  const double limit = cfg.train.torque_to_force(s.task.torque_limit.value_or(0.0));
  const double comp = s.setup.controller.friction_comp_fraction * cfg.train.coulomb;

  double commanded = 0.0;
  double impact = 0.0;
  bool stayed_hs = true;
  const double wall = s.load.wall.value_or(0.0);
  for (const auto& rec : job.result.trace) {
    commanded = std::max(commanded, std::abs(cfg.train.torque_to_force(rec.tau_o_est)));
    impact = std::max(impact, s.load.stiffness * std::max(0.0, rec.x_o - wall));
    stayed_hs = stayed_hs && rec.mode == Mode::HighSpeed;
  }
  const double resting = s.load.stiffness * std::max(0.0, job.result.trace.back().x_o - wall);
  r.passed = stayed_hs && commanded <= limit + comp + 1e-9 && std::abs(resting - limit) < 1.0;
  r.detail = "largest drive force " + num(commanded) + " N (cap " + num(limit) + " N + " +
             num(comp) + " N friction compensation), resting contact force " + num(resting) +
             " N, impact peak " + num(impact) + " N";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const Setup& setup, unsigned workers) {
  validate(setup);
  std::vector<Job> jobs;
  const auto names = scenario_names();
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& name : names) jobs.push_back({.scenario = make_scenario(name, setup)});
  }
  jobs.push_back({.scenario = braking_scenario(setup)});
  run_jobs(jobs, workers);

  const std::vector<Job> first(jobs.begin(), jobs.begin() + names.size());
  const std::vector<Job> second(jobs.begin() + names.size(), jobs.begin() + 2 * names.size());
  std::map<std::string, const Job*> by_name;
  for (const auto& j : first) by_name[j.scenario.name] = &j;

  std::vector<CriterionResult> out;
  out.push_back(junction_power());
  out.push_back(nullspace(setup));
  out.push_back(model_equivalence());
  out.push_back(winding_scaling(setup));
  out.push_back(hf_step(*by_name.at("hf-step-200mm")));
  out.push_back(hs_step(*by_name.at("hs-step-200mm")));
  out.push_back(seamless_shift(*by_name.at("constant-speed-shift")));
  out.push_back(braking_law(jobs.back()));
  out.push_back(auto_downshift(*by_name.at("auto-downshift-300mm")));
  out.push_back(sizing_check());
  out.push_back(integrator_order(setup));
  out.push_back(determinism(first, second));
  out.push_back(backdrive(*by_name.at("backdrive-zero-impedance")));
  out.push_back(collision(*by_name.at("collision-force-limit")));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::string id = r.id;
  if (id.size() < 3) id.insert(0, 3 - id.size(), ' ');
  return std::string(r.passed ? "PASS " : "FAIL ") + id + "  " + r.title + ": " + r.detail;
}

}  // namespace dsdm
