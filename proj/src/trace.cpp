#include "dsdm/trace.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

namespace dsdm {

const char* const kTraceHeader =
    "t_s,x_o_m,v_o_m_per_s,w1_rad_per_s,w2_rad_per_s,i1_A,i2_A,mode,brake,tau_o_est_Nm";

const char* to_string(BrakeState b) { return b == BrakeState::Locked ? "Locked" : "Free"; }

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    put(out, r.t);
    out << ',';
    put(out, r.x_o);
    out << ',';
    put(out, r.v_o);
    out << ',';
    put(out, r.w1);
    out << ',';
    put(out, r.w2);
    out << ',';
    put(out, r.i1);
    out << ',';
    put(out, r.i2);
    out << ',' << to_string(r.mode) << ',' << to_string(r.brake) << ',';
    put(out, r.tau_o_est);
    out << '\n';
  }
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

}  // namespace dsdm
