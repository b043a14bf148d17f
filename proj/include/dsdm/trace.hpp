#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dsdm/scenario.hpp"

namespace dsdm {

/// Header row of the trace CSV.
extern const char* const kTraceHeader;

const char* to_string(BrakeState b);

/// CSV with one row per TraceRecord, shortest round-trip number format.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::string trace_csv(const std::vector<TraceRecord>& trace);

}  // namespace dsdm
