#pragma once

// Trace files: a replayable record of one execution. Header lines carry
// the scenario, its parameters, the bounds and the seed; each step line is
// `<step-index> <thread-id> <op-name> <result>`; footer lines record the
// terminal status and outcome. The format round-trips: parsing a written
// trace and replaying it reproduces the recorded run bit for bit.

#include <iosfwd>
#include <string>
#include <vector>

#include "nlcheck/explorer.hpp"

namespace nlcheck {

struct trace_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceFile {
  std::string scenario;
  std::vector<std::pair<std::string, std::string>> params;
  Bounds bounds;
  std::uint64_t seed = 0;
  Schedule schedule;
  std::vector<StepRecord> steps;
  std::string status;  // "complete" or "pruned"
  Outcome outcome;
};

void write_trace(std::ostream& os, const TraceFile& t);
TraceFile parse_trace(std::istream& is);  // throws trace_error

// Re-executes `schedule` under the scenario and packages the run as a
// trace file.
TraceFile record_trace(const ScenarioInstance& scn, const Bounds& bounds,
                       const Schedule& schedule, std::uint64_t seed);

// Replays a parsed trace with full checking; every step line and the
// footer must match the re-execution. Returns the replay report.
ExplorationReport replay_trace_file(const TraceFile& t);

}  // namespace nlcheck
