#pragma once

// Execution engine. Client programs are deterministic per-thread step
// machines over a shared World; a Schedule (the sequence of chosen thread
// ids) fully determines an execution. The engine explores interleavings
// exhaustively (replay-based depth-first search over the schedule tree) or
// randomly, re-checking every object invariant after every atomic step and
// every per-call postcondition at call return.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlcheck/counting_network.hpp"
#include "nlcheck/exchanger.hpp"
#include "nlcheck/flip2.hpp"

namespace nlcheck {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct schedule_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The objects a scenario runs against. Value-semantic, so the naive
// enumerator can snapshot whole worlds.
struct World {
  std::optional<ExchangerState> exchanger;
  std::optional<NetworkState> network;
  std::optional<FlipState> flip;
};

struct Bounds {
  long max_steps = 200;
  int retry_bound = 3;   // attempts per retrying exchange
  int yield_count = 1;   // no-op steps standing in for the timeout wait
  double prune_warn_fraction = 0.5;
};

using Schedule = std::vector<int>;
using Outcome = std::vector<std::string>;

struct StepRecord {
  std::string op;
  std::string result;
};

struct ViolationRecord {
  Schedule schedule;  // prefix that exhibits the violation, replayable
  long step_index = -1;
  std::string clause;
  std::string detail;
};

// Collector interface handed to programs and scenario hooks.
class ExecutionSink {
 public:
  virtual ~ExecutionSink() = default;
  virtual void violation(std::string clause, std::string detail) = 0;
  virtual void witness(std::string name) = 0;
  virtual void stat_max(const std::string& name, long value) = 0;
  virtual void set_outcome(Outcome outcome) = 0;
  virtual const Bounds& bounds() const = 0;

  void report(const std::vector<Violation>& vs) {
    for (const Violation& v : vs) violation(v.clause, v.detail);
  }
};

// A deterministic per-thread state machine. Each step() call performs
// exactly one atomic step (an object step or a pure yield) and may finish
// calls, running their postcondition checks through the sink.
class ThreadProgram {
 public:
  virtual ~ThreadProgram() = default;
  virtual std::unique_ptr<ThreadProgram> clone() const = 0;
  virtual bool done() const = 0;
  // A stuck program has exhausted its retry budget; the execution is
  // pruned rather than continued.
  virtual bool stuck() const { return false; }
  virtual StepRecord step(World& w, ExecutionSink& sink) = 0;
  // Stability checks for a call in flight; run after every step of every
  // thread.
  virtual void check_in_flight(const World& w, ExecutionSink& sink) const {
    (void)w;
    (void)sink;
  }
};

struct ThreadSpec {
  std::unique_ptr<ThreadProgram> program;
  int phase = 0;  // threads only run once all lower phases have finished
};

// One runnable configuration of a scenario.
struct ScenarioBuild {
  World world;
  std::vector<ThreadSpec> threads;
  // Runs when every thread of `phase` has finished (fork-join barrier):
  // contract checks and view transfer live here.
  std::function<void(int phase, World&, ExecutionSink&)> on_phase_end;
  // Runs once on every *complete* execution: teardown checks, the final
  // assertion, and the outcome.
  std::function<void(World&, const std::vector<const ThreadProgram*>&,
                     ExecutionSink&)>
      on_terminal;
};

struct ScenarioInstance {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  std::function<ScenarioBuild(const Bounds&)> build;
  std::string native_object;  // "exchanger", "network", or empty
};

// ---------------------------------------------------------------------------
// A single execution: steps threads, runs checks, accumulates results.
// Deep-copyable so enumeration by state snapshotting is possible.

class Execution final : public ExecutionSink {
 public:
  Execution(const ScenarioInstance& scn, const Bounds& bounds);
  Execution(const Execution& other);
  Execution& operator=(const Execution&) = delete;

  bool finished() const { return finished_; }
  bool complete() const { return finished_ && !pruned_; }
  bool pruned() const { return pruned_; }
  const std::string& prune_reason() const { return prune_reason_; }

  std::vector<int> runnable() const;
  void step(int tid);

  const Schedule& schedule() const { return schedule_; }
  const std::vector<StepRecord>& trace() const { return trace_; }
  const Outcome& outcome() const { return outcome_; }
  const std::vector<ViolationRecord>& violations() const {
    return violations_;
  }
  const std::vector<std::string>& witnesses() const { return witnesses_; }
  const std::map<std::string, long>& stats() const { return stats_; }
  long steps_taken() const { return static_cast<long>(schedule_.size()); }
  long thread_steps(int tid) const { return thread_steps_.at(tid); }
  const World& world() const { return world_; }

  // ExecutionSink
  void violation(std::string clause, std::string detail) override;
  void witness(std::string name) override;
  void stat_max(const std::string& name, long value) override;
  void set_outcome(Outcome outcome) override;
  const Bounds& bounds() const override { return bounds_; }

 private:
  void run_object_checks();
  void advance_phases();
  void prune(const std::string& reason);

  Bounds bounds_;
  World world_;
  std::vector<std::unique_ptr<ThreadProgram>> programs_;
  std::vector<int> phases_;
  std::function<void(int, World&, ExecutionSink&)> on_phase_end_;
  std::function<void(World&, const std::vector<const ThreadProgram*>&,
                     ExecutionSink&)>
      on_terminal_;

  int current_phase_ = 0;
  bool finished_ = false;
  bool pruned_ = false;
  std::string prune_reason_;
  Schedule schedule_;
  std::vector<StepRecord> trace_;
  std::vector<long> thread_steps_;
  Outcome outcome_;
  std::vector<ViolationRecord> violations_;
  std::vector<std::string> witnesses_;
  std::map<std::string, long> stats_;
};

// ---------------------------------------------------------------------------
// Reports.

struct TraceCapture {
  std::string label;
  Schedule schedule;
  std::vector<StepRecord> steps;
  bool complete = false;
  Outcome outcome;
};

struct ExplorationReport {
  std::string scenario;
  std::string mode;
  std::vector<std::pair<std::string, std::string>> params;
  Bounds bounds;
  std::uint64_t seed = 0;
  long runs = 0;

  std::map<Outcome, long> outcomes;  // complete executions only
  long executions_explored = 0;
  long executions_complete = 0;
  long executions_pruned = 0;
  std::vector<ViolationRecord> violations;
  std::map<std::string, Schedule> witnesses;  // first schedule per name
  std::map<std::string, long> stats;          // max-merged
  bool budget_warning = false;

  std::optional<TraceCapture> exported_trace;  // violation > witness > last

  bool ok() const {
    return violations.empty() && executions_complete > 0;
  }
  std::string summary() const;
  std::string to_json() const;
};

ExplorationReport explore_exhaustive(const ScenarioInstance& scn,
                                     const Bounds& bounds);
ExplorationReport run_random(const ScenarioInstance& scn, long runs,
                             std::uint64_t seed, const Bounds& bounds);
// Re-executes one recorded schedule with full checking.
ExplorationReport replay_schedule(const ScenarioInstance& scn,
                                  const Schedule& schedule,
                                  const Bounds& bounds);

std::string outcome_str(const Outcome& o);

}  // namespace nlcheck
