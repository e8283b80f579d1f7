#include "nlcheck/explorer.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nlcheck {

std::string outcome_str(const Outcome& o) {
  std::string s = "(";
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (i > 0) s += ", ";
    s += o[i];
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Execution

Execution::Execution(const ScenarioInstance& scn, const Bounds& bounds)
    : bounds_(bounds) {
  ScenarioBuild build = scn.build(bounds);
  world_ = std::move(build.world);
  for (ThreadSpec& t : build.threads) {
    programs_.push_back(std::move(t.program));
    phases_.push_back(t.phase);
  }
  on_phase_end_ = std::move(build.on_phase_end);
  on_terminal_ = std::move(build.on_terminal);
  thread_steps_.assign(programs_.size(), 0);
  advance_phases();
}

Execution::Execution(const Execution& other)
    : bounds_(other.bounds_),
      world_(other.world_),
      phases_(other.phases_),
      on_phase_end_(other.on_phase_end_),
      on_terminal_(other.on_terminal_),
      current_phase_(other.current_phase_),
      finished_(other.finished_),
      pruned_(other.pruned_),
      prune_reason_(other.prune_reason_),
      schedule_(other.schedule_),
      trace_(other.trace_),
      thread_steps_(other.thread_steps_),
      outcome_(other.outcome_),
      violations_(other.violations_),
      witnesses_(other.witnesses_),
      stats_(other.stats_) {
  programs_.reserve(other.programs_.size());
  for (const auto& p : other.programs_) programs_.push_back(p->clone());
}

std::vector<int> Execution::runnable() const {
  std::vector<int> out;
  if (finished_) return out;
  for (std::size_t i = 0; i < programs_.size(); ++i)
    if (phases_[i] == current_phase_ && !programs_[i]->done() &&
        !programs_[i]->stuck())
      out.push_back(static_cast<int>(i));
  return out;
}

void Execution::violation(std::string clause, std::string detail) {
  violations_.push_back(ViolationRecord{
      schedule_, static_cast<long>(schedule_.size()) - 1, std::move(clause),
      std::move(detail)});
}

void Execution::witness(std::string name) {
  witnesses_.push_back(std::move(name));
}

void Execution::stat_max(const std::string& name, long value) {
  auto it = stats_.find(name);
  if (it == stats_.end())
    stats_[name] = value;
  else
    it->second = std::max(it->second, value);
}

void Execution::set_outcome(Outcome outcome) { outcome_ = std::move(outcome); }

void Execution::prune(const std::string& reason) {
  pruned_ = true;
  prune_reason_ = reason;
  finished_ = true;
}

void Execution::run_object_checks() {
  if (world_.exchanger) report(ex_check_invariants(*world_.exchanger));
  if (world_.network) report(cn_check_invariants(*world_.network));
  if (world_.flip) report(fl_check_invariants(*world_.flip));
  for (const auto& p : programs_) p->check_in_flight(world_, *this);
}

void Execution::advance_phases() {
  for (;;) {
    bool phase_open = false;
    bool any_left = false;
    for (std::size_t i = 0; i < programs_.size(); ++i) {
      if (phases_[i] == current_phase_ && !programs_[i]->done())
        phase_open = true;
      if (phases_[i] > current_phase_) any_left = true;
    }
    if (phase_open) return;
    if (on_phase_end_) on_phase_end_(current_phase_, world_, *this);
    if (!any_left) break;
    ++current_phase_;
  }
  finished_ = true;
  if (!pruned_) {
    if (on_terminal_) {
      std::vector<const ThreadProgram*> ps;
      ps.reserve(programs_.size());
      for (const auto& p : programs_) ps.push_back(p.get());
      on_terminal_(world_, ps, *this);
    }
  }
}

void Execution::step(int tid) {
  if (finished_)
    throw schedule_error("step after the execution finished");
  if (tid < 0 || tid >= static_cast<int>(programs_.size()))
    throw schedule_error("no such thread: " + std::to_string(tid));
  ThreadProgram& prog = *programs_[static_cast<std::size_t>(tid)];
  if (phases_[static_cast<std::size_t>(tid)] != current_phase_ ||
      prog.done() || prog.stuck())
    throw schedule_error("thread " + std::to_string(tid) +
                         " is not runnable at step " +
                         std::to_string(schedule_.size()));

  schedule_.push_back(tid);
  ++thread_steps_[static_cast<std::size_t>(tid)];
  try {
    trace_.push_back(prog.step(world_, *this));
  } catch (const std::runtime_error& e) {
    trace_.push_back(StepRecord{"fault", e.what()});
    violation("engine.step-fault", e.what());
    prune("step fault");
    return;
  }

  run_object_checks();

  if (prog.stuck()) {
    prune("retry budget exhausted");
    return;
  }
  if (steps_taken() >= bounds_.max_steps && !finished_) {
    bool all_done = true;
    for (const auto& p : programs_)
      if (!p->done()) all_done = false;
    if (!all_done) {
      prune("step budget exhausted");
      return;
    }
  }
  advance_phases();
}

// ---------------------------------------------------------------------------
// Report plumbing.

namespace {

// Prefix-replay makes the same mid-schedule violation reappear on every
// leaf below it; dedup on (clause, step, schedule prefix).
struct ViolationKey {
  std::string clause;
  long step;
  Schedule schedule;
  auto operator<=>(const ViolationKey&) const = default;
};

class ReportBuilder {
 public:
  explicit ReportBuilder(ExplorationReport& r) : r_(r) {}

  void collect(const Execution& e) {
    ++r_.executions_explored;
    if (e.complete()) {
      ++r_.executions_complete;
      ++r_.outcomes[e.outcome()];
    } else {
      ++r_.executions_pruned;
    }
    for (const ViolationRecord& v : e.violations()) {
      ViolationKey key{v.clause, v.step_index,
                       Schedule(v.schedule.begin(), v.schedule.end())};
      if (seen_.insert(key).second) r_.violations.push_back(v);
    }
    for (const std::string& w : e.witnesses())
      if (!r_.witnesses.count(w)) {
        r_.witnesses[w] = e.schedule();
        if (!witness_trace_) witness_trace_ = capture(e, "witness " + w);
      }
    for (const auto& [name, v] : e.stats()) {
      auto it = r_.stats.find(name);
      if (it == r_.stats.end())
        r_.stats[name] = v;
      else
        it->second = std::max(it->second, v);
    }
    if (!e.violations().empty() && !violation_trace_)
      violation_trace_ = capture(e, "violation");
    if (e.complete()) last_complete_ = capture(e, "last complete");
  }

  void finish() {
    if (violation_trace_)
      r_.exported_trace = *violation_trace_;
    else if (witness_trace_)
      r_.exported_trace = *witness_trace_;
    else if (last_complete_)
      r_.exported_trace = *last_complete_;
    if (r_.executions_explored > 0) {
      double frac = static_cast<double>(r_.executions_pruned) /
                    static_cast<double>(r_.executions_explored);
      r_.budget_warning = frac > r_.bounds.prune_warn_fraction;
    }
  }

 private:
  // Steps are not copied here; the caller regenerates them by replay when
  // a trace file is actually written.
  static TraceCapture capture(const Execution& e, std::string label) {
    return TraceCapture{std::move(label), e.schedule(), {}, e.complete(),
                        e.outcome()};
  }

  ExplorationReport& r_;
  std::set<ViolationKey> seen_;
  std::optional<TraceCapture> violation_trace_;
  std::optional<TraceCapture> witness_trace_;
  std::optional<TraceCapture> last_complete_;
};

ExplorationReport make_report(const ScenarioInstance& scn, std::string mode,
                              const Bounds& bounds) {
  ExplorationReport r;
  r.scenario = scn.name;
  r.mode = std::move(mode);
  r.params = scn.params;
  r.bounds = bounds;
  return r;
}

}  // namespace

ExplorationReport explore_exhaustive(const ScenarioInstance& scn,
                                     const Bounds& bounds) {
  ExplorationReport report = make_report(scn, "exhaustive", bounds);
  ReportBuilder builder(report);

  // Depth-first search over the schedule tree, re-executing from the
  // initial state along each prefix. choice[i] indexes options[i].
  std::vector<std::vector<int>> options;
  std::vector<std::size_t> choice;

  for (;;) {
    Execution e(scn, bounds);
    for (std::size_t d = 0; d < choice.size(); ++d)
      e.step(options[d][choice[d]]);
    while (!e.finished()) {
      std::vector<int> opts = e.runnable();
      options.push_back(opts);
      choice.push_back(0);
      e.step(opts[0]);
    }
    builder.collect(e);

    while (!choice.empty() && choice.back() + 1 >= options.back().size()) {
      choice.pop_back();
      options.pop_back();
    }
    if (choice.empty()) break;
    ++choice.back();
  }

  builder.finish();
  return report;
}

ExplorationReport run_random(const ScenarioInstance& scn, long runs,
                             std::uint64_t seed, const Bounds& bounds) {
  ExplorationReport report = make_report(scn, "random", bounds);
  report.seed = seed;
  report.runs = runs;
  ReportBuilder builder(report);

  std::mt19937_64 rng(seed);
  for (long i = 0; i < runs; ++i) {
    Execution e(scn, bounds);
    while (!e.finished()) {
      std::vector<int> opts = e.runnable();
      std::uniform_int_distribution<std::size_t> pick(0, opts.size() - 1);
      e.step(opts[pick(rng)]);
    }
    builder.collect(e);
  }
  builder.finish();
  return report;
}

ExplorationReport replay_schedule(const ScenarioInstance& scn,
                                  const Schedule& schedule,
                                  const Bounds& bounds) {
  ExplorationReport report = make_report(scn, "replay", bounds);
  ReportBuilder builder(report);

  Execution e(scn, bounds);
  for (int tid : schedule) e.step(tid);  // throws schedule_error on misuse
  if (!e.finished())
    throw schedule_error("schedule ends before the execution finished");
  builder.collect(e);
  builder.finish();
  return report;
}

// ---------------------------------------------------------------------------
// Rendering.

std::string ExplorationReport::summary() const {
  std::ostringstream os;
  os << "scenario " << scenario;
  if (!params.empty()) {
    os << " (";
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i > 0) os << ", ";
      os << params[i].first << "=" << params[i].second;
    }
    os << ")";
  }
  os << ", mode " << mode;
  if (mode == "random") os << ", seed " << seed << ", runs " << runs;
  os << "\n";
  os << "executions: " << executions_explored << " explored, "
     << executions_complete << " complete, " << executions_pruned
     << " pruned\n";
  if (budget_warning)
    os << "warning: pruning exceeded " << bounds.prune_warn_fraction * 100
       << "% of executions; consider raising the budgets\n";
  os << "outcomes:\n";
  for (const auto& [o, n] : outcomes)
    os << "  " << outcome_str(o) << " x" << n << "\n";
  for (const auto& [name, sched] : witnesses) {
    os << "witness " << name << ": schedule";
    for (int t : sched) os << " " << t;
    os << "\n";
  }
  for (const auto& [name, v] : stats) os << name << ": " << v << "\n";
  if (violations.empty()) {
    os << "violations: none\n";
  } else {
    os << "violations: " << violations.size() << "\n";
    std::size_t shown = std::min<std::size_t>(violations.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
      const ViolationRecord& v = violations[i];
      os << "  [" << v.clause << "] at step " << v.step_index << ": "
         << v.detail << "\n    schedule:";
      for (int t : v.schedule) os << " " << t;
      os << "\n";
    }
    if (shown < violations.size())
      os << "  ... " << violations.size() - shown << " more\n";
  }
  return os.str();
}

std::string ExplorationReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["mode"] = mode;
  nlohmann::json jp = nlohmann::json::object();
  for (const auto& [k, v] : params) jp[k] = v;
  j["params"] = jp;
  j["bounds"] = {{"max_steps", bounds.max_steps},
                 {"retry_bound", bounds.retry_bound},
                 {"yield_count", bounds.yield_count}};
  j["seed"] = seed;
  j["outcomes"] = nlohmann::json::array();
  for (const auto& [o, n] : outcomes)
    j["outcomes"].push_back({{"tuple", o}, {"count", n}});
  j["violations"] = nlohmann::json::array();
  for (const ViolationRecord& v : violations)
    j["violations"].push_back({{"schedule", v.schedule},
                               {"step", v.step_index},
                               {"clause", v.clause},
                               {"detail", v.detail}});
  j["explored"] = executions_explored;
  j["complete"] = executions_complete;
  j["pruned"] = executions_pruned;
  j["budget_warning"] = budget_warning;
  nlohmann::json jw = nlohmann::json::object();
  for (const auto& [name, sched] : witnesses) jw[name] = sched;
  j["witnesses"] = jw;
  nlohmann::json js = nlohmann::json::object();
  for (const auto& [name, v] : stats) js[name] = v;
  j["stats"] = js;
  return j.dump(2);
}

}  // namespace nlcheck
