#include "nlcheck/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "nlcheck/scenarios.hpp"

namespace nlcheck {

namespace {

std::string join_outcome(const Outcome& o) {
  std::string s;
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (i > 0) s += "|";
    s += o[i];
  }
  return s;
}

Outcome split_outcome(const std::string& s) {
  Outcome o;
  if (s.empty()) return o;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '|')) o.push_back(item);
  return o;
}

}  // namespace

void write_trace(std::ostream& os, const TraceFile& t) {
  os << "# nlcheck trace v1\n";
  os << "# scenario: " << t.scenario << "\n";
  for (const auto& [k, v] : t.params) os << "# param: " << k << "=" << v << "\n";
  os << "# seed: " << t.seed << "\n";
  os << "# bounds: max_steps=" << t.bounds.max_steps
     << " retry_bound=" << t.bounds.retry_bound
     << " yield_count=" << t.bounds.yield_count << "\n";
  for (std::size_t i = 0; i < t.schedule.size(); ++i) {
    os << i << " " << t.schedule[i] << " " << t.steps[i].op;
    if (!t.steps[i].result.empty()) os << " " << t.steps[i].result;
    os << "\n";
  }
  os << "# status: " << t.status << "\n";
  os << "# outcome: " << join_outcome(t.outcome) << "\n";
}

TraceFile parse_trace(std::istream& is) {
  TraceFile t;
  std::string line;
  bool saw_magic = false;
  bool saw_status = false;
  long expect_index = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      while (!body.empty() && body[0] == ' ') body = body.substr(1);
      if (body.rfind("nlcheck trace", 0) == 0) {
        saw_magic = true;
      } else if (body.rfind("scenario: ", 0) == 0) {
        t.scenario = body.substr(10);
      } else if (body.rfind("param: ", 0) == 0) {
        std::string kv = body.substr(7);
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw trace_error("malformed param line: " + line);
        t.params.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      } else if (body.rfind("seed: ", 0) == 0) {
        t.seed = std::stoull(body.substr(6));
      } else if (body.rfind("bounds: ", 0) == 0) {
        std::stringstream ss(body.substr(8));
        std::string item;
        while (ss >> item) {
          auto eq = item.find('=');
          if (eq == std::string::npos)
            throw trace_error("malformed bounds entry: " + item);
          std::string key = item.substr(0, eq);
          long value = std::stol(item.substr(eq + 1));
          if (key == "max_steps")
            t.bounds.max_steps = value;
          else if (key == "retry_bound")
            t.bounds.retry_bound = static_cast<int>(value);
          else if (key == "yield_count")
            t.bounds.yield_count = static_cast<int>(value);
          else
            throw trace_error("unknown bounds key: " + key);
        }
      } else if (body.rfind("status: ", 0) == 0) {
        t.status = body.substr(8);
        saw_status = true;
      } else if (body.rfind("outcome: ", 0) == 0) {
        t.outcome = split_outcome(body.substr(9));
      } else if (body.rfind("outcome:", 0) == 0) {
        // empty outcome on pruned runs
      } else {
        throw trace_error("unknown header line: " + line);
      }
      continue;
    }
    std::stringstream ss(line);
    long index = -1;
    int tid = -1;
    std::string op;
    if (!(ss >> index >> tid >> op))
      throw trace_error("malformed step line: " + line);
    if (index != expect_index)
      throw trace_error("step index " + std::to_string(index) +
                        " out of order");
    ++expect_index;
    std::string result;
    std::getline(ss, result);
    while (!result.empty() && result[0] == ' ') result = result.substr(1);
    t.schedule.push_back(tid);
    t.steps.push_back(StepRecord{op, result});
  }
  if (!saw_magic) throw trace_error("not a trace file (missing magic line)");
  if (t.scenario.empty()) throw trace_error("trace names no scenario");
  if (!saw_status)
    throw trace_error("trace is truncated (missing status footer)");
  return t;
}

TraceFile record_trace(const ScenarioInstance& scn, const Bounds& bounds,
                       const Schedule& schedule, std::uint64_t seed) {
  Execution e(scn, bounds);
  for (int tid : schedule) e.step(tid);
  TraceFile t;
  t.scenario = scn.name;
  t.params = scn.params;
  t.bounds = bounds;
  t.seed = seed;
  t.schedule = e.schedule();
  t.steps = e.trace();
  t.status = e.complete() ? "complete" : "pruned";
  t.outcome = e.outcome();
  return t;
}

ExplorationReport replay_trace_file(const TraceFile& t) {
  std::map<std::string, std::string> params(t.params.begin(), t.params.end());
  ScenarioInstance scn = make_scenario(t.scenario, params, "replay");

  Execution e(scn, t.bounds);
  for (std::size_t i = 0; i < t.schedule.size(); ++i) {
    try {
      e.step(t.schedule[i]);
    } catch (const schedule_error& err) {
      throw trace_error("invalid schedule at step " + std::to_string(i) +
                        ": " + err.what());
    }
    const StepRecord& got = e.trace().back();
    if (got.op != t.steps[i].op || got.result != t.steps[i].result)
      throw trace_error("replay diverged at step " + std::to_string(i) +
                        ": recorded " + t.steps[i].op + " " +
                        t.steps[i].result + ", executed " + got.op + " " +
                        got.result);
  }
  if (!e.finished())
    throw trace_error("trace is a strict prefix of the execution");
  std::string status = e.complete() ? "complete" : "pruned";
  if (status != t.status)
    throw trace_error("replay ended " + status + " but the trace recorded " +
                      t.status);
  if (e.outcome() != t.outcome)
    throw trace_error("replay outcome " + outcome_str(e.outcome()) +
                      " differs from the recorded " + outcome_str(t.outcome));

  ExplorationReport report;
  report.scenario = t.scenario;
  report.mode = "replay";
  report.params = t.params;
  report.bounds = t.bounds;
  report.seed = t.seed;
  report.executions_explored = 1;
  report.executions_complete = e.complete() ? 1 : 0;
  report.executions_pruned = e.pruned() ? 1 : 0;
  if (e.complete()) ++report.outcomes[e.outcome()];
  report.violations = e.violations();
  for (const std::string& w : e.witnesses())
    report.witnesses.emplace(w, e.schedule());
  report.stats = e.stats();
  return report;
}

}  // namespace nlcheck
