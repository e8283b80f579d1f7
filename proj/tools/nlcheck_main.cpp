// Command-line front end: run the registered scenarios under the
// exhaustive, random or native modes, emit text or JSON reports, and
// record/replay trace files.
//
// Exit codes: 0 all checks passed; 1 verification failure; 2 bad
// configuration or malformed trace.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlcheck/native_stress.hpp"
#include "nlcheck/scenarios.hpp"
#include "nlcheck/trace.hpp"

namespace {

using namespace nlcheck;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitConfig = 2;

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  // The SEED environment variable takes precedence over --seed.
  if (const char* env = std::getenv("SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw config_error(std::string("cannot parse SEED='") + env + "'");
    }
  }
  return flag_seed;
}

std::map<std::string, std::string> collect_params(
    const std::string& scenario, long n, long k, const std::string& vs1,
    const std::string& vs2, const CLI::App& run) {
  std::map<std::string, std::string> params;
  if (run.count("--n")) params["n"] = std::to_string(n);
  if (run.count("--k")) params["k"] = std::to_string(k);
  if (run.count("--vs1")) params["vs1"] = vs1;
  if (run.count("--vs2")) params["vs2"] = vs2;
  // Validate parameter applicability early for a clean error message.
  const ScenarioDef* def = find_scenario(scenario);
  if (def == nullptr) throw config_error("unknown scenario: " + scenario);
  for (const auto& [key, value] : params) {
    bool known = false;
    for (const ParamDoc& p : def->params)
      if (p.name == key) known = true;
    if (!known)
      throw config_error("scenario " + scenario +
                         " does not take parameter --" + key);
  }
  return params;
}

int cmd_list(bool as_json) {
  if (as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const ScenarioDef& d : scenario_registry()) {
      nlohmann::json jd;
      jd["name"] = d.name;
      jd["summary"] = d.summary;
      jd["checks"] = d.checks;
      jd["native"] = !d.native_object.empty();
      jd["params"] = nlohmann::json::array();
      for (const ParamDoc& p : d.params)
        jd["params"].push_back({{"name", p.name},
                                {"summary", p.summary},
                                {"default", p.default_value}});
      j.push_back(jd);
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  for (const ScenarioDef& d : scenario_registry()) {
    std::cout << d.name << "\n  " << d.summary << "\n  checks: " << d.checks
              << "\n";
    for (const ParamDoc& p : d.params)
      std::cout << "  --" << p.name << " (default " << p.default_value
                << "): " << p.summary << "\n";
    if (!d.native_object.empty())
      std::cout << "  native mode: " << d.native_object << "\n";
    std::cout << "\n";
  }
  return kExitOk;
}

int run_vm_mode(const std::string& scenario,
                const std::map<std::string, std::string>& params,
                const std::string& mode, const Bounds& bounds, long runs,
                std::uint64_t seed, bool as_json,
                const std::string& trace_out) {
  ScenarioInstance scn = make_scenario(scenario, params, mode);
  ExplorationReport report;
  if (mode == "exhaustive")
    report = explore_exhaustive(scn, bounds);
  else
    report = run_random(scn, runs, seed, bounds);

  if (!trace_out.empty()) {
    if (report.exported_trace) {
      TraceFile t = record_trace(scn, bounds, report.exported_trace->schedule,
                                 seed);
      std::ofstream os(trace_out);
      if (!os) throw config_error("cannot write trace file " + trace_out);
      write_trace(os, t);
      if (!as_json)
        std::cout << "trace (" << report.exported_trace->label
                  << ") written to " << trace_out << "\n";
    } else if (!as_json) {
      std::cout << "no execution available for a trace\n";
    }
  }

  std::cout << (as_json ? report.to_json() + "\n" : report.summary());
  return report.ok() ? kExitOk : kExitVerificationFailure;
}

int run_native_mode(const std::string& scenario, int threads, long ops,
                    std::uint64_t seed, int retry_bound, bool as_json) {
  const ScenarioDef* def = find_scenario(scenario);
  if (def == nullptr) throw config_error("unknown scenario: " + scenario);
  if (def->native_object.empty())
    throw config_error("scenario " + scenario + " has no native mode");
  StressReport report =
      def->native_object == "network"
          ? stress_network(threads, ops, seed)
          : stress_exchanger(threads, ops, seed, retry_bound);
  std::cout << (as_json ? report.to_json() + "\n" : report.summary());
  return report.ok() ? kExitOk : kExitVerificationFailure;
}

int cmd_replay(const std::string& scenario, const std::string& trace_in,
               bool as_json) {
  std::ifstream is(trace_in);
  if (!is) throw config_error("cannot open trace file " + trace_in);
  TraceFile t = parse_trace(is);
  if (!scenario.empty() && scenario != t.scenario)
    throw config_error("trace records scenario " + t.scenario +
                       ", not " + scenario);
  ExplorationReport report = replay_trace_file(t);
  std::cout << (as_json ? report.to_json() + "\n" : report.summary());
  return report.violations.empty() ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlcheck: interleaving exploration and invariant checking "
               "for non-linearizable concurrent objects"};
  app.require_subcommand(1);

  // list
  CLI::App* list = app.add_subcommand("list", "list registered scenarios");
  bool list_json = false;
  list->add_flag("--json", list_json, "machine-readable output");

  // run
  CLI::App* run = app.add_subcommand("run", "run a scenario");
  std::string scenario;
  std::string mode = "exhaustive";
  long n = 0, k = 0;
  std::string vs1, vs2;
  long runs = 1000;
  std::uint64_t seed = 12345;
  int threads = 8;
  long ops = 10000;
  Bounds bounds;
  bool run_json = false;
  std::string trace_out;
  run->add_option("--scenario,-s", scenario, "scenario name")->required();
  run->add_option("--mode", mode, "exhaustive | random | native")
      ->check(CLI::IsMember({"exhaustive", "random", "native"}));
  run->add_option("--n", n, "scenario parameter n");
  run->add_option("--k", k, "scenario parameter k");
  run->add_option("--vs1", vs1, "comma-separated value list");
  run->add_option("--vs2", vs2, "comma-separated value list");
  run->add_option("--runs", runs, "random mode: number of runs");
  run->add_option("--seed", seed, "random seed (env SEED overrides)");
  run->add_option("--threads", threads, "native mode: thread count");
  run->add_option("--ops", ops, "native mode: ops per thread");
  run->add_option("--max-steps", bounds.max_steps, "step budget per execution");
  run->add_option("--retries", bounds.retry_bound,
                  "attempts per retrying exchange");
  run->add_option("--yields", bounds.yield_count,
                  "scheduler points standing in for the timeout wait");
  run->add_flag("--json", run_json, "machine-readable report");
  run->add_option("--trace-out", trace_out, "write a replayable trace here");

  // replay
  CLI::App* replay = app.add_subcommand("replay", "replay a recorded trace");
  std::string replay_scenario;
  std::string trace_in;
  bool replay_json = false;
  replay->add_option("--scenario,-s", replay_scenario,
                     "expected scenario (checked against the trace)");
  replay->add_option("--trace-in", trace_in, "trace file to replay")
      ->required();
  replay->add_flag("--json", replay_json, "machine-readable report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return cmd_list(list_json);
    if (run->parsed()) {
      std::uint64_t s = effective_seed(seed);
      if (mode == "native")
        return run_native_mode(scenario, threads, ops, s, bounds.retry_bound,
                               run_json);
      auto params = collect_params(scenario, n, k, vs1, vs2, *run);
      return run_vm_mode(scenario, params, mode, bounds, runs, s, run_json,
                         trace_out);
    }
    if (replay->parsed())
      return cmd_replay(replay_scenario, trace_in, replay_json);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const trace_error& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
