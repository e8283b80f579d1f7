// End-to-end checks of the command-line interface: exit codes, JSON
// shape, trace round-tripping. Spawns the real binary.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::cout << "FAIL: " << what << "\n";
    ++failures;
  }
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(NLCHECK_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

}  // namespace

int main() {
  // list names all scenarios.
  {
    RunResult r = run("list");
    expect(r.exit_code == 0, "list exits 0");
    for (const char* name : {"exchange-pair", "flip2-pair", "fig1-combined",
                             "ex-seq", "e-qc", "e-qqc"})
      expect(r.output.find(name) != std::string::npos,
             std::string("list mentions ") + name);
  }

  // A clean run exits 0 and reports the exact outcome set in JSON.
  {
    RunResult r = run("run -s exchange-pair --mode exhaustive --json");
    expect(r.exit_code == 0, "exchange-pair exits 0, got " +
                                 std::to_string(r.exit_code));
    auto j = nlohmann::json::parse(r.output, nullptr, false);
    expect(!j.is_discarded(), "run --json emits valid JSON");
    if (!j.is_discarded()) {
      expect(j["scenario"] == "exchange-pair", "json scenario field");
      expect(j["mode"] == "exhaustive", "json mode field");
      expect(j["violations"].empty(), "json violations empty");
      expect(j["outcomes"].size() == 2, "json outcome set size");
      expect(j.contains("bounds") && j.contains("seed") &&
                 j.contains("complete") && j.contains("pruned"),
             "json report fields");
    }
  }

  // Out-of-range parameters exit 2.
  {
    RunResult r = run("run -s e-qc --k 9999");
    expect(r.exit_code == 2, "e-qc --k 9999 exits 2, got " +
                                 std::to_string(r.exit_code));
  }
  {
    RunResult r = run("run -s no-such-scenario");
    expect(r.exit_code == 2, "unknown scenario exits 2");
  }

  // Trace round-trip through the CLI.
  {
    std::string trace = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR")
                                                          : "/tmp") +
                        "/nlcheck_cli_test.trace";
    RunResult w = run("run -s e-qqc --n 1 --trace-out " + trace);
    expect(w.exit_code == 0, "run with --trace-out exits 0");
    RunResult rep = run("replay --trace-in " + trace);
    expect(rep.exit_code == 0, "replay exits 0, got " +
                                   std::to_string(rep.exit_code));
    RunResult rep2 = run("replay --trace-in " + trace + " -s e-qqc");
    expect(rep2.exit_code == 0, "replay with matching -s exits 0");
    RunResult repbad = run("replay --trace-in " + trace + " -s e-qc");
    expect(repbad.exit_code == 2, "replay with mismatched -s exits 2");

    // Truncate the file: malformed trace exits 2.
    std::ifstream in(trace);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    std::ofstream out(trace, std::ios::trunc);
    out << text.substr(0, text.size() / 2);
    out.close();
    RunResult trunc = run("replay --trace-in " + trace);
    expect(trunc.exit_code == 2, "truncated trace exits 2");
    std::remove(trace.c_str());
  }

  // SEED env var overrides --seed.
  {
    RunResult a = run("run -s e-qqc --n 2 --mode random --runs 20 "
                      "--seed 1 --json");
    std::string cmd = "SEED=1 " + std::string(NLCHECK_BIN) +
                      " run -s e-qqc --n 2 --mode random --runs 20 "
                      "--seed 99999 --json 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    pclose(pipe);
    auto ja = nlohmann::json::parse(a.output, nullptr, false);
    auto jb = nlohmann::json::parse(out, nullptr, false);
    expect(!ja.is_discarded() && !jb.is_discarded(), "random runs emit JSON");
    if (!ja.is_discarded() && !jb.is_discarded()) {
      expect(ja["seed"] == 1 && jb["seed"] == 1, "SEED env overrides --seed");
      expect(ja["outcomes"] == jb["outcomes"],
             "same effective seed, same outcomes");
    }
  }

  // Native mode runs and reports checks.
  {
    RunResult r = run("run -s e-qqc --mode native --threads 4 --ops 2000");
    expect(r.exit_code == 0, "native network run exits 0");
    RunResult r2 = run("run -s flip2-pair --mode native");
    expect(r2.exit_code == 2, "flip2-pair has no native mode");
  }

  if (failures == 0) {
    std::cout << "all cli checks passed\n";
    return 0;
  }
  std::cout << failures << " cli checks failed\n";
  return 1;
}
