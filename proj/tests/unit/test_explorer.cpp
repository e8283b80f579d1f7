#include <doctest.h>

#include "nlcheck/scenarios.hpp"
#include "support/naive_enumerator.hpp"

using namespace nlcheck;
using nlcheck_test::naive_enumerate;

namespace {

ScenarioInstance scenario(const std::string& name,
                          std::map<std::string, std::string> params = {}) {
  return make_scenario(name, params, "exhaustive");
}

}  // namespace

TEST_CASE("exhaustive exploration of the exchange pair") {
  ExplorationReport r = explore_exhaustive(scenario("exchange-pair"), Bounds{});
  CHECK(r.violations.empty());
  CHECK(r.executions_pruned == 0);
  CHECK(r.executions_complete == r.executions_explored);

  // Exactly the double failure and the swap.
  CHECK(r.outcomes.size() == 2);
  CHECK(r.outcomes.count(Outcome{"None", "None"}) == 1);
  CHECK(r.outcomes.count(Outcome{"Some 2", "Some 1"}) == 1);
  CHECK(r.witnesses.count("elimination") == 1);
}

TEST_CASE("sequential schedules of the exchange pair both fail") {
  // Run each thread to completion before the other starts.
  for (int first : {0, 1}) {
    Execution e(scenario("exchange-pair"), Bounds{});
    int second = 1 - first;
    while (!e.finished()) {
      std::vector<int> r = e.runnable();
      int pick = r.front();
      for (int t : r)
        if (t == first) pick = first;
      e.step(pick);
    }
    CHECK(e.complete());
    CHECK(e.outcome() == Outcome{"None", "None"});
    CHECK(e.violations().empty());
    (void)second;
  }
}

TEST_CASE("exchange call step count stays within the compiled bound") {
  ExplorationReport r = explore_exhaustive(scenario("exchange-pair"), Bounds{});
  (void)r;
  // Walk all executions again, tracking per-thread step counts.
  Bounds b;
  ScenarioInstance scn = scenario("exchange-pair");
  nlcheck_test::NaiveReport naive = naive_enumerate(scn, b);
  CHECK(naive.leaves > 0);

  // Per-thread steps never exceed 9 for a single exchange call.
  Execution e(scn, b);
  while (!e.finished()) e.step(e.runnable().front());
  CHECK(e.thread_steps(0) <= 9);
  CHECK(e.thread_steps(1) <= 9);
}

TEST_CASE("yield count expands the timeout wait") {
  Bounds b;
  b.yield_count = 3;
  Execution e(scenario("exchange-pair"), b);
  // Drive thread 0 alone: it installs, waits, retires.
  while (!e.finished()) {
    std::vector<int> r = e.runnable();
    if (r.empty() || r.front() != 0) break;
    e.step(0);
  }
  long yields = 0;
  for (const StepRecord& s : e.trace())
    if (s.op == "ex.yield") ++yields;
  CHECK(yields == 3);
}

TEST_CASE("determinism: the same schedule replays identically") {
  ScenarioInstance scn = scenario("e-qqc", {{"n", "1"}});
  Bounds b;
  ExplorationReport r1 = run_random(scn, 50, 2024, b);
  ExplorationReport r2 = run_random(scn, 50, 2024, b);
  CHECK(r1.outcomes == r2.outcomes);
  CHECK(r1.executions_complete == r2.executions_complete);
  CHECK(r1.violations.size() == r2.violations.size());

  // Double replay of a single schedule.
  Execution a(scn, b);
  while (!a.finished()) a.step(a.runnable().back());
  ExplorationReport ra = replay_schedule(scn, a.schedule(), b);
  ExplorationReport rb = replay_schedule(scn, a.schedule(), b);
  REQUIRE(ra.outcomes.size() == 1);
  CHECK(ra.outcomes == rb.outcomes);

  Execution c(scn, b);
  for (int tid : a.schedule()) c.step(tid);
  CHECK(c.trace().size() == a.trace().size());
  for (std::size_t i = 0; i < a.trace().size(); ++i) {
    CHECK(c.trace()[i].op == a.trace()[i].op);
    CHECK(c.trace()[i].result == a.trace()[i].result);
  }
}

TEST_CASE("replay rejects a non-runnable thread") {
  ScenarioInstance scn = scenario("flip2-pair");
  Bounds b;
  CHECK_THROWS_AS(replay_schedule(scn, Schedule{0, 0, 0}, b), schedule_error);
  CHECK_THROWS_AS(replay_schedule(scn, Schedule{7}, b), schedule_error);
  CHECK_THROWS_AS(replay_schedule(scn, Schedule{0}, b), schedule_error);
}

TEST_CASE("oracle equivalence on small scenarios") {
  Bounds b;

  // flip2-pair: both threads take exactly two atomic steps, so the
  // schedule tree has C(4,2) = 6 leaves.
  {
    ScenarioInstance scn = scenario("flip2-pair");
    ExplorationReport dfs = explore_exhaustive(scn, b);
    nlcheck_test::NaiveReport naive = naive_enumerate(scn, b);
    CHECK(dfs.executions_explored == 6);
    CHECK(naive.leaves == 6);
    CHECK(dfs.outcomes == naive.outcomes);
    CHECK(dfs.violations.empty());
    CHECK(naive.violating_executions == 0);
  }

  // e-qqc(1): four main steps against two interferer steps, C(6,2) = 15.
  {
    ScenarioInstance scn = scenario("e-qqc", {{"n", "1"}});
    ExplorationReport dfs = explore_exhaustive(scn, b);
    nlcheck_test::NaiveReport naive = naive_enumerate(scn, b);
    CHECK(dfs.executions_explored == 15);
    CHECK(naive.leaves == 15);
    CHECK(dfs.outcomes == naive.outcomes);
    CHECK(dfs.violations.empty());
  }

  // exchange-pair: branchy control flow; counts must still agree.
  {
    ScenarioInstance scn = scenario("exchange-pair");
    ExplorationReport dfs = explore_exhaustive(scn, b);
    nlcheck_test::NaiveReport naive = naive_enumerate(scn, b);
    CHECK(dfs.executions_explored == naive.leaves);
    CHECK(dfs.outcomes == naive.outcomes);
  }
}

TEST_CASE("pruning on step budget is reported") {
  ScenarioInstance scn = scenario("e-qqc", {{"n", "2"}});
  Bounds tight;
  tight.max_steps = 3;
  ExplorationReport r = explore_exhaustive(scn, tight);
  CHECK(r.executions_complete == 0);
  CHECK(r.executions_pruned == r.executions_explored);
  CHECK(r.outcomes.empty());
  CHECK(r.budget_warning);
}

TEST_CASE("e-qqc compiles to the expected step counts") {
  ScenarioInstance scn = scenario("e-qqc", {{"n", "2"}});
  Bounds b;
  Execution e(scn, b);
  while (!e.finished()) e.step(e.runnable().front());
  CHECK(e.complete());
  CHECK(e.thread_steps(0) == 4);      // two calls, two atomic steps each
  CHECK(e.thread_steps(1) == 2 * 2);  // n calls, two atomic steps each
}
