#pragma once

// Independent oracle for the exhaustive explorer: a plain recursive
// enumerator that clones the whole execution state at every branch point
// instead of replaying schedule prefixes. Kept out of the main library on
// purpose; the two implementations share only the scenario construction.

#include <map>

#include "nlcheck/explorer.hpp"

namespace nlcheck_test {

struct NaiveReport {
  std::map<nlcheck::Outcome, long> outcomes;
  long leaves = 0;
  long complete = 0;
  long pruned = 0;
  long violating_executions = 0;
};

inline void naive_go(const nlcheck::Execution& e, NaiveReport& r) {
  if (e.finished()) {
    ++r.leaves;
    if (e.complete()) {
      ++r.complete;
      ++r.outcomes[e.outcome()];
    } else {
      ++r.pruned;
    }
    if (!e.violations().empty()) ++r.violating_executions;
    return;
  }
  for (int tid : e.runnable()) {
    nlcheck::Execution branch = e;  // deep copy: true state snapshotting
    branch.step(tid);
    naive_go(branch, r);
  }
}

inline NaiveReport naive_enumerate(const nlcheck::ScenarioInstance& scn,
                                   const nlcheck::Bounds& bounds) {
  NaiveReport r;
  nlcheck::Execution root(scn, bounds);
  naive_go(root, r);
  return r;
}

}  // namespace nlcheck_test
