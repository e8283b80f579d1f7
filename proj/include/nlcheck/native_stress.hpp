#pragma once

// Native-thread stress runs of the two lock-free objects against hardware
// atomics (sequentially consistent), with ghost state disabled. End-to-end
// result checks run after the join: distinctness and counter totals for
// the network, bijective pairing of successes for the exchanger.

#include <cstdint>
#include <string>
#include <vector>

namespace nlcheck {

struct StressCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct StressReport {
  std::string object;
  int threads = 0;
  long ops_per_thread = 0;
  std::uint64_t seed = 0;
  long successes = 0;  // exchanger: successful exchanges across all threads
  std::vector<StressCheck> checks;

  bool ok() const {
    for (const StressCheck& c : checks)
      if (!c.ok) return false;
    return true;
  }
  std::string summary() const;
  std::string to_json() const;
};

StressReport stress_network(int threads, long ops_per_thread,
                            std::uint64_t seed);
StressReport stress_exchanger(int threads, long ops_per_thread,
                              std::uint64_t seed, int retry_bound);

}  // namespace nlcheck
