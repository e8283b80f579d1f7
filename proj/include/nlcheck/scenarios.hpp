#pragma once

// The registered client scenarios. Every scenario is closed-world: the
// threads listed are the only ones touching the objects, so at the end of
// a complete execution the combined environment is empty, which the
// teardown checks assert.

#include <map>
#include <string>
#include <vector>

#include "nlcheck/explorer.hpp"

namespace nlcheck {

struct ParamDoc {
  std::string name;
  std::string summary;
  std::string default_value;
};

struct ScenarioDef {
  std::string name;
  std::string summary;
  std::string checks;  // the properties the final assertion enforces
  std::vector<ParamDoc> params;
  std::string native_object;  // empty when native mode is unsupported

  std::function<ScenarioInstance(
      const std::map<std::string, std::string>& params)>
      make;
  // Throws config_error when the parameters are out of range for the mode.
  std::function<void(const std::map<std::string, std::string>& params,
                     const std::string& mode)>
      validate;
};

const std::vector<ScenarioDef>& scenario_registry();
const ScenarioDef* find_scenario(const std::string& name);

// Builds an instance after validating the parameters for `mode`.
ScenarioInstance make_scenario(const std::string& name,
                               const std::map<std::string, std::string>& params,
                               const std::string& mode);

// --------------------------------------------------------------------------
// History shape helpers for the sequenced-exchange client.

// Strictly increasing and free of twin pairs.
bool grows_notwins(const std::vector<Timestamp>& ts);

// The join of the singleton histories t_i -> (v_i, w_i).
ExchangeHistory zip_history(const std::vector<Timestamp>& ts,
                            const std::vector<Value>& vs,
                            const std::vector<Value>& ws);

// hist is exactly zip(ts, vs, ws) and ts grows without twins.
std::vector<Violation> check_zip_post(const ExchangeHistory& hist,
                                      const std::vector<Timestamp>& ts,
                                      const std::vector<Value>& vs,
                                      const std::vector<Value>& ws);

}  // namespace nlcheck
