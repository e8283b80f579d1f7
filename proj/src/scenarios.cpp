#include "nlcheck/scenarios.hpp"

#include <algorithm>
#include <sstream>

#include "nlcheck/programs.hpp"

namespace nlcheck {

// ---------------------------------------------------------------------------
// History shape helpers.

bool grows_notwins(const std::vector<Timestamp>& ts) {
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (!(ts[i] < ts[i + 1])) return false;
  for (Timestamp t : ts)
    for (Timestamp u : ts)
      if (u == twin_timestamp(t)) return false;
  return true;
}

ExchangeHistory zip_history(const std::vector<Timestamp>& ts,
                            const std::vector<Value>& vs,
                            const std::vector<Value>& ws) {
  if (ts.size() != vs.size() || vs.size() != ws.size())
    throw precondition_error("zip_history: length mismatch");
  ExchangeHistory h;
  for (std::size_t i = 0; i < ts.size(); ++i)
    h.insert(ts[i], ExchangeEntry{vs[i], ws[i]});
  return h;
}

std::vector<Violation> check_zip_post(const ExchangeHistory& hist,
                                      const std::vector<Timestamp>& ts,
                                      const std::vector<Value>& vs,
                                      const std::vector<Value>& ws) {
  std::vector<Violation> out;
  if (ts.size() != vs.size() || vs.size() != ws.size()) {
    out.push_back({"zip.lengths", "list lengths differ"});
    return out;
  }
  if (!(hist == zip_history(ts, vs, ws)))
    out.push_back({"zip.shape",
                   "history does not pair the given and received lists in "
                   "timestamp order"});
  if (!grows_notwins(ts))
    out.push_back({"zip.timestamps",
                   "timestamps are not strictly increasing and twin-free"});
  return out;
}

// ---------------------------------------------------------------------------
// Parameter plumbing.

namespace {

long parse_long(const std::string& name, const std::string& text) {
  try {
    std::size_t pos = 0;
    long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw config_error("parameter " + name + ": cannot parse '" + text + "'");
  }
}

long get_long(const std::map<std::string, std::string>& params,
              const std::string& name, long dflt) {
  auto it = params.find(name);
  if (it == params.end()) return dflt;
  return parse_long(name, it->second);
}

std::vector<Value> parse_values(const std::string& name,
                                const std::string& text) {
  std::vector<Value> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_long(name, item));
  if (out.empty())
    throw config_error("parameter " + name + ": empty list");
  return out;
}

std::vector<Value> get_values(const std::map<std::string, std::string>& params,
                              const std::string& name,
                              const std::string& dflt) {
  auto it = params.find(name);
  return parse_values(name, it == params.end() ? dflt : it->second);
}

std::string fmt_values(const std::vector<Value>& vs) {
  std::string s = "[";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(vs[i]);
  }
  return s + "]";
}

void reject_unknown(const ScenarioDef& def,
                    const std::map<std::string, std::string>& params) {
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const ParamDoc& p : def.params)
      if (p.name == k) known = true;
    if (!known)
      throw config_error("scenario " + def.name + ": unknown parameter " + k);
  }
}

std::vector<Timestamp> history_timestamps(const ExchangeHistory& h) {
  std::vector<Timestamp> ts;
  for (const auto& [t, e] : h) ts.push_back(t);
  return ts;
}

void check_distinct_results(const std::vector<std::int64_t>& all,
                            ExecutionSink& sink) {
  std::vector<std::int64_t> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] == sorted[i + 1])
      sink.violation("final.distinct-results",
                     "result " + std::to_string(sorted[i]) +
                         " was returned twice");
}

void check_flip_pair_history(const FlipState& fl, ExecutionSink& sink) {
  // Two flip2 calls write exactly [1, 0, 1, 0], two entries per thread.
  FlipHistory expected;
  expected.insert(0, 1);
  expected.insert(1, 0);
  expected.insert(2, 1);
  expected.insert(3, 0);
  if (!(fl.combined_history() == expected))
    sink.violation("final.history-shape",
                   "combined flip history is not [1,0,1,0]");
  for (int i = 0; i < fl.view_count(); ++i)
    if (fl.view(i).self_hist.size() != 2)
      sink.violation("final.contribution",
                     "thread " + std::to_string(i) + " contributed " +
                         std::to_string(fl.view(i).self_hist.size()) +
                         " flips instead of 2");
}

// Interferer contract at a join point: all its calls finished (no alive
// tokens) and it contributed exactly `calls` history entries.
void check_interferer_contract(const NetworkState& cn, int view, long calls,
                               ExecutionSink& sink) {
  if (!cn.view(view).all_tokens().empty())
    sink.violation("final.interferer-tokens",
                   "interferer still holds " +
                       cn.view(view).all_tokens().str());
  if (static_cast<long>(cn.view(view).self_hist.size()) != calls)
    sink.violation("final.interferer-contribution",
                   "interferer contributed " +
                       std::to_string(cn.view(view).self_hist.size()) +
                       " entries, expected " + std::to_string(calls));
}

// ---------------------------------------------------------------------------
// exchange-pair

ScenarioInstance make_exchange_pair(Value v1, Value v2) {
  ScenarioInstance scn;
  scn.name = "exchange-pair";
  scn.params = {{"v1", std::to_string(v1)}, {"v2", std::to_string(v2)}};
  scn.native_object = "exchanger";
  scn.build = [v1, v2](const Bounds& b) {
    ScenarioBuild sb;
    sb.world.exchanger.emplace(2);
    sb.threads.push_back(
        {std::make_unique<ExchangeOnceProgram>(0, v1, b.yield_count), 0});
    sb.threads.push_back(
        {std::make_unique<ExchangeOnceProgram>(1, v2, b.yield_count), 0});
    sb.on_terminal = [v1, v2](World& w,
                              const std::vector<const ThreadProgram*>& ps,
                              ExecutionSink& sink) {
      auto r1 = static_cast<const ExchangeOnceProgram*>(ps[0])->result();
      auto r2 = static_cast<const ExchangeOnceProgram*>(ps[1])->result();
      sink.set_outcome(
          {format_exchange_result(r1), format_exchange_result(r2)});
      bool both_none = !r1 && !r2;
      bool swapped = r1 && r2 && *r1 == v2 && *r2 == v1;
      if (!both_none && !swapped)
        sink.violation("final.outcome",
                       "(" + format_exchange_result(r1) + ", " +
                           format_exchange_result(r2) +
                           ") is neither a double failure nor the swap");
      if (swapped) sink.witness("elimination");
      sink.report(ex_check_teardown(*w.exchanger));
    };
    return sb;
  };
  return scn;
}

// ---------------------------------------------------------------------------
// flip2-pair

ScenarioInstance make_flip2_pair() {
  ScenarioInstance scn;
  scn.name = "flip2-pair";
  scn.build = [](const Bounds&) {
    ScenarioBuild sb;
    sb.world.flip.emplace(2, 0);
    sb.threads.push_back({std::make_unique<Flip2Program>(0), 0});
    sb.threads.push_back({std::make_unique<Flip2Program>(1), 0});
    sb.on_terminal = [](World& w, const std::vector<const ThreadProgram*>& ps,
                        ExecutionSink& sink) {
      int r1 = static_cast<const Flip2Program*>(ps[0])->result();
      int r2 = static_cast<const Flip2Program*>(ps[1])->result();
      sink.set_outcome({std::to_string(r1), std::to_string(r2)});
      if (r1 + r2 != 2)
        sink.violation("final.sum", "r1 + r2 = " + std::to_string(r1 + r2));
      check_flip_pair_history(*w.flip, sink);
    };
    return sb;
  };
  return scn;
}

// ---------------------------------------------------------------------------
// fig1-combined: each thread double-flips, then the two threads exchange
// their flip2 results.

ScenarioInstance make_fig1_combined() {
  ScenarioInstance scn;
  scn.name = "fig1-combined";
  scn.build = [](const Bounds& b) {
    ScenarioBuild sb;
    sb.world.flip.emplace(2, 0);
    sb.world.exchanger.emplace(2);
    sb.threads.push_back(
        {std::make_unique<Flip2ThenExchangeProgram>(0, b.yield_count), 0});
    sb.threads.push_back(
        {std::make_unique<Flip2ThenExchangeProgram>(1, b.yield_count), 0});
    sb.on_terminal = [](World& w, const std::vector<const ThreadProgram*>& ps,
                        ExecutionSink& sink) {
      const auto* p1 = static_cast<const Flip2ThenExchangeProgram*>(ps[0]);
      const auto* p2 = static_cast<const Flip2ThenExchangeProgram*>(ps[1]);
      int r1 = p1->flip_result();
      int r2 = p2->flip_result();
      std::optional<Value> s1 = p1->exchange_result();
      std::optional<Value> s2 = p2->exchange_result();
      sink.set_outcome({std::to_string(r1), std::to_string(r2),
                        format_exchange_result(s1),
                        format_exchange_result(s2)});
      long t = (s1 && s2) ? static_cast<long>(*s1 + *s2) : 2;
      if (t != 2)
        sink.violation("final.t", "t = " + std::to_string(t));
      if (s1 && s2 && (*s1 != r2 || *s2 != r1))
        sink.violation("final.cross-receive",
                       "a successful exchange did not deliver the partner's "
                       "flip2 result");
      if (s1 && s2) sink.witness("elimination");
      check_flip_pair_history(*w.flip, sink);
      sink.report(ex_check_teardown(*w.exchanger));
    };
    return sb;
  };
  return scn;
}

// ---------------------------------------------------------------------------
// ex-seq: two threads exchange equal-length lists element by element, with
// retrying exchanges.

ScenarioInstance make_ex_seq(std::vector<Value> vs1, std::vector<Value> vs2) {
  ScenarioInstance scn;
  scn.name = "ex-seq";
  scn.params = {{"vs1", fmt_values(vs1)}, {"vs2", fmt_values(vs2)}};
  scn.native_object = "exchanger";
  scn.build = [vs1, vs2](const Bounds& b) {
    ScenarioBuild sb;
    sb.world.exchanger.emplace(2);
    sb.threads.push_back({std::make_unique<ExSeqProgram>(
                              0, vs1, b.yield_count, b.retry_bound),
                          0});
    sb.threads.push_back({std::make_unique<ExSeqProgram>(
                              1, vs2, b.yield_count, b.retry_bound),
                          0});
    sb.on_terminal = [vs1, vs2](World& w,
                                const std::vector<const ThreadProgram*>& ps,
                                ExecutionSink& sink) {
      const auto* p1 = static_cast<const ExSeqProgram*>(ps[0]);
      const auto* p2 = static_cast<const ExSeqProgram*>(ps[1]);
      sink.set_outcome({fmt_values(p1->received()), fmt_values(p2->received())});
      if (p1->received() != vs2 || p2->received() != vs1)
        sink.violation("final.sequence",
                       "the lists were not exchanged for each other");

      const ExchangerState& ex = *w.exchanger;
      std::vector<Timestamp> ts1 = history_timestamps(ex.view(0).self_hist);
      std::vector<Timestamp> ts2 = history_timestamps(ex.view(1).self_hist);
      sink.report(
          check_zip_post(ex.view(0).self_hist, ts1, vs1, p1->received()));
      sink.report(
          check_zip_post(ex.view(1).self_hist, ts2, vs2, p2->received()));

      // With nobody else around, the two threads hold exactly each
      // other's twins.
      std::vector<Timestamp> twins;
      for (Timestamp t : ts1) twins.push_back(twin_timestamp(t));
      std::sort(twins.begin(), twins.end());
      if (twins != ts2)
        sink.violation("final.twin-image",
                       "the second thread's timestamps are not the twins of "
                       "the first's");
      sink.report(ex_check_teardown(ex));
    };
    return sb;
  };
  return scn;
}

// ---------------------------------------------------------------------------
// e-qc: getAndInc twice in a row, each call racing an interferer that
// makes k complete calls; the two parallel compositions are separated by a
// join, so a quiescent moment exists between them.

ScenarioInstance make_e_qc(long k) {
  ScenarioInstance scn;
  scn.name = "e-qc";
  scn.params = {{"k", std::to_string(k)}};
  scn.native_object = "network";
  scn.build = [k](const Bounds&) {
    ScenarioBuild sb;
    sb.world.network.emplace(3);  // views: 0 = main, 1 and 2 = interferers
    sb.threads.push_back(
        {std::make_unique<IncSeqProgram>(0, 1), /*phase=*/0});
    sb.threads.push_back(
        {std::make_unique<IncSeqProgram>(1, static_cast<int>(k)), 0});
    sb.threads.push_back({std::make_unique<IncSeqProgram>(0, 1), 1});
    sb.threads.push_back(
        {std::make_unique<IncSeqProgram>(2, static_cast<int>(k)), 1});
    sb.on_phase_end = [k](int phase, World& w, ExecutionSink& sink) {
      NetworkState& cn = *w.network;
      int helper_view = phase == 0 ? 1 : 2;
      check_interferer_contract(cn, helper_view, k, sink);
      // Thread join: the interferer's contribution folds into the main
      // thread's view.
      cn.merge_views(helper_view, 0);
    };
    sb.on_terminal = [](World& w, const std::vector<const ThreadProgram*>& ps,
                        ExecutionSink& sink) {
      auto res1 = static_cast<const IncSeqProgram*>(ps[0])->results().at(0);
      auto res2 = static_cast<const IncSeqProgram*>(ps[2])->results().at(0);
      sink.set_outcome({std::to_string(res1), std::to_string(res2)});
      if (!(res1 < res2))
        sink.violation("final.quiescent-order",
                       std::to_string(res1) + " !< " + std::to_string(res2));
      std::vector<std::int64_t> all;
      for (const ThreadProgram* p : ps)
        for (std::int64_t r : static_cast<const IncSeqProgram*>(p)->results())
          all.push_back(r);
      check_distinct_results(all, sink);
      sink.report(cn_check_teardown(*w.network));
    };
    return sb;
  };
  return scn;
}

// ---------------------------------------------------------------------------
// e-qqc: two sequential getAndInc calls racing one interferer making n
// calls; results may reorder, but by less than 2n.

ScenarioInstance make_e_qqc(long n) {
  ScenarioInstance scn;
  scn.name = "e-qqc";
  scn.params = {{"n", std::to_string(n)}};
  scn.native_object = "network";
  scn.build = [n](const Bounds&) {
    ScenarioBuild sb;
    sb.world.network.emplace(2);
    sb.threads.push_back({std::make_unique<IncSeqProgram>(0, 2), 0});
    sb.threads.push_back(
        {std::make_unique<IncSeqProgram>(1, static_cast<int>(n)), 0});
    sb.on_terminal = [n](World& w, const std::vector<const ThreadProgram*>& ps,
                         ExecutionSink& sink) {
      const auto* main = static_cast<const IncSeqProgram*>(ps[0]);
      const auto* interferer = static_cast<const IncSeqProgram*>(ps[1]);
      auto res1 = main->results().at(0);
      auto res2 = main->results().at(1);
      sink.set_outcome({std::to_string(res1), std::to_string(res2)});
      if (!(res1 < res2 + 2 * n))
        sink.violation("final.reorder-bound",
                       std::to_string(res1) + " !< " + std::to_string(res2) +
                           " + 2*" + std::to_string(n));
      if (res1 > res2) sink.witness("reorder");
      sink.stat_max("max_reorder_gap", static_cast<long>(res1 - res2));
      std::vector<std::int64_t> all = main->results();
      for (std::int64_t r : interferer->results()) all.push_back(r);
      check_distinct_results(all, sink);
      check_interferer_contract(*w.network, 1, n, sink);
      sink.report(cn_check_teardown(*w.network));
    };
    return sb;
  };
  return scn;
}

// ---------------------------------------------------------------------------
// Registry.

long require_range(const std::map<std::string, std::string>& params,
                   const std::string& name, long dflt, long lo, long hi,
                   const std::string& mode, long exhaustive_hi) {
  long v = get_long(params, name, dflt);
  if (v < lo || v > hi)
    throw config_error("parameter " + name + "=" + std::to_string(v) +
                       " is out of range [" + std::to_string(lo) + "," +
                       std::to_string(hi) + "]");
  if (mode == "exhaustive" && v > exhaustive_hi)
    throw config_error("parameter " + name + "=" + std::to_string(v) +
                       " exceeds the exhaustive-mode limit " +
                       std::to_string(exhaustive_hi));
  return v;
}

}  // namespace

const std::vector<ScenarioDef>& scenario_registry() {
  static const std::vector<ScenarioDef> defs = [] {
    std::vector<ScenarioDef> v;

    {
      ScenarioDef d;
      d.name = "exchange-pair";
      d.summary = "two threads attempt one value exchange each";
      d.checks =
          "outcomes are exactly {(None,None), (Some v2, Some v1)}; all "
          "object invariants and per-call postconditions hold at every step";
      d.params = {{"v1", "value offered by thread 1", "1"},
                  {"v2", "value offered by thread 2", "2"}};
      d.native_object = "exchanger";
      d.validate = [](const auto& params, const std::string&) {
        long v1 = get_long(params, "v1", 1);
        long v2 = get_long(params, "v2", 2);
        if (v1 == v2)
          throw config_error("v1 and v2 must be distinct");
      };
      d.make = [](const auto& params) {
        return make_exchange_pair(get_long(params, "v1", 1),
                                  get_long(params, "v2", 2));
      };
      v.push_back(std::move(d));
    }

    {
      ScenarioDef d;
      d.name = "flip2-pair";
      d.summary = "two threads double-flip a shared bit";
      d.checks =
          "r1 + r2 = 2 in every interleaving; the four history entries are "
          "a permutation of [1,0,1,0]";
      d.validate = [](const auto&, const std::string&) {};
      d.make = [](const auto&) { return make_flip2_pair(); };
      v.push_back(std::move(d));
    }

    {
      ScenarioDef d;
      d.name = "fig1-combined";
      d.summary = "double-flip, then exchange the flip2 results";
      d.checks =
          "t = 2 in every terminal state; on a double success each side "
          "receives the partner's flip2 result";
      d.validate = [](const auto&, const std::string&) {};
      d.make = [](const auto&) { return make_fig1_combined(); };
      v.push_back(std::move(d));
    }

    {
      ScenarioDef d;
      d.name = "ex-seq";
      d.summary = "two threads exchange equal-length lists, with retries";
      d.checks =
          "every complete execution returns (vs2, vs1); per-thread "
          "histories zip the lists at increasing twin-free timestamps";
      d.params = {{"vs1", "comma-separated list for thread 1", "10,11"},
                  {"vs2", "comma-separated list for thread 2", "20,21"}};
      d.native_object = "exchanger";
      d.validate = [](const auto& params, const std::string& mode) {
        auto vs1 = get_values(params, "vs1", "10,11");
        auto vs2 = get_values(params, "vs2", "20,21");
        if (vs1.size() != vs2.size())
          throw config_error("vs1 and vs2 must have equal length");
        if (mode == "exhaustive" && vs1.size() > 3)
          throw config_error("lists longer than 3 exceed the "
                             "exhaustive-mode limit");
      };
      d.make = [](const auto& params) {
        return make_ex_seq(get_values(params, "vs1", "10,11"),
                           get_values(params, "vs2", "20,21"));
      };
      v.push_back(std::move(d));
    }

    {
      ScenarioDef d;
      d.name = "e-qc";
      d.summary =
          "counter incremented twice with a quiescent moment in between";
      d.checks =
          "res1 < res2 in every complete execution (in-order results across "
          "quiescence); all results pairwise distinct";
      d.params = {{"k", "calls per interferer", "1"}};
      d.native_object = "network";
      d.validate = [](const auto& params, const std::string& mode) {
        require_range(params, "k", 1, 0, 1000000, mode, 2);
      };
      d.make = [](const auto& params) {
        return make_e_qc(get_long(params, "k", 1));
      };
      v.push_back(std::move(d));
    }

    {
      ScenarioDef d;
      d.name = "e-qqc";
      d.summary = "two back-to-back increments racing n interfering calls";
      d.checks =
          "res1 < res2 + 2*n in every execution; all results pairwise "
          "distinct; a reordering witness (res1 > res2) exists for n >= 1";
      d.params = {{"n", "interfering calls", "1"}};
      d.native_object = "network";
      d.validate = [](const auto& params, const std::string& mode) {
        require_range(params, "n", 1, 0, 1000000, mode, 4);
      };
      d.make = [](const auto& params) {
        return make_e_qqc(get_long(params, "n", 1));
      };
      v.push_back(std::move(d));
    }

    return v;
  }();
  return defs;
}

const ScenarioDef* find_scenario(const std::string& name) {
  for (const ScenarioDef& d : scenario_registry())
    if (d.name == name) return &d;
  return nullptr;
}

ScenarioInstance make_scenario(const std::string& name,
                               const std::map<std::string, std::string>& params,
                               const std::string& mode) {
  const ScenarioDef* def = find_scenario(name);
  if (def == nullptr) throw config_error("unknown scenario: " + name);
  reject_unknown(*def, params);
  def->validate(params, mode);
  ScenarioInstance scn = def->make(params);
  scn.native_object = def->native_object;
  return scn;
}

}  // namespace nlcheck
