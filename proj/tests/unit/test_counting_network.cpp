#include <doctest.h>

#include "nlcheck/counting_network.hpp"

using namespace nlcheck;

namespace {

bool has_clause(const std::vector<Violation>& vs, const std::string& clause) {
  for (const Violation& v : vs)
    if (v.clause == clause) return true;
  return false;
}

IncCallRecord snapshot_call(const NetworkState& s, int view) {
  IncCallRecord rec;
  rec.view = view;
  rec.self_hist_at_start = s.view(view).self_hist;
  rec.env_hist_at_start = s.env_history(view);
  rec.env_tokens_at_start = {s.env_tokens(view, 0), s.env_tokens(view, 1)};
  rec.self_tokens_at_start = s.view(view).tokens;
  return rec;
}

}  // namespace

TEST_CASE("initial network state") {
  NetworkState s(2);
  CHECK(s.bal() == 0);
  CHECK(s.counter(0) == 0);
  CHECK(s.counter(1) == 1);

  // 1 even entry + 0 even tokens == 1 odd entry + 0 odd tokens + bal 0.
  CHECK(cn_check_invariants(s).empty());

  NetworkHistory combined = s.combined_history();
  CHECK(combined.size() == 2);
  CHECK(*last_timestamp(combined) == 1);
  CHECK(spent_tokens(combined) == TokenSet({0, 1}));
  CHECK(combined.find(0)->spent == 0);
  CHECK(combined.find(1)->spent == 1);

  // The initial entries belong to nobody's self part.
  CHECK(s.view(0).self_hist.empty());
  CHECK(s.env_history(0).size() == 2);
}

TEST_CASE("flip hands out fresh tokens") {
  NetworkState s(2);
  auto r1 = s.step_flip(0);
  CHECK(r1.previous == 0);
  CHECK(s.bal() == 1);
  CHECK(r1.token.parity == 0);
  CHECK(r1.token.id == 2);  // 0 and 1 are the initializer's
  CHECK(s.view(0).tokens[0].contains(r1.token.id));
  CHECK(cn_check_invariants(s).empty());

  auto r2 = s.step_flip(1);
  CHECK(r2.previous == 1);
  CHECK(s.bal() == 0);
  CHECK(r2.token.parity == 1);
  CHECK(r2.token.id == 3);
  CHECK(cn_check_invariants(s).empty());
}

TEST_CASE("faa2 spends the token and logs the snapshot") {
  NetworkState s(2);
  auto f = s.step_flip(0);
  auto res = s.step_faa2(0, f.token);
  CHECK(res == 0);
  CHECK(s.counter(0) == 2);
  const NetworkEntry* e = s.view(0).self_hist.find(2);
  REQUIRE(e != nullptr);
  CHECK(e->spent == f.token.id);
  CHECK(e->alive_snapshot.contains(f.token.id));
  CHECK(s.view(0).tokens[0].empty());
  CHECK(cn_check_invariants(s).empty());
  CHECK(cn_check_teardown(s).empty());

  // Double spend is a precondition violation.
  CHECK_THROWS_AS(s.step_faa2(0, f.token), precondition_error);
}

TEST_CASE("out-of-order results, step by step") {
  // One thread is suspended right after its flip; the other does two full
  // calls and sees 1 before 0.
  NetworkState s(2);
  auto t1 = s.step_flip(0);  // thread 0: directed to c0, then stalls
  CHECK(cn_check_invariants(s).empty());

  auto t2 = s.step_flip(1);  // thread 1: directed to c1
  CHECK(t2.token.parity == 1);
  CHECK(cn_check_invariants(s).empty());
  CHECK(s.step_faa2(1, t2.token) == 1);
  CHECK(cn_check_invariants(s).empty());

  auto t3 = s.step_flip(1);  // thread 1 again: directed to c0
  CHECK(t3.token.parity == 0);
  CHECK(cn_check_invariants(s).empty());
  CHECK(s.step_faa2(1, t3.token) == 0);  // 0 arrives after 1
  CHECK(cn_check_invariants(s).empty());

  // The suspended thread finishes; the counters even out.
  CHECK(s.step_faa2(0, t1.token) == 2);
  CHECK(cn_check_invariants(s).empty());
  CHECK(cn_check_teardown(s).empty());
}

TEST_CASE("token partition rejects forged components") {
  NetworkHistory combined;
  combined.insert(0, NetworkEntry{TokenSet{0}, 0});
  combined.insert(1, NetworkEntry{TokenSet{1}, 1});

  CHECK(cn_check_token_partition(TokenSet{}, TokenSet{}, combined).empty());

  // A spent token that is still alive.
  CHECK(has_clause(cn_check_token_partition(TokenSet{0}, TokenSet{}, combined),
                   "cn.token-disjoint"));

  // The same token alive with both parities.
  CHECK(has_clause(cn_check_token_partition(TokenSet{5}, TokenSet{5}, combined),
                   "cn.token-disjoint"));

  // A double spend.
  NetworkHistory doubled = combined;
  doubled.insert(2, NetworkEntry{TokenSet{1}, 1});
  CHECK(has_clause(cn_check_token_partition(TokenSet{}, TokenSet{}, doubled),
                   "cn.token-disjoint"));
}

TEST_CASE("postcondition of a solo call") {
  NetworkState s(1);
  IncCallRecord rec = snapshot_call(s, 0);
  CHECK(cn_check_snapshot_coherence(rec).empty());

  auto f = s.step_flip(0);
  rec.result = s.step_faa2(0, f.token);
  rec.completed = true;
  CHECK(rec.result == 0);
  CHECK(*last_timestamp(rec.env_hist_at_start) == 1);  // 1 < res + 2
  CHECK(cn_check_post(rec, s).empty());
}

TEST_CASE("post checker rejects a forged result") {
  NetworkState s(1);
  IncCallRecord rec = snapshot_call(s, 0);
  auto f = s.step_flip(0);
  rec.result = s.step_faa2(0, f.token);
  rec.completed = true;

  // Claiming a smaller result breaks the delta key.
  IncCallRecord forged = rec;
  forged.result = rec.result - 2;
  CHECK(has_clause(cn_check_post(forged, s), "cn.post-entry-key"));

  // A pre-state history forged to reach past the commit breaks the bound.
  IncCallRecord stale = rec;
  stale.env_hist_at_start.insert(41, NetworkEntry{TokenSet{90}, 90});
  auto vs = cn_check_post(stale, s);
  CHECK(has_clause(vs, "cn.post-last-bound"));
  CHECK(has_clause(vs, "cn.respast-bound"));
}

TEST_CASE("respast flags a recycled token") {
  NetworkState s(2);
  auto f0 = s.step_flip(0);

  // Thread 1 runs a full call while thread 0's token is alive; thread 0's
  // token appears in thread 1's snapshot.
  IncCallRecord rec = snapshot_call(s, 1);
  auto f1 = s.step_flip(1);
  rec.result = s.step_faa2(1, f1.token);
  rec.completed = true;
  CHECK(cn_check_post(rec, s).empty());

  // If the past already mentioned the spent token, freshness fails.
  NetworkHistory past = rec.self_hist_at_start.joined(rec.env_hist_at_start);
  NetworkHistory tainted = past;
  tainted.insert(40, NetworkEntry{TokenSet{f1.token.id}, 99});
  const NetworkEntry* committed = s.view(1).self_hist.find(rec.result + 2);
  REQUIRE(committed != nullptr);
  CHECK(has_clause(cn_respast(tainted, rec.result, committed->alive_snapshot,
                              committed->spent, s, 1),
                   "cn.respast-fresh"));

  s.step_faa2(0, f0.token);
  CHECK(cn_check_invariants(s).empty());
}

TEST_CASE("merge views moves the contribution") {
  NetworkState s(3);
  auto f = s.step_flip(1);
  s.step_faa2(1, f.token);
  CHECK(s.view(1).self_hist.size() == 1);

  s.merge_views(1, 0);
  CHECK(s.view(1).self_hist.empty());
  CHECK(s.view(0).self_hist.size() == 1);
  CHECK(cn_check_invariants(s).empty());

  // The moved entry is out of the mover's environment now.
  CHECK(s.env_history(0).size() == 2);  // just the initializer part
}
