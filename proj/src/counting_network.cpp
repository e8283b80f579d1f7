#include "nlcheck/counting_network.hpp"

#include <ostream>

namespace nlcheck {

std::ostream& operator<<(std::ostream& os, const NetworkEntry& e) {
  return os << "(" << e.alive_snapshot.str() << "," << e.spent << ")";
}

TokenSet spent_tokens(const NetworkHistory& h) {
  TokenSet out;
  for (const auto& [t, e] : h) out = out.united(TokenSet{e.spent});
  return out;
}

namespace {

NetworkHistory parity_slice(const NetworkHistory& h, int parity) {
  NetworkHistory out;
  for (const auto& [t, e] : h)
    if ((t % 2 + 2) % 2 == parity) out.insert(t, e);
  return out;
}

void fail(std::vector<Violation>& out, std::string clause, std::string detail) {
  out.push_back(Violation{std::move(clause), std::move(detail)});
}

}  // namespace

NetworkState::NetworkState(int view_count)
    : views_(static_cast<std::size_t>(view_count)) {
  // The counters' initial values 0 and 1 come with history entries of their
  // own, charged to tokens 0 and 1, which are born spent.
  init_hist_.insert(0, NetworkEntry{TokenSet{0}, 0});
  init_hist_.insert(1, NetworkEntry{TokenSet{1}, 1});
}

NetworkState::FlipResult NetworkState::step_flip(int view) {
  int previous = bal_;
  bal_ = 1 - bal_;
  Token z{next_token_id_++, previous};
  view_mut(view).tokens[static_cast<std::size_t>(previous)].add(z.id);
  ++flips_executed_;
  return FlipResult{previous, z};
}

std::int64_t NetworkState::step_faa2(int view, Token z) {
  NetworkView& me = view_mut(view);
  TokenSet& mine = me.tokens[static_cast<std::size_t>(z.parity)];
  if (!mine.contains(z.id))
    throw precondition_error("step_faa2: token " + std::to_string(z.id) +
                             " is not alive in the calling thread");
  // Snapshot every alive token before spending z, so z itself is included.
  TokenSet snapshot = alive_tokens(0).joined(alive_tokens(1));
  std::int64_t old = counters_[static_cast<std::size_t>(z.parity)];
  counters_[static_cast<std::size_t>(z.parity)] = old + 2;
  me.self_hist.insert(old + 2, NetworkEntry{snapshot, z.id});
  mine.remove(z.id);
  ++adds_executed_;
  return old;
}

NetworkHistory NetworkState::combined_history() const {
  NetworkHistory h = init_hist_;
  for (const NetworkView& v : views_) h = h.joined(v.self_hist);
  return h;
}

NetworkHistory NetworkState::env_history(int view) const {
  NetworkHistory h = init_hist_;
  for (int i = 0; i < view_count(); ++i)
    if (i != view) h = h.joined(views_[static_cast<std::size_t>(i)].self_hist);
  return h;
}

TokenSet NetworkState::alive_tokens(int parity) const {
  TokenSet out;
  for (const NetworkView& v : views_)
    out = out.joined(v.tokens[static_cast<std::size_t>(parity)]);
  return out;
}

TokenSet NetworkState::env_tokens(int view, int parity) const {
  TokenSet out;
  for (int i = 0; i < view_count(); ++i)
    if (i != view)
      out = out.joined(
          views_[static_cast<std::size_t>(i)].tokens[static_cast<std::size_t>(parity)]);
  return out;
}

void NetworkState::merge_views(int from, int to) {
  if (from == to) throw precondition_error("merge_views: from == to");
  NetworkView& src = view_mut(from);
  NetworkView& dst = view_mut(to);
  for (int p = 0; p < 2; ++p) {
    dst.tokens[static_cast<std::size_t>(p)] =
        dst.tokens[static_cast<std::size_t>(p)].joined(
            src.tokens[static_cast<std::size_t>(p)]);
  }
  dst.self_hist = dst.self_hist.joined(src.self_hist);
  src = NetworkView{};
}

std::vector<Violation> cn_check_token_partition(
    const TokenSet& alive0, const TokenSet& alive1,
    const NetworkHistory& combined) {
  std::vector<Violation> out;
  TokenSet spent = spent_tokens(combined);
  if (spent.size() != combined.size())
    fail(out, "cn.token-disjoint", "a token was spent more than once");
  if (!alive0.disjoint_with(alive1))
    fail(out, "cn.token-disjoint", "a token is alive with both parities");
  if (!spent.disjoint_with(alive0) || !spent.disjoint_with(alive1))
    fail(out, "cn.token-disjoint", "a spent token is still alive");
  return out;
}

std::vector<Violation> cn_check_invariants(const NetworkState& s) {
  std::vector<Violation> out;

  NetworkHistory combined;
  try {
    combined = s.combined_history();
  } catch (const overlap_error& e) {
    fail(out, "cn.disjoint-timestamps", e.what());
    return out;
  }

  NetworkHistory even = parity_slice(combined, 0);
  NetworkHistory odd = parity_slice(combined, 1);
  TokenSet alive0 = s.alive_tokens(0);
  TokenSet alive1 = s.alive_tokens(1);

  // Balance equation between the two sides of the network.
  auto lhs = static_cast<std::int64_t>(even.size() + alive0.size());
  auto rhs = static_cast<std::int64_t>(odd.size() + alive1.size()) + s.bal();
  if (lhs != rhs)
    fail(out, "cn.balance",
         "|even hist| + |even tokens| = " + std::to_string(lhs) +
             " but |odd hist| + |odd tokens| + bal = " + std::to_string(rhs));

  // Shape of the real state.
  if (s.bal() != 0 && s.bal() != 1)
    fail(out, "cn.state-shape", "bal = " + std::to_string(s.bal()));
  if (s.counter(0) < 0 || s.counter(0) % 2 != 0)
    fail(out, "cn.state-shape", "c0 = " + std::to_string(s.counter(0)));
  if (s.counter(1) < 1 || s.counter(1) % 2 != 1)
    fail(out, "cn.state-shape", "c1 = " + std::to_string(s.counter(1)));

  // The histories cover exactly the values the counters have gone through.
  auto check_coverage = [&](const NetworkHistory& slice, std::int64_t limit,
                            std::int64_t first, const char* side) {
    std::int64_t expected = first;
    for (const auto& [t, e] : slice) {
      if (t != expected) {
        fail(out, "cn.counter-coverage",
             std::string(side) + " history misses value " +
                 std::to_string(expected));
        return;
      }
      expected += 2;
    }
    if (expected != limit + 2)
      fail(out, "cn.counter-coverage",
           std::string(side) + " history stops at " +
               std::to_string(expected - 2) + " but the counter is at " +
               std::to_string(limit));
  };
  check_coverage(even, s.counter(0), 0, "even");
  check_coverage(odd, s.counter(1), 1, "odd");

  // Counter values restate the history sizes.
  if (s.counter(0) != 2 * static_cast<std::int64_t>(even.size()) - 2)
    fail(out, "cn.counter-history",
         "c0 = " + std::to_string(s.counter(0)) + " but even history has " +
             std::to_string(even.size()) + " entries");
  if (s.counter(1) != 2 * static_cast<std::int64_t>(odd.size()) - 1)
    fail(out, "cn.counter-history",
         "c1 = " + std::to_string(s.counter(1)) + " but odd history has " +
             std::to_string(odd.size()) + " entries");

  {
    std::vector<Violation> tok =
        cn_check_token_partition(alive0, alive1, combined);
    out.insert(out.end(), tok.begin(), tok.end());
  }

  // Every entry's snapshot contains the token it spent.
  for (const auto& [t, e] : combined)
    if (!e.alive_snapshot.contains(e.spent))
      fail(out, "cn.spent-in-snapshot",
           "entry " + std::to_string(t) + " spent token " +
               std::to_string(e.spent) + " outside its snapshot");

  // Per-entry reorder bound: a past value can trail the opposite counter
  // only by the interference still pending from its snapshot.
  auto check_bound = [&](const NetworkHistory& slice, const TokenSet& same,
                         const TokenSet& other, std::int64_t other_counter) {
    for (const auto& [t, e] : slice) {
      auto l = t + 2 * static_cast<std::int64_t>(
                           e.alive_snapshot.intersect_count(same));
      auto r = other_counter +
               2 * static_cast<std::int64_t>(
                       e.alive_snapshot.intersect_count(other)) +
               2;
      if (!(l < r))
        fail(out, "cn.reorder-bound",
             "entry " + std::to_string(t) + ": " + std::to_string(l) +
                 " !< " + std::to_string(r));
    }
  };
  check_bound(even, alive0, alive1, s.counter(1));
  check_bound(odd, alive1, alive0, s.counter(0));

  // Every flip handed out exactly one token and every add spent one.
  auto alive_count =
      static_cast<std::int64_t>(alive0.size() + alive1.size());
  if (s.flips_executed() - s.adds_executed() != alive_count)
    fail(out, "cn.token-conservation",
         std::to_string(s.flips_executed()) + " flips - " +
             std::to_string(s.adds_executed()) + " adds != " +
             std::to_string(alive_count) + " alive tokens");

  return out;
}

std::vector<Violation> cn_check_teardown(const NetworkState& s) {
  std::vector<Violation> out;
  for (int i = 0; i < s.view_count(); ++i)
    if (!s.view(i).all_tokens().empty())
      fail(out, "cn.teardown-tokens",
           "thread " + std::to_string(i) + " still holds " +
               s.view(i).all_tokens().str());
  return out;
}

std::vector<Violation> cn_respast(const NetworkHistory& past,
                                  std::int64_t res,
                                  const TokenSet& snapshot, TokenId z,
                                  const NetworkState& at_return, int view) {
  std::vector<Violation> out;

  TokenSet env_now = at_return.env_tokens(view, 0)
                         .joined(at_return.env_tokens(view, 1))
                         .united(spent_tokens(at_return.env_history(view)))
                         .united(TokenSet{z});
  if (!snapshot.subset_of(env_now))
    fail(out, "cn.respast-snapshot",
         "snapshot " + snapshot.str() +
             " mentions tokens unaccounted for at return");

  for (const auto& [t, e] : past) {
    if (e.alive_snapshot.contains(z))
      fail(out, "cn.respast-fresh",
           "token " + std::to_string(z) + " already appears in the past "
           "entry " + std::to_string(t));
    auto bound = res + 2 +
                 2 * static_cast<std::int64_t>(
                         snapshot.intersect_count(e.alive_snapshot));
    if (!(t < bound))
      fail(out, "cn.respast-bound",
           "past entry " + std::to_string(t) + " !< " +
               std::to_string(bound));
  }
  return out;
}

std::vector<Violation> cn_check_post(const IncCallRecord& rec,
                                     const NetworkState& at_return) {
  std::vector<Violation> out;
  const NetworkView& me = at_return.view(rec.view);

  if (!(me.tokens == rec.self_tokens_at_start))
    fail(out, "cn.post-tokens-restored",
         "the call left alive tokens behind");

  NetworkHistory have = me.self_hist;
  if (!rec.self_hist_at_start.subset_of(have)) {
    fail(out, "cn.post-hist-delta", "self history lost entries");
    return out;
  }
  NetworkHistory delta = have.minus(rec.self_hist_at_start);
  if (delta.size() != 1) {
    fail(out, "cn.post-hist-delta",
         "call added " + std::to_string(delta.size()) +
             " history entries instead of one");
    return out;
  }
  auto [t, entry] = *delta.begin();
  if (t != rec.result + 2) {
    fail(out, "cn.post-entry-key",
         "committed entry " + std::to_string(t) + " does not match result " +
             std::to_string(rec.result));
    return out;
  }

  NetworkHistory env_now = at_return.env_history(rec.view);
  if (!rec.env_hist_at_start.subset_of(env_now))
    fail(out, "cn.post-env-monotone",
         "environment history lost entries during the call");

  TokenSet env_tokens_now =
      at_return.env_tokens(rec.view, 0).joined(at_return.env_tokens(rec.view, 1));
  TokenSet spent_since = spent_tokens(env_now).difference(
      spent_tokens(rec.env_hist_at_start));
  TokenSet iota_o =
      rec.env_tokens_at_start[0].joined(rec.env_tokens_at_start[1]);
  if (!iota_o.subset_of(env_tokens_now.united(spent_since)))
    fail(out, "cn.post-env-tokens",
         "a token alive in the environment at the call start is neither "
         "alive nor spent by the environment at return");

  NetworkHistory past =
      rec.self_hist_at_start.joined(rec.env_hist_at_start);
  auto bound = rec.result + 2 +
               2 * static_cast<std::int64_t>(
                       entry.alive_snapshot.intersect_count(iota_o));
  if (!last_before(past, static_cast<Timestamp>(bound)))
    fail(out, "cn.post-last-bound",
         "pre-state history reaches " +
             std::to_string(*last_timestamp(past)) + " !< " +
             std::to_string(bound));

  auto respast = cn_respast(past, rec.result, entry.alive_snapshot,
                            entry.spent, at_return, rec.view);
  out.insert(out.end(), respast.begin(), respast.end());
  return out;
}

std::vector<Violation> cn_check_snapshot_coherence(const IncCallRecord& rec) {
  std::vector<Violation> out;

  NetworkHistory past;
  try {
    past = rec.self_hist_at_start.joined(rec.env_hist_at_start);
  } catch (const overlap_error& e) {
    fail(out, "cn.snapshot-disjoint", e.what());
    return out;
  }

  NetworkHistory even = parity_slice(past, 0);
  NetworkHistory odd = parity_slice(past, 1);

  auto check_gapless = [&](const NetworkHistory& slice, std::int64_t first,
                           const char* side) {
    std::int64_t expected = first;
    for (const auto& [t, e] : slice) {
      if (t != expected) {
        fail(out, "cn.snapshot-coverage",
             std::string(side) + " snapshot slice misses " +
                 std::to_string(expected));
        return;
      }
      expected += 2;
    }
  };
  check_gapless(even, 0, "even");
  check_gapless(odd, 1, "odd");

  TokenSet tok0 = rec.self_tokens_at_start[0].united(rec.env_tokens_at_start[0]);
  TokenSet tok1 = rec.self_tokens_at_start[1].united(rec.env_tokens_at_start[1]);
  TokenSet spent = spent_tokens(past);
  if (!tok0.disjoint_with(tok1) || !spent.disjoint_with(tok0) ||
      !spent.disjoint_with(tok1))
    fail(out, "cn.snapshot-tokens", "snapshot token sets overlap");

  for (const auto& [t, e] : past)
    if (!e.alive_snapshot.contains(e.spent))
      fail(out, "cn.snapshot-spent",
           "snapshot entry " + std::to_string(t) + " lacks its own token");

  auto last_even = even.last_key();
  auto last_odd = odd.last_key();
  auto check_bound = [&](const NetworkHistory& slice, const TokenSet& same,
                         const TokenSet& other,
                         std::optional<Timestamp> other_last) {
    if (!other_last) return;
    for (const auto& [t, e] : slice) {
      auto l = t + 2 * static_cast<std::int64_t>(
                           e.alive_snapshot.intersect_count(same));
      auto r = *other_last +
               2 * static_cast<std::int64_t>(
                       e.alive_snapshot.intersect_count(other)) +
               2;
      if (!(l < r))
        fail(out, "cn.snapshot-bound",
             "snapshot entry " + std::to_string(t) + ": " +
                 std::to_string(l) + " !< " + std::to_string(r));
    }
  };
  check_bound(even, tok0, tok1, last_odd);
  check_bound(odd, tok1, tok0, last_even);
  return out;
}

std::vector<Violation> cn_check_in_flight(const IncCallRecord& rec,
                                          const NetworkState& now) {
  std::vector<Violation> out;
  NetworkHistory env_now = now.env_history(rec.view);
  if (!rec.env_hist_at_start.subset_of(env_now)) {
    fail(out, "cn.env-monotone",
         "environment history shrank during a call by thread " +
             std::to_string(rec.view));
    return out;
  }
  TokenSet env_tokens_now =
      now.env_tokens(rec.view, 0).joined(now.env_tokens(rec.view, 1));
  TokenSet spent_since = spent_tokens(env_now).difference(
      spent_tokens(rec.env_hist_at_start));
  TokenSet iota_o =
      rec.env_tokens_at_start[0].joined(rec.env_tokens_at_start[1]);
  if (!iota_o.subset_of(env_tokens_now.united(spent_since)))
    fail(out, "cn.env-token-stability",
         "an environment token vanished without being spent");
  return out;
}

}  // namespace nlcheck
