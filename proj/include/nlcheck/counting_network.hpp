#pragma once

// Single-balancer counting network: a one-bit balancer directs each
// incrementing thread to one of two counters (c0 for even values, c1 for
// odd), which advance by two. The ghost state tracks, per thread, the
// tokens earned at the balancer and a history of counter writes; each
// history entry carries a snapshot of every token alive at the moment of
// the write, which is what makes the out-of-order behavior of the network
// quantifiable.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nlcheck/pcm.hpp"

namespace nlcheck {

using TokenSet = PcmSet<TokenId>;

// A token is the capability to perform one fetch-and-add on the counter of
// its parity; it is alive from the balancer flip until it is spent.
struct Token {
  TokenId id = -1;
  int parity = 0;

  bool operator==(const Token&) const = default;
};

struct NetworkEntry {
  TokenSet alive_snapshot;  // every alive token when the write happened
  TokenId spent = -1;       // the token consumed by the write

  bool operator==(const NetworkEntry&) const = default;
};

std::ostream& operator<<(std::ostream& os, const NetworkEntry& e);

using NetworkHistory = PcmMap<Timestamp, NetworkEntry>;

// All tokens recorded as spent in h. Duplicates collapse; the invariant
// checker reports double-spends separately.
TokenSet spent_tokens(const NetworkHistory& h);

// Per-thread self components; tokens are kept split by parity.
struct NetworkView {
  std::array<TokenSet, 2> tokens;
  NetworkHistory self_hist;

  TokenSet all_tokens() const { return tokens[0].joined(tokens[1]); }
  bool operator==(const NetworkView&) const = default;
};

class NetworkState {
 public:
  // Starts with bal = 0, counters 0 and 1, and the two initial counter
  // values already on record in a distinguished initializer part (owned by
  // no thread, so every thread sees it as environment). Token ids 0 and 1
  // are consumed by those entries; fresh tokens start at 2.
  explicit NetworkState(int view_count);

  // flip(bal): returns the previous bit and awards the calling thread a
  // fresh token of that parity.
  struct FlipResult {
    int previous = 0;
    Token token;
  };
  FlipResult step_flip(int view);

  // fetchAndAdd2(c_parity(z)): spends z, bumps the counter by two, and
  // appends (old value + 2) -> (alive-token snapshot, z) to the thread's
  // history. The snapshot is taken before z is removed, so z is in it.
  std::int64_t step_faa2(int view, Token z);

  int bal() const { return bal_; }
  std::int64_t counter(int parity) const {
    return counters_.at(static_cast<std::size_t>(parity));
  }

  const NetworkHistory& init_hist() const { return init_hist_; }
  const NetworkView& view(int i) const { return views_.at(i); }
  int view_count() const { return static_cast<int>(views_.size()); }

  // Initializer part plus every thread's self history.
  NetworkHistory combined_history() const;
  // Initializer part plus everyone else's self history.
  NetworkHistory env_history(int view) const;

  TokenSet alive_tokens(int parity) const;
  TokenSet env_tokens(int view, int parity) const;

  // Thread-join view transfer: `from`'s self components move into `to`.
  void merge_views(int from, int to);

  long flips_executed() const { return flips_executed_; }
  long adds_executed() const { return adds_executed_; }

 private:
  NetworkView& view_mut(int i) { return views_.at(i); }

  int bal_ = 0;
  std::array<std::int64_t, 2> counters_{0, 1};
  NetworkHistory init_hist_;
  std::vector<NetworkView> views_;
  TokenId next_token_id_ = 2;
  long flips_executed_ = 0;
  long adds_executed_ = 0;
};

// Core check on raw components: alive tokens of both parities and all
// spent tokens are mutually disjoint, and no token is spent twice.
std::vector<Violation> cn_check_token_partition(const TokenSet& alive0,
                                                const TokenSet& alive1,
                                                const NetworkHistory& combined);

// Evaluates the balance equation, the state-shape clauses, history/counter
// coverage, token disjointness, snapshot self-membership, the per-entry
// reorder bounds, and token conservation.
std::vector<Violation> cn_check_invariants(const NetworkState& s);

// Quiescent teardown: no thread holds alive tokens.
std::vector<Violation> cn_check_teardown(const NetworkState& s);

// One getAndInc call, for the per-call checkers.
struct IncCallRecord {
  int view = 0;
  NetworkHistory self_hist_at_start;             // gamma_s
  NetworkHistory env_hist_at_start;              // gamma_o
  std::array<TokenSet, 2> env_tokens_at_start;   // iota_o, split by parity
  std::array<TokenSet, 2> self_tokens_at_start;
  std::int64_t result = -1;
  bool completed = false;
};

// The bounds tying the call's result to every entry already on record in
// `past`: the spent token is fresh w.r.t. all past snapshots, and any past
// timestamp exceeds res + 2 by at most twice the overlap between the
// call's snapshot and that entry's snapshot.
std::vector<Violation> cn_respast(const NetworkHistory& past,
                                  std::int64_t res,
                                  const TokenSet& snapshot, TokenId z,
                                  const NetworkState& at_return, int view);

// Full per-call postcondition at return. Derives the committed entry from
// the self-history delta.
std::vector<Violation> cn_check_post(const IncCallRecord& rec,
                                     const NetworkState& at_return);

// Sanity check on the snapshot the call starts from: the interference
// components it names must themselves satisfy the object invariants
// (restricted to those components).
std::vector<Violation> cn_check_snapshot_coherence(const IncCallRecord& rec);

// Mid-call stability of the snapshot inclusions.
std::vector<Violation> cn_check_in_flight(const IncCallRecord& rec,
                                          const NetworkState& now);

}  // namespace nlcheck
