#pragma once

// Elimination-based exchanger as an explicit atomic-step machine.
//
// Real state: a global publication slot `g` plus a heap of offers, each a
// value and a "hole" the partner thread tries to fill. Ghost state, updated
// in the same atomic step as its host CAS: per-thread offer ownership, a
// pending map of matched-but-uncollected offers, and per-thread exchange
// histories. A completed exchange is represented by a pair of twin entries
// t -> (v, w) and twin(t) -> (w, v) spread across the histories; the
// checkers below enforce that pairing together with the structural
// invariants of the offer lifecycle.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlcheck/pcm.hpp"

namespace nlcheck {

enum class HoleTag : std::uint8_t { Unmatched, Retired, Matched };

struct Hole {
  HoleTag tag = HoleTag::Unmatched;
  Value matched_with = 0;  // meaningful only when tag == Matched

  static Hole unmatched() { return {HoleTag::Unmatched, 0}; }
  static Hole retired() { return {HoleTag::Retired, 0}; }
  static Hole matched(Value w) { return {HoleTag::Matched, w}; }

  bool is_unmatched() const { return tag == HoleTag::Unmatched; }
  bool is_retired() const { return tag == HoleTag::Retired; }
  bool is_matched() const { return tag == HoleTag::Matched; }

  std::string str() const;
  bool operator==(const Hole&) const = default;
};

struct Offer {
  Value value = 0;  // immutable after creation
  Hole hole;

  bool operator==(const Offer&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Offer& o) {
  return os << "(" << o.value << ";" << o.hole.str() << ")";
}

// Pending entry for an offer that was matched but not yet collected by its
// owner: the timestamp reserved for the owner's history entry, the value
// originally offered, and the value it was matched with.
struct PendingEntry {
  Timestamp time = 0;
  Value offered = 0;
  Value matched = 0;

  bool operator==(const PendingEntry&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const PendingEntry& e) {
  return os << "(" << e.time << "," << e.offered << "," << e.matched << ")";
}

// History entry: (value given, value received).
using ExchangeEntry = std::pair<Value, Value>;
using ExchangeHistory = PcmMap<Timestamp, ExchangeEntry>;
using OfferHeap = PcmMap<OfferId, Offer>;
using PendingMap = PcmMap<OfferId, PendingEntry>;
using OfferIdSet = PcmSet<OfferId>;

// Collects the pending entries into a history: each p -> (t, v, w)
// contributes t -> (v, w). Throws overlap_error on duplicate timestamps.
ExchangeHistory pending_history(const PendingMap& pending);

// Per-thread self components.
struct ExchangerView {
  OfferHeap self_heap;      // offers allocated but not yet installed
  OfferIdSet self_perms;    // offers this thread may retire or collect
  ExchangeHistory self_hist;

  bool operator==(const ExchangerView&) const = default;
};

class ExchangerState {
 public:
  explicit ExchangerState(int view_count);

  // --- atomic steps; ghost updates ride on the same step -----------------

  // Creates a fresh offer (v, U) in the thread's private heap.
  OfferId step_alloc(int view, Value v);

  // CAS(g, null, p). On success the offer moves from the private heap into
  // the joint heap, and the thread takes ownership of p. Returns the CAS
  // outcome; on failure nothing changes.
  bool step_install(int view, OfferId p);

  // CAS(p+1, U, R) on an owned offer. Returns the hole value read.
  // If the hole was U the offer is retired (it stays allocated; ids are
  // never reused). If it was M(w) the thread collects: the pending entry
  // moves into the thread's history.
  Hole step_timeout_cas(int view, OfferId p);

  // Frees an offer that was never published.
  void step_dealloc(int view, OfferId p);

  // Reads g. 0 means null.
  OfferId step_read_g(int view) const;

  // CAS(cur+1, U, M v). Returns the hole value read. On success the matcher
  // commits the exchange: it takes the smallest unused timestamp t (always
  // odd) for its own history entry t -> (v, w) and reserves twin(t) in the
  // pending map for the offering side.
  Hole step_match(int view, OfferId cur, Value v);

  // CAS(g, cur, null). Returns true when g changed.
  bool step_unlink(int view, OfferId cur);

  // Reads the value stored in an offer.
  Value step_read_val(int view, OfferId cur) const;

  // --- ghost-state queries ------------------------------------------------

  // |combined history| + 1; odd whenever the twin invariant holds.
  Timestamp smallest_unused_timestamp() const;

  // Join of all self histories plus the pending collection.
  ExchangeHistory combined_history() const;

  // The environment of `view`: everyone else's history plus pending.
  ExchangeHistory env_history(int view) const;

  OfferId g() const { return g_; }
  const OfferHeap& joint_offers() const { return joint_offers_; }
  const PendingMap& pending() const { return pending_; }
  const ExchangerView& view(int i) const { return views_.at(i); }
  int view_count() const { return static_cast<int>(views_.size()); }

 private:
  ExchangerView& view_mut(int i) { return views_.at(i); }

  OfferId g_ = kNullOffer;
  OfferHeap joint_offers_;
  PendingMap pending_;
  std::vector<ExchangerView> views_;
  OfferId next_offer_id_ = 1;
};

// Core checks on a combined history: twin pairing, even size, gaplessness.
std::vector<Violation> ex_check_history(const ExchangeHistory& combined);

// Evaluates the twin-pairing invariant and the structural clauses over the
// whole state; returns every violated clause with its witnesses.
std::vector<Violation> ex_check_invariants(const ExchangerState& s);

// Empty-environment teardown: nothing pending, nothing owned, nothing
// still private. Holds at the end of every complete closed-world run.
std::vector<Violation> ex_check_teardown(const ExchangerState& s);

// One exchange call, as seen by the checkers: the pre-state snapshot taken
// at the call's first step and the result delivered at its last.
struct ExchangeCallRecord {
  int view = 0;
  Value given = 0;
  ExchangeHistory env_at_start;    // environment history at the first step
  OfferHeap heap_at_start;
  OfferIdSet perms_at_start;
  ExchangeHistory hist_at_start;
  std::optional<Value> result;
  bool completed = false;
};

// Per-call postcondition, evaluated against the state at return:
// private heap and permissions restored; the environment history only
// grew; on success exactly one new self entry (given, received) whose
// timestamp and twin are fresh w.r.t. the snapshot; on failure no new
// entries.
std::vector<Violation> ex_check_post(const ExchangeCallRecord& rec,
                                     const ExchangerState& at_return);

// Mid-call stability: the snapshot environment never shrinks.
std::vector<Violation> ex_check_in_flight(const ExchangeCallRecord& rec,
                                          const ExchangerState& now);

std::string format_exchange_result(const std::optional<Value>& r);

}  // namespace nlcheck
