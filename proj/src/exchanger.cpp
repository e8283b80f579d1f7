#include "nlcheck/exchanger.hpp"

#include <sstream>

namespace nlcheck {

std::string Hole::str() const {
  switch (tag) {
    case HoleTag::Unmatched:
      return "U";
    case HoleTag::Retired:
      return "R";
    case HoleTag::Matched:
      return "M " + std::to_string(matched_with);
  }
  return "?";
}

std::string format_exchange_result(const std::optional<Value>& r) {
  return r ? "Some " + std::to_string(*r) : "None";
}

ExchangeHistory pending_history(const PendingMap& pending) {
  ExchangeHistory h;
  for (const auto& [p, e] : pending)
    h.insert(e.time, ExchangeEntry{e.offered, e.matched});
  return h;
}

ExchangerState::ExchangerState(int view_count)
    : views_(static_cast<std::size_t>(view_count)) {}

OfferId ExchangerState::step_alloc(int view, Value v) {
  OfferId p = next_offer_id_++;
  view_mut(view).self_heap.insert(p, Offer{v, Hole::unmatched()});
  return p;
}

bool ExchangerState::step_install(int view, OfferId p) {
  ExchangerView& me = view_mut(view);
  if (!me.self_heap.contains(p))
    throw precondition_error("step_install: offer " + std::to_string(p) +
                             " is not in the thread's private heap");
  if (g_ != kNullOffer) return false;
  g_ = p;
  joint_offers_.insert(p, *me.self_heap.find(p));
  me.self_heap.erase(p);
  me.self_perms.add(p);
  return true;
}

Hole ExchangerState::step_timeout_cas(int view, OfferId p) {
  ExchangerView& me = view_mut(view);
  if (!me.self_perms.contains(p))
    throw precondition_error("step_timeout_cas: offer " + std::to_string(p) +
                             " is not owned by the thread");
  const Offer* off = joint_offers_.find(p);
  if (off == nullptr)
    throw precondition_error("step_timeout_cas: owned offer " +
                             std::to_string(p) + " is not in the joint heap");
  Hole seen = off->hole;
  switch (seen.tag) {
    case HoleTag::Unmatched: {
      // Retire. The offer stays allocated forever.
      Offer updated = *off;
      updated.hole = Hole::retired();
      joint_offers_.erase(p);
      joint_offers_.insert(p, updated);
      me.self_perms.remove(p);
      break;
    }
    case HoleTag::Matched: {
      // Collect: move the reserved entry from pending into our history.
      const PendingEntry* pe = pending_.find(p);
      if (pe == nullptr)
        throw precondition_error("step_timeout_cas: matched offer " +
                                 std::to_string(p) + " has no pending entry");
      view_mut(view).self_hist.insert(pe->time,
                                      ExchangeEntry{pe->offered, pe->matched});
      pending_.erase(p);
      me.self_perms.remove(p);
      break;
    }
    case HoleTag::Retired:
      // Ownership forbids anybody else retiring p.
      throw precondition_error("step_timeout_cas: owned offer " +
                               std::to_string(p) + " was already retired");
  }
  return seen;
}

void ExchangerState::step_dealloc(int view, OfferId p) {
  ExchangerView& me = view_mut(view);
  if (!me.self_heap.contains(p))
    throw precondition_error("step_dealloc: offer " + std::to_string(p) +
                             " is not in the thread's private heap");
  me.self_heap.erase(p);
}

OfferId ExchangerState::step_read_g(int /*view*/) const { return g_; }

Hole ExchangerState::step_match(int view, OfferId cur, Value v) {
  const Offer* off = joint_offers_.find(cur);
  if (off == nullptr)
    throw precondition_error("step_match: offer " + std::to_string(cur) +
                             " is not in the joint heap");
  Hole seen = off->hole;
  if (!seen.is_unmatched()) return seen;

  Value w = off->value;
  Timestamp t = smallest_unused_timestamp();
  Offer updated = *off;
  updated.hole = Hole::matched(v);
  joint_offers_.erase(cur);
  joint_offers_.insert(cur, updated);
  view_mut(view).self_hist.insert(t, ExchangeEntry{v, w});
  pending_.insert(cur, PendingEntry{twin_timestamp(t), w, v});
  return seen;
}

bool ExchangerState::step_unlink(int /*view*/, OfferId cur) {
  if (g_ != cur) return false;
  g_ = kNullOffer;
  return true;
}

Value ExchangerState::step_read_val(int /*view*/, OfferId cur) const {
  const Offer* off = joint_offers_.find(cur);
  if (off == nullptr)
    throw precondition_error("step_read_val: offer " + std::to_string(cur) +
                             " is not in the joint heap");
  return off->value;
}

Timestamp ExchangerState::smallest_unused_timestamp() const {
  return static_cast<Timestamp>(combined_history().size()) + 1;
}

ExchangeHistory ExchangerState::combined_history() const {
  ExchangeHistory h = pending_history(pending_);
  for (const ExchangerView& v : views_) h = h.joined(v.self_hist);
  return h;
}

ExchangeHistory ExchangerState::env_history(int view) const {
  ExchangeHistory h = pending_history(pending_);
  for (int i = 0; i < view_count(); ++i)
    if (i != view) h = h.joined(views_[static_cast<std::size_t>(i)].self_hist);
  return h;
}

namespace {

void fail(std::vector<Violation>& out, std::string clause, std::string detail) {
  out.push_back(Violation{std::move(clause), std::move(detail)});
}

bool owned_by_someone(const ExchangerState& s, OfferId p, int* owner = nullptr) {
  for (int i = 0; i < s.view_count(); ++i) {
    if (s.view(i).self_perms.contains(p)) {
      if (owner != nullptr) *owner = i;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Violation> ex_check_history(const ExchangeHistory& combined) {
  std::vector<Violation> out;

  // Twin pairing: t -> (v, w) is present iff twin(t) -> (w, v) is.
  for (const auto& [t, vw] : combined) {
    const ExchangeEntry* other = combined.find(twin_timestamp(t));
    if (other == nullptr || other->first != vw.second ||
        other->second != vw.first)
      fail(out, "ex.twin-pairing",
           "entry " + std::to_string(t) + " -> (" + std::to_string(vw.first) +
               "," + std::to_string(vw.second) + ") has no matching twin");
  }
  if (combined.size() % 2 != 0)
    fail(out, "ex.even-size",
         "combined history has odd size " + std::to_string(combined.size()));

  // Gapless: timestamps are exactly 1..|combined|.
  Timestamp expect = 1;
  for (const auto& [t, vw] : combined) {
    if (t != expect) {
      fail(out, "ex.gapless",
           "timestamp " + std::to_string(t) + " leaves a gap below it");
      break;
    }
    ++expect;
  }
  return out;
}

std::vector<Violation> ex_check_invariants(const ExchangerState& s) {
  std::vector<Violation> out;

  // Disjointness of all history slices; the combined history itself.
  ExchangeHistory combined;
  bool combined_ok = true;
  try {
    combined = s.combined_history();
  } catch (const overlap_error& e) {
    combined_ok = false;
    fail(out, "ex.disjoint-timestamps", e.what());
  }

  // Ownership sets are pairwise disjoint.
  for (int i = 0; i < s.view_count(); ++i)
    for (int j = i + 1; j < s.view_count(); ++j)
      if (!s.view(i).self_perms.disjoint_with(s.view(j).self_perms))
        fail(out, "ex.disjoint-perms",
             "threads " + std::to_string(i) + " and " + std::to_string(j) +
                 " both own an offer");

  if (combined_ok) {
    std::vector<Violation> hist = ex_check_history(combined);
    out.insert(out.end(), hist.begin(), hist.end());
  }

  // g points at null or at a joint offer.
  if (s.g() != kNullOffer && !s.joint_offers().contains(s.g()))
    fail(out, "ex.g-valid",
         "g = " + std::to_string(s.g()) + " is not a joint offer");

  // Pending entries are exactly the matched-and-owned offers, with agreeing
  // values.
  for (const auto& [p, pe] : s.pending()) {
    const Offer* off = s.joint_offers().find(p);
    if (off == nullptr || !off->hole.is_matched()) {
      fail(out, "ex.pending-matched",
           "pending offer " + std::to_string(p) + " is not matched in the "
           "joint heap");
      continue;
    }
    if (off->value != pe.offered || off->hole.matched_with != pe.matched)
      fail(out, "ex.pending-values",
           "pending offer " + std::to_string(p) +
               " disagrees with the joint heap");
    if (!owned_by_someone(s, p))
      fail(out, "ex.pending-owned",
           "pending offer " + std::to_string(p) + " is owned by nobody");
  }
  for (int i = 0; i < s.view_count(); ++i) {
    for (OfferId p : s.view(i).self_perms) {
      const Offer* off = s.joint_offers().find(p);
      if (off == nullptr) {
        fail(out, "ex.owned-in-joint",
             "owned offer " + std::to_string(p) + " is not in the joint heap");
        continue;
      }
      if (off->hole.is_matched() && !s.pending().contains(p))
        fail(out, "ex.pending-matched",
             "matched owned offer " + std::to_string(p) +
                 " is missing from pending");
    }
  }

  // At most one unmatched offer; it is the one g names, and it is owned.
  int unmatched = 0;
  for (const auto& [p, off] : s.joint_offers()) {
    if (off.hole.is_unmatched()) {
      ++unmatched;
      if (s.g() != p)
        fail(out, "ex.unmatched-linked",
             "unmatched offer " + std::to_string(p) + " is not linked from g");
      if (!owned_by_someone(s, p))
        fail(out, "ex.unmatched-owned",
             "unmatched offer " + std::to_string(p) + " is owned by nobody");
    }
    if (off.hole.is_retired() && owned_by_someone(s, p))
      fail(out, "ex.retired-unowned",
           "retired offer " + std::to_string(p) + " is still owned");
  }
  if (unmatched > 1)
    fail(out, "ex.unique-unmatched",
         std::to_string(unmatched) + " unmatched offers are live at once");

  return out;
}

std::vector<Violation> ex_check_teardown(const ExchangerState& s) {
  std::vector<Violation> out;
  if (!s.pending().empty())
    fail(out, "ex.teardown-pending",
         std::to_string(s.pending().size()) + " matches were never collected");
  for (int i = 0; i < s.view_count(); ++i) {
    if (!s.view(i).self_perms.empty())
      fail(out, "ex.teardown-perms",
           "thread " + std::to_string(i) + " still owns offers");
    if (!s.view(i).self_heap.empty())
      fail(out, "ex.teardown-heap",
           "thread " + std::to_string(i) + " still holds private offers");
  }
  return out;
}

std::vector<Violation> ex_check_post(const ExchangeCallRecord& rec,
                                     const ExchangerState& at_return) {
  std::vector<Violation> out;
  const ExchangerView& me = at_return.view(rec.view);

  if (!(me.self_heap == rec.heap_at_start))
    fail(out, "ex.post-heap-restored",
         "private heap changed across the call");
  if (!(me.self_perms == rec.perms_at_start))
    fail(out, "ex.post-perms-restored",
         "offer ownership changed across the call");

  if (!rec.env_at_start.subset_of(at_return.env_history(rec.view)))
    fail(out, "ex.post-env-monotone",
         "environment history lost entries during the call");

  ExchangeHistory have = me.self_hist;
  if (!rec.hist_at_start.subset_of(have)) {
    fail(out, "ex.post-hist-delta", "self history lost entries");
    return out;
  }
  ExchangeHistory delta = have.minus(rec.hist_at_start);

  if (!rec.result) {
    if (!delta.empty())
      fail(out, "ex.post-hist-delta",
           "failed call added " + std::to_string(delta.size()) +
               " history entries");
    return out;
  }

  if (delta.size() != 1) {
    fail(out, "ex.post-hist-delta",
         "successful call added " + std::to_string(delta.size()) +
             " history entries instead of one");
    return out;
  }
  auto [t, vw] = *delta.begin();
  if (vw.first != rec.given || vw.second != *rec.result)
    fail(out, "ex.post-entry-values",
         "committed entry (" + std::to_string(vw.first) + "," +
             std::to_string(vw.second) + ") does not record the exchange of " +
             std::to_string(rec.given) + " for " +
             std::to_string(*rec.result));
  if (!last_before(rec.env_at_start, t) ||
      !last_before(rec.env_at_start, twin_timestamp(t)))
    fail(out, "ex.post-entry-fresh",
         "timestamp " + std::to_string(t) +
             " or its twin is not beyond the pre-state history");
  return out;
}

std::vector<Violation> ex_check_in_flight(const ExchangeCallRecord& rec,
                                          const ExchangerState& now) {
  std::vector<Violation> out;
  if (!rec.env_at_start.subset_of(now.env_history(rec.view)))
    fail(out, "ex.env-monotone",
         "environment history shrank during a call by thread " +
             std::to_string(rec.view));
  return out;
}

}  // namespace nlcheck
