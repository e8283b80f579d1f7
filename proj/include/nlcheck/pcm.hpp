#pragma once

// Value-semantics carriers for the auxiliary (ghost) state shared by all
// objects in this workbench: finite maps and sets with *disjoint* join,
// timestamps with their twin pairing, and the subjective self/other view
// discipline used to split ghost state between a thread and its
// environment.
//
// Every carrier is an immutable-style value: ghost transitions build new
// values, which keeps state capture for replay and oracle comparison
// trivial (plain copies).

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlcheck {

using Timestamp = std::int64_t;
using Value = std::int64_t;
using TokenId = std::int64_t;
using OfferId = std::int64_t;

// Offer id 0 plays the role of the null pointer.
inline constexpr OfferId kNullOffer = 0;

// ---------------------------------------------------------------------------
// Errors. A pcm_error signals a broken invariant upstream: the exploration
// engine converts it into a violation record and aborts the execution.

struct pcm_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct overlap_error : pcm_error {
  using pcm_error::pcm_error;
};

struct invalid_timestamp_error : pcm_error {
  using pcm_error::pcm_error;
};

struct allocation_error : pcm_error {
  using pcm_error::pcm_error;
};

// Raised when an atomic step is driven outside its contract (e.g. retiring
// an offer the thread does not own).
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed check, as data. `clause` is a short stable identifier,
// `detail` names the offending entries.
struct Violation {
  std::string clause;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Twin timestamps. Valid timestamps are >= 1; they pair up as {2k-1, 2k}.

inline Timestamp twin_timestamp(Timestamp t) {
  if (t <= 0)
    throw invalid_timestamp_error("twin_timestamp: " + std::to_string(t) +
                                  " is not a valid timestamp");
  return (t % 2 == 1) ? t + 1 : t - 1;
}

// ---------------------------------------------------------------------------
// PcmMap: finite map with disjoint union as join and the empty map as unit.

template <class K, class V>
class PcmMap {
 public:
  using Map = std::map<K, V>;

  PcmMap() = default;

  static PcmMap singleton(K key, V value) {
    PcmMap m;
    m.entries_.emplace(std::move(key), std::move(value));
    return m;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(const K& key) const { return entries_.count(key) != 0; }

  const V* find(const K& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void insert(K key, V value) {
    auto [it, fresh] = entries_.emplace(std::move(key), std::move(value));
    if (!fresh)
      throw overlap_error("PcmMap: key already present: " + key_str(it->first));
  }

  void erase(const K& key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw precondition_error("PcmMap: erasing absent key " + key_str(key));
    entries_.erase(it);
  }

  PcmMap joined(const PcmMap& other) const {
    PcmMap out = *this;
    for (const auto& [k, v] : other.entries_) out.insert(k, v);
    return out;
  }

  // True when every entry of *this occurs in `other` with an equal value.
  bool subset_of(const PcmMap& other) const {
    for (const auto& [k, v] : entries_) {
      const V* ov = other.find(k);
      if (ov == nullptr || !(*ov == v)) return false;
    }
    return true;
  }

  // Removes `other` from *this; `other` must be a sub-map.
  PcmMap minus(const PcmMap& other) const {
    PcmMap out = *this;
    for (const auto& [k, v] : other.entries_) {
      const V* ov = out.find(k);
      if (ov == nullptr || !(*ov == v))
        throw allocation_error("PcmMap: minus of a non-sub-map at key " +
                               key_str(k));
      out.entries_.erase(k);
    }
    return out;
  }

  std::optional<K> last_key() const {
    if (entries_.empty()) return std::nullopt;
    return entries_.rbegin()->first;
  }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const PcmMap&) const = default;

 private:
  static std::string key_str(const K& k) {
    std::ostringstream os;
    os << k;
    return os.str();
  }

  Map entries_;
};

// ---------------------------------------------------------------------------
// PcmSet: finite set with disjoint union as join. Plain set operations are
// also provided for the checkers, which work over arbitrary combinations.

template <class T>
class PcmSet {
 public:
  PcmSet() = default;
  PcmSet(std::initializer_list<T> xs) : elems_(xs) {}

  bool empty() const { return elems_.empty(); }
  std::size_t size() const { return elems_.size(); }
  bool contains(const T& x) const { return elems_.count(x) != 0; }

  void add(T x) {
    auto [it, fresh] = elems_.insert(std::move(x));
    if (!fresh)
      throw overlap_error("PcmSet: element already present: " +
                          elem_str(*it));
  }

  void remove(const T& x) {
    auto it = elems_.find(x);
    if (it == elems_.end())
      throw precondition_error("PcmSet: removing absent element " +
                               elem_str(x));
    elems_.erase(it);
  }

  PcmSet joined(const PcmSet& other) const {
    PcmSet out = *this;
    for (const T& x : other.elems_) out.add(x);
    return out;
  }

  // Non-strict set operations.
  PcmSet united(const PcmSet& other) const {
    PcmSet out = *this;
    out.elems_.insert(other.elems_.begin(), other.elems_.end());
    return out;
  }

  PcmSet intersected(const PcmSet& other) const {
    PcmSet out;
    for (const T& x : elems_)
      if (other.contains(x)) out.elems_.insert(x);
    return out;
  }

  PcmSet difference(const PcmSet& other) const {
    PcmSet out;
    for (const T& x : elems_)
      if (!other.contains(x)) out.elems_.insert(x);
    return out;
  }

  std::size_t intersect_count(const PcmSet& other) const {
    std::size_t n = 0;
    for (const T& x : elems_)
      if (other.contains(x)) ++n;
    return n;
  }

  bool subset_of(const PcmSet& other) const {
    for (const T& x : elems_)
      if (!other.contains(x)) return false;
    return true;
  }

  bool disjoint_with(const PcmSet& other) const {
    return intersect_count(other) == 0;
  }

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  bool operator==(const PcmSet&) const = default;

  std::string str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const T& x : elems_) {
      if (!first) os << ",";
      os << x;
      first = false;
    }
    os << "}";
    return os.str();
  }

 private:
  static std::string elem_str(const T& x) {
    std::ostringstream os;
    os << x;
    return os.str();
  }

  std::set<T> elems_;
};

// ---------------------------------------------------------------------------
// Generic join helpers.

template <class P>
P pcm_join(const P& a, const P& b) {
  return a.joined(b);
}

template <class P>
P join_all(const std::vector<P>& parts) {
  P out;
  for (const P& p : parts) out = out.joined(p);
  return out;
}

// Join of all self parts except thread i's: the thread's view of its
// concurrent environment.
template <class P>
P other_view(const std::vector<P>& selves, std::size_t i) {
  P out;
  for (std::size_t j = 0; j < selves.size(); ++j)
    if (j != i) out = out.joined(selves[j]);
  return out;
}

// ---------------------------------------------------------------------------
// Subjective views and the fork/join view transfer.
//
// A thread's ghost state is a (self, other) split of a PCM carrier; `other`
// is always the join of all peers' self parts. Forking splits the parent's
// self between the children and adds each child's share to its sibling's
// environment; joining is the exact inverse.

template <class P>
struct SubjectiveView {
  P self_part;
  P other_part;

  bool operator==(const SubjectiveView&) const = default;
};

template <class P>
std::pair<SubjectiveView<P>, SubjectiveView<P>> fork_split(
    const SubjectiveView<P>& parent, const P& x1, const P& x2) {
  try {
    if (!(x1.joined(x2) == parent.self_part))
      throw allocation_error("fork_split: allocation does not join to the "
                             "parent's self part");
  } catch (const overlap_error&) {
    throw allocation_error("fork_split: allocation parts overlap");
  }
  SubjectiveView<P> left{x1, x2.joined(parent.other_part)};
  SubjectiveView<P> right{x2, x1.joined(parent.other_part)};
  return {left, right};
}

template <class P>
SubjectiveView<P> join_merge(const SubjectiveView<P>& left,
                             const SubjectiveView<P>& right) {
  // Recover the parent's environment: everything in the left child's
  // environment that is not the right child's contribution.
  P parent_other = left.other_part.minus(right.self_part);
  if (!(right.other_part == left.self_part.joined(parent_other)))
    throw allocation_error("join_merge: children disagree on the shared "
                           "environment");
  return SubjectiveView<P>{left.self_part.joined(right.self_part),
                           parent_other};
}

// ---------------------------------------------------------------------------
// Timestamp utilities shared by the objects.

template <class K, class V>
std::optional<K> last_timestamp(const PcmMap<K, V>& h) {
  return h.last_key();
}

// last(h) < t, vacuously true on the empty history.
template <class K, class V>
bool last_before(const PcmMap<K, V>& h, K t) {
  auto l = h.last_key();
  return !l || *l < t;
}

}  // namespace nlcheck
