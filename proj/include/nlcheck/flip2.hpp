#pragma once

// Shared-bit double-flipper. flip atomically complements a shared bit and
// returns the previous value; flip2 is two flips in a row, returning the
// sum of the previous values. The ghost history logs every written bit at
// a global sequence index, so the whole history alternates and its tail is
// always the current bit.

#include <string>
#include <vector>

#include "nlcheck/pcm.hpp"

namespace nlcheck {

using FlipHistory = PcmMap<Timestamp, int>;

struct FlipView {
  FlipHistory self_hist;
  bool operator==(const FlipView&) const = default;
};

class FlipState {
 public:
  explicit FlipState(int view_count, int x0 = 0);

  struct FlipResult {
    int previous = 0;
    Timestamp index = 0;
    int written = 0;
  };

  // One atomic flip, logged to the calling thread's history slice.
  FlipResult step_flip_x(int view);

  int x() const { return x_; }
  int x_initial() const { return x_initial_; }
  Timestamp seq_next() const { return seq_next_; }
  const FlipView& view(int i) const { return views_.at(i); }
  int view_count() const { return static_cast<int>(views_.size()); }

  FlipHistory combined_history() const;

 private:
  int x_ = 0;
  int x_initial_ = 0;
  Timestamp seq_next_ = 0;
  std::vector<FlipView> views_;
};

// res = complement(a) + complement(b) for the two bits a call wrote.
int flip2_result(int a_bit, int b_bit);

// Core history checks over raw components: gapless indices, alternation
// starting from the complement of x_initial, tail equal to the current bit.
std::vector<Violation> fl_check_history(int x, int x_initial,
                                        const FlipHistory& combined);

// Alternation of the combined history and agreement of its tail with the
// current bit.
std::vector<Violation> fl_check_invariants(const FlipState& s);

struct Flip2CallRecord {
  int view = 0;
  FlipHistory hist_at_start;
  FlipState::FlipResult first;
  FlipState::FlipResult second;
  int result = -1;
  bool completed = false;
};

// The call appended exactly its two entries, in order, and its result is
// the complement sum of the bits it wrote.
std::vector<Violation> fl_check_post(const Flip2CallRecord& rec,
                                     const FlipState& at_return);

}  // namespace nlcheck
