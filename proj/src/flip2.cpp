#include "nlcheck/flip2.hpp"

namespace nlcheck {

FlipState::FlipState(int view_count, int x0)
    : x_(x0), x_initial_(x0), views_(static_cast<std::size_t>(view_count)) {
  if (x0 != 0 && x0 != 1)
    throw precondition_error("FlipState: initial bit must be 0 or 1");
}

FlipState::FlipResult FlipState::step_flip_x(int view) {
  int previous = x_;
  x_ = 1 - x_;
  Timestamp index = seq_next_++;
  views_.at(static_cast<std::size_t>(view)).self_hist.insert(index, x_);
  return FlipResult{previous, index, x_};
}

FlipHistory FlipState::combined_history() const {
  FlipHistory h;
  for (const FlipView& v : views_) h = h.joined(v.self_hist);
  return h;
}

int flip2_result(int a_bit, int b_bit) { return (1 - a_bit) + (1 - b_bit); }

namespace {
void fail(std::vector<Violation>& out, std::string clause, std::string detail) {
  out.push_back(Violation{std::move(clause), std::move(detail)});
}
}  // namespace

std::vector<Violation> fl_check_history(int x, int x_initial,
                                        const FlipHistory& combined) {
  std::vector<Violation> out;

  // Indices are exactly 0..n-1 and the written bits alternate, starting
  // from the complement of the initial bit.
  Timestamp expect = 0;
  for (const auto& [i, bit] : combined) {
    if (i != expect) {
      fail(out, "fl.gapless",
           "history index " + std::to_string(i) + " leaves a gap");
      break;
    }
    int want = (i % 2 == 0) ? 1 - x_initial : x_initial;
    if (bit != want)
      fail(out, "fl.alternation",
           "history[" + std::to_string(i) + "] = " + std::to_string(bit) +
               ", expected " + std::to_string(want));
    ++expect;
  }

  if (combined.empty()) {
    if (x != x_initial)
      fail(out, "fl.last-entry",
           "empty history but the bit moved to " + std::to_string(x));
  } else {
    int last_bit = *combined.find(*combined.last_key());
    if (last_bit != x)
      fail(out, "fl.last-entry",
           "history tail " + std::to_string(last_bit) + " != current bit " +
               std::to_string(x));
  }
  return out;
}

std::vector<Violation> fl_check_invariants(const FlipState& s) {
  FlipHistory combined;
  try {
    combined = s.combined_history();
  } catch (const overlap_error& e) {
    return {Violation{"fl.disjoint-indices", e.what()}};
  }
  return fl_check_history(s.x(), s.x_initial(), combined);
}

std::vector<Violation> fl_check_post(const Flip2CallRecord& rec,
                                     const FlipState& at_return) {
  std::vector<Violation> out;

  if (rec.result < 0 || rec.result > 2)
    fail(out, "fl.post-range",
         "flip2 returned " + std::to_string(rec.result));

  if (rec.result != flip2_result(rec.first.written, rec.second.written))
    fail(out, "fl.post-sum",
         "result " + std::to_string(rec.result) +
             " != complement sum of written bits " +
             std::to_string(rec.first.written) + "," +
             std::to_string(rec.second.written));
  if (rec.result != rec.first.previous + rec.second.previous)
    fail(out, "fl.post-sum",
         "result disagrees with the previous-value reads");

  if (!(rec.first.index < rec.second.index))
    fail(out, "fl.post-order", "call entries are out of order");

  const FlipHistory& mine = at_return.view(rec.view).self_hist;
  const int* a = mine.find(rec.first.index);
  const int* b = mine.find(rec.second.index);
  if (a == nullptr || *a != rec.first.written || b == nullptr ||
      *b != rec.second.written)
    fail(out, "fl.post-ownership",
         "the call's entries are not in the caller's history");

  FlipHistory expected = rec.hist_at_start;
  expected.insert(rec.first.index, rec.first.written);
  expected.insert(rec.second.index, rec.second.written);
  if (!(mine == expected))
    fail(out, "fl.post-hist-delta",
         "the call changed more than its own two entries");
  return out;
}

}  // namespace nlcheck
