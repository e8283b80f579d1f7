#include <doctest.h>

#include "nlcheck/flip2.hpp"

using namespace nlcheck;

namespace {

FlipHistory hist(std::initializer_list<int> bits) {
  FlipHistory h;
  Timestamp i = 0;
  for (int b : bits) h.insert(i++, b);
  return h;
}

bool has_clause(const std::vector<Violation>& vs, const std::string& clause) {
  for (const Violation& v : vs)
    if (v.clause == clause) return true;
  return false;
}

}  // namespace

TEST_CASE("flip state init") {
  FlipState s(2, 0);
  CHECK(s.x() == 0);
  CHECK(s.combined_history().empty());
  CHECK(s.seq_next() == 0);
  CHECK(fl_check_invariants(s).empty());
}

TEST_CASE("single flips alternate and keep the invariant") {
  FlipState s(1, 0);
  auto r1 = s.step_flip_x(0);
  CHECK(r1.previous == 0);
  CHECK(r1.written == 1);
  CHECK(s.x() == 1);
  CHECK(fl_check_invariants(s).empty());

  auto r2 = s.step_flip_x(0);
  CHECK(r2.previous == 1);
  CHECK(r2.written == 0);
  CHECK(fl_check_invariants(s).empty());

  CHECK(s.combined_history() == hist({1, 0}));
}

TEST_CASE("two threads interleaving flips keep the invariant") {
  FlipState s(2, 0);
  s.step_flip_x(0);
  CHECK(fl_check_invariants(s).empty());
  s.step_flip_x(1);
  CHECK(fl_check_invariants(s).empty());
  s.step_flip_x(1);
  CHECK(fl_check_invariants(s).empty());
  s.step_flip_x(0);
  CHECK(fl_check_invariants(s).empty());
  CHECK(s.combined_history() == hist({1, 0, 1, 0}));
}

TEST_CASE("flip2 result law") {
  CHECK(flip2_result(1, 0) == 1);
  CHECK(flip2_result(1, 1) == 0);
  CHECK(flip2_result(0, 0) == 2);
}

TEST_CASE("constructed negatives for the history checker") {
  // [1, 1] breaks alternation.
  CHECK(has_clause(fl_check_history(1, 0, hist({1, 1})), "fl.alternation"));
  // Tail 0 with current bit 1 breaks the tail rule.
  CHECK(has_clause(fl_check_history(1, 0, hist({1, 0})), "fl.last-entry"));
  // A gap in the indices.
  FlipHistory gappy;
  gappy.insert(0, 1);
  gappy.insert(2, 1);
  CHECK(has_clause(fl_check_history(1, 0, gappy), "fl.gapless"));
  // The good cases pass.
  CHECK(fl_check_history(0, 0, hist({1, 0})).empty());
  CHECK(fl_check_history(1, 0, hist({1, 0, 1})).empty());
  CHECK(fl_check_history(0, 0, FlipHistory{}).empty());
}

TEST_CASE("flip2 postcondition") {
  FlipState s(1, 0);
  Flip2CallRecord rec;
  rec.view = 0;
  rec.hist_at_start = s.view(0).self_hist;
  rec.first = s.step_flip_x(0);
  rec.second = s.step_flip_x(0);
  rec.result = rec.first.previous + rec.second.previous;
  rec.completed = true;
  CHECK(rec.result == 1);  // solo flip2 from 0
  CHECK(fl_check_post(rec, s).empty());

  Flip2CallRecord forged = rec;
  forged.result = 3;
  CHECK(has_clause(fl_check_post(forged, s), "fl.post-range"));

  Flip2CallRecord swapped = rec;
  std::swap(swapped.first, swapped.second);
  CHECK(has_clause(fl_check_post(swapped, s), "fl.post-order"));
}
