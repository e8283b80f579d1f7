#include <doctest.h>

#include <random>

#include "nlcheck/exchanger.hpp"
#include "nlcheck/counting_network.hpp"
#include "nlcheck/pcm.hpp"

using namespace nlcheck;

namespace {

ExchangeHistory h(std::initializer_list<std::pair<Timestamp, ExchangeEntry>>
                      entries) {
  ExchangeHistory out;
  for (const auto& [t, e] : entries) out.insert(t, e);
  return out;
}

ExchangeHistory random_history(std::mt19937_64& rng, Timestamp lo,
                               Timestamp hi, int n) {
  ExchangeHistory out;
  std::uniform_int_distribution<Timestamp> ts(lo, hi);
  std::uniform_int_distribution<Value> vals(0, 9);
  for (int i = 0; i < n; ++i) {
    Timestamp t = ts(rng);
    if (!out.contains(t)) out.insert(t, ExchangeEntry{vals(rng), vals(rng)});
  }
  return out;
}

}  // namespace

TEST_CASE("join of disjoint maps, unit law, overlap error") {
  ExchangeHistory a = h({{1, {10, 20}}});
  ExchangeHistory b = h({{2, {20, 10}}});
  ExchangeHistory ab = a.joined(b);
  CHECK(ab.size() == 2);
  CHECK(*ab.find(1) == ExchangeEntry{10, 20});
  CHECK(*ab.find(2) == ExchangeEntry{20, 10});

  CHECK(a.joined(ExchangeHistory{}) == a);
  CHECK(ExchangeHistory{}.joined(a) == a);

  ExchangeHistory c = h({{1, {7, 7}}});
  CHECK_THROWS_AS(a.joined(c), overlap_error);
}

TEST_CASE("pcm laws on random small maps") {
  std::mt19937_64 rng(20211);
  for (int round = 0; round < 200; ++round) {
    ExchangeHistory a = random_history(rng, 1, 10, 3);
    ExchangeHistory b = random_history(rng, 11, 20, 3);
    ExchangeHistory c = random_history(rng, 21, 30, 3);
    CHECK(a.joined(b) == b.joined(a));
    CHECK(a.joined(b).joined(c) == a.joined(b.joined(c)));
    CHECK(a.joined(ExchangeHistory{}) == a);
  }
}

TEST_CASE("twin timestamps") {
  CHECK(twin_timestamp(1) == 2);
  CHECK(twin_timestamp(8) == 7);
  CHECK_THROWS_AS(twin_timestamp(0), invalid_timestamp_error);

  // Involution and {2k-1, 2k} pairing.
  for (Timestamp t = 1; t <= 1000; ++t) {
    CHECK(twin_timestamp(twin_timestamp(t)) == t);
    Timestamp lo = std::min(t, twin_timestamp(t));
    Timestamp hi = std::max(t, twin_timestamp(t));
    CHECK(lo % 2 == 1);
    CHECK(hi == lo + 1);
  }
}

TEST_CASE("pending gather") {
  PendingMap empty;
  CHECK(pending_history(empty).empty());

  PendingMap one;
  one.insert(7, PendingEntry{2, 100, 200});
  ExchangeHistory g1 = pending_history(one);
  CHECK(g1.size() == 1);
  CHECK(*g1.find(2) == ExchangeEntry{100, 200});

  PendingMap two = one;
  two.insert(9, PendingEntry{4, 300, 400});
  ExchangeHistory g2 = pending_history(two);
  CHECK(g2.size() == 2);
  CHECK(*g2.find(2) == ExchangeEntry{100, 200});
  CHECK(*g2.find(4) == ExchangeEntry{300, 400});

  // Same timestamp in two pending entries is an upstream invariant break.
  PendingMap clash = one;
  clash.insert(8, PendingEntry{2, 5, 6});
  CHECK_THROWS_AS(pending_history(clash), overlap_error);
}

TEST_CASE("gather distributes over join") {
  std::mt19937_64 rng(4242);
  for (int round = 0; round < 100; ++round) {
    PendingMap p1, p2;
    std::uniform_int_distribution<Value> vals(0, 9);
    for (int i = 0; i < 3; ++i) {
      p1.insert(i + 1, PendingEntry{2 * i + 1, vals(rng), vals(rng)});
      p2.insert(i + 100, PendingEntry{2 * i + 50, vals(rng), vals(rng)});
    }
    CHECK(pending_history(p1.joined(p2)) ==
          pending_history(p1).joined(pending_history(p2)));
  }
}

TEST_CASE("spent tokens and distribution over join") {
  NetworkHistory empty;
  CHECK(spent_tokens(empty).empty());

  NetworkHistory one;
  one.insert(2, NetworkEntry{TokenSet{5}, 5});
  CHECK(spent_tokens(one) == TokenSet{5});

  NetworkHistory init;
  init.insert(0, NetworkEntry{TokenSet{0}, 0});
  init.insert(1, NetworkEntry{TokenSet{1}, 1});
  CHECK(spent_tokens(init) == TokenSet({0, 1}));

  std::mt19937_64 rng(777);
  for (int round = 0; round < 100; ++round) {
    NetworkHistory h1, h2;
    TokenId next = 10;
    std::uniform_int_distribution<int> n(0, 4);
    for (int i = 0, k = n(rng); i < k; ++i)
      h1.insert(2 * i, NetworkEntry{TokenSet{next}, next}), ++next;
    for (int i = 0, k = n(rng); i < k; ++i)
      h2.insert(2 * i + 1, NetworkEntry{TokenSet{next}, next}), ++next;
    TokenSet joined = spent_tokens(h1.joined(h2));
    TokenSet separate = spent_tokens(h1).united(spent_tokens(h2));
    CHECK(joined == separate);
    CHECK(spent_tokens(h1).disjoint_with(spent_tokens(h2)));
  }
}

TEST_CASE("last timestamp and vacuous comparison") {
  ExchangeHistory empty;
  CHECK(!last_timestamp(empty).has_value());
  CHECK(last_before(empty, Timestamp{1}));

  NetworkHistory init;
  init.insert(0, NetworkEntry{TokenSet{0}, 0});
  init.insert(1, NetworkEntry{TokenSet{1}, 1});
  CHECK(*last_timestamp(init) == 1);

  ExchangeHistory scattered = h({{1, {0, 0}}, {4, {0, 0}}, {3, {0, 0}}});
  CHECK(*last_timestamp(scattered) == 4);
  CHECK(last_before(scattered, Timestamp{5}));
  CHECK(!last_before(scattered, Timestamp{4}));
}

TEST_CASE("other view") {
  ExchangeHistory h1 = h({{1, {5, 6}}});
  ExchangeHistory h2 = h({{2, {6, 5}}});
  std::vector<ExchangeHistory> world{h1, h2, ExchangeHistory{}};

  CHECK(other_view(world, 0) == h2);
  CHECK(other_view(world, 1) == h1);
  CHECK(other_view(world, 2) == h1.joined(h2));

  std::vector<ExchangeHistory> solo{h1};
  CHECK(other_view(solo, 0).empty());

  std::vector<ExchangeHistory> clash{h1, h1, ExchangeHistory{}};
  CHECK_THROWS_AS(other_view(clash, 2), overlap_error);
}

TEST_CASE("fork split and join merge") {
  ExchangeHistory a = h({{1, {1, 2}}});
  ExchangeHistory b = h({{2, {2, 1}}});

  SubjectiveView<ExchangeHistory> parent{a.joined(b), ExchangeHistory{}};
  auto [left, right] = fork_split(parent, a, b);
  CHECK(left.self_part == a);
  CHECK(left.other_part == b);
  CHECK(right.self_part == b);
  CHECK(right.other_part == a);

  // Empty split duplicates the parent's environment.
  SubjectiveView<ExchangeHistory> quiet{ExchangeHistory{}, a};
  auto [l2, r2] = fork_split(quiet, ExchangeHistory{}, ExchangeHistory{});
  CHECK(l2.self_part.empty());
  CHECK(l2.other_part == a);
  CHECK(r2.other_part == a);

  // A bad allocation is rejected.
  CHECK_THROWS_AS(fork_split(parent, a, a), allocation_error);

  // Children grow, then merge back: the parent self is the join of the
  // grown selves.
  ExchangeHistory ga = h({{3, {7, 8}}});
  ExchangeHistory gb = h({{4, {8, 7}}});
  SubjectiveView<ExchangeHistory> left2{a.joined(ga),
                                        b.joined(gb).joined(ExchangeHistory{})};
  SubjectiveView<ExchangeHistory> right2{b.joined(gb), a.joined(ga)};
  SubjectiveView<ExchangeHistory> merged = join_merge(left2, right2);
  CHECK(merged.self_part == a.joined(ga).joined(b).joined(gb));
  CHECK(merged.other_part.empty());
}

TEST_CASE("frame preservation under fork and join") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 100; ++round) {
    ExchangeHistory a = random_history(rng, 1, 20, 4);
    ExchangeHistory frame = random_history(rng, 40, 60, 3);

    // Split a into two random halves.
    ExchangeHistory x1, x2;
    for (const auto& [t, e] : a)
      (rng() % 2 == 0 ? x1 : x2).insert(t, e);

    SubjectiveView<ExchangeHistory> parent{a, frame};
    auto [left, right] = fork_split(parent, x1, x2);

    // The global contents (self parts plus shared environment) are the
    // same before and after the split.
    CHECK(left.self_part.joined(right.self_part).joined(frame) ==
          a.joined(frame));
    SubjectiveView<ExchangeHistory> merged = join_merge(left, right);
    CHECK(merged.self_part == a);
    CHECK(merged.other_part == frame);
  }
}

TEST_CASE("token set intersection lemma") {
  // For any snapshot containing z and any set not containing z, the
  // intersection misses at least z.
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<TokenId> ids(0, 60);
  for (int round = 0; round < 10000; ++round) {
    TokenId z = ids(rng);
    TokenSet snapshot{z};
    TokenSet other;
    for (int i = 0; i < 8; ++i) {
      TokenId id = ids(rng);
      if (!snapshot.contains(id)) snapshot = snapshot.united(TokenSet{id});
      if (id != z) other = other.united(TokenSet{id});
    }
    REQUIRE(snapshot.contains(z));
    REQUIRE(!other.contains(z));
    CHECK(snapshot.intersect_count(other) <= snapshot.size() - 1);
  }
}
