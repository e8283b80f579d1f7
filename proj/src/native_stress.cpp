#include "nlcheck/native_stress.hpp"

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace nlcheck {

namespace {

void check(StressReport& r, const std::string& name, bool ok,
           std::string detail) {
  r.checks.push_back(StressCheck{name, ok, std::move(detail)});
}

// --- network ---------------------------------------------------------------

struct NativeNetwork {
  std::atomic<int> bal{0};
  std::atomic<std::int64_t> c0{0};
  std::atomic<std::int64_t> c1{1};

  std::int64_t get_and_inc() {
    int b = bal.fetch_xor(1);
    return b == 0 ? c0.fetch_add(2) : c1.fetch_add(2);
  }
};

// --- exchanger ---------------------------------------------------------------

// The hole is one atomic word: values are non-negative, so the two control
// states fit below them.
constexpr std::int64_t kHoleUnmatched = -1;
constexpr std::int64_t kHoleRetired = -2;

struct NativeOffer {
  std::int64_t value;
  std::atomic<std::int64_t> hole{kHoleUnmatched};

  explicit NativeOffer(std::int64_t v) : value(v) {}
};

// Offers stay allocated for the whole run (the algorithm leaks them to
// sidestep ABA); each thread owns an arena that frees them only after the
// join, so a pointer is never recycled while another thread might still
// compare against it.
using OfferArena = std::deque<std::unique_ptr<NativeOffer>>;

struct NativeExchanger {
  std::atomic<NativeOffer*> g{nullptr};

  // One exchange attempt; >= 0 is the received value, -1 is failure.
  std::int64_t exchange(std::int64_t v, OfferArena& arena) {
    arena.push_back(std::make_unique<NativeOffer>(v));
    NativeOffer* p = arena.back().get();
    NativeOffer* expected = nullptr;
    if (g.compare_exchange_strong(expected, p)) {
      std::this_thread::yield();
      std::int64_t hole = kHoleUnmatched;
      if (p->hole.compare_exchange_strong(hole, kHoleRetired)) return -1;
      return hole;  // matched value
    }
    NativeOffer* cur = g.load();
    if (cur == nullptr) return -1;
    std::int64_t hole = kHoleUnmatched;
    bool matched = cur->hole.compare_exchange_strong(hole, v);
    g.compare_exchange_strong(cur, nullptr);
    if (matched) return cur->value;
    return -1;
  }
};

}  // namespace

StressReport stress_network(int threads, long ops_per_thread,
                            std::uint64_t seed) {
  StressReport report;
  report.object = "network";
  report.threads = threads;
  report.ops_per_thread = ops_per_thread;
  report.seed = seed;

  NativeNetwork net;
  std::vector<std::vector<std::int64_t>> results(
      static_cast<std::size_t>(threads));
  std::vector<std::thread> workers;
  for (int i = 0; i < threads; ++i) {
    workers.emplace_back([&net, &results, i, ops_per_thread] {
      auto& mine = results[static_cast<std::size_t>(i)];
      mine.reserve(static_cast<std::size_t>(ops_per_thread));
      for (long k = 0; k < ops_per_thread; ++k)
        mine.push_back(net.get_and_inc());
    });
  }
  for (std::thread& w : workers) w.join();

  std::map<std::int64_t, long> counts;
  long evens = 0, odds = 0;
  for (const auto& rs : results)
    for (std::int64_t r : rs) {
      ++counts[r];
      (r % 2 == 0 ? evens : odds)++;
    }
  long duplicates = 0;
  for (const auto& [r, n] : counts)
    if (n > 1) ++duplicates;
  check(report, "distinct-results", duplicates == 0,
        duplicates == 0 ? "all results pairwise distinct"
                        : std::to_string(duplicates) + " duplicated results");
  std::int64_t c0 = net.c0.load(), c1 = net.c1.load();
  check(report, "even-counter-total", c0 == 2 * evens,
        "c0 = " + std::to_string(c0) + ", even results = " +
            std::to_string(evens));
  check(report, "odd-counter-total", c1 == 2 * odds + 1,
        "c1 = " + std::to_string(c1) + ", odd results = " +
            std::to_string(odds));
  long total = 0;
  for (const auto& rs : results) total += static_cast<long>(rs.size());
  check(report, "all-ops-returned",
        total == static_cast<long>(threads) * ops_per_thread,
        std::to_string(total) + " results collected");
  return report;
}

StressReport stress_exchanger(int threads, long ops_per_thread,
                              std::uint64_t seed, int retry_bound) {
  StressReport report;
  report.object = "exchanger";
  report.threads = threads;
  report.ops_per_thread = ops_per_thread;
  report.seed = seed;

  NativeExchanger ex;
  using Pair = std::pair<std::int64_t, std::int64_t>;  // (given, received)
  std::vector<std::vector<Pair>> logs(static_cast<std::size_t>(threads));
  std::vector<OfferArena> arenas(static_cast<std::size_t>(threads));
  std::vector<std::thread> workers;
  for (int i = 0; i < threads; ++i) {
    workers.emplace_back([&ex, &logs, &arenas, i, ops_per_thread,
                          retry_bound] {
      auto& mine = logs[static_cast<std::size_t>(i)];
      auto& arena = arenas[static_cast<std::size_t>(i)];
      for (long k = 0; k < ops_per_thread; ++k) {
        // Values are globally unique per attempt so pairing is exact.
        std::int64_t v = static_cast<std::int64_t>(i) * 100000000 + k;
        for (int attempt = 0; attempt < retry_bound; ++attempt) {
          std::int64_t got = ex.exchange(v, arena);
          if (got >= 0) {
            mine.emplace_back(v, got);
            break;
          }
          std::this_thread::yield();
        }
      }
    });
  }
  for (std::thread& w : workers) w.join();

  std::map<Pair, long> multiset;
  long successes = 0;
  for (const auto& log : logs)
    for (const Pair& p : log) {
      ++multiset[p];
      ++successes;
    }
  report.successes = successes;

  // Every success (v, w) must have a unique partner success (w, v).
  bool paired = true;
  std::string detail;
  for (const auto& [p, n] : multiset) {
    auto it = multiset.find(Pair{p.second, p.first});
    long partner = it == multiset.end() ? 0 : it->second;
    if (partner != n) {
      paired = false;
      detail = "(" + std::to_string(p.first) + "," +
               std::to_string(p.second) + ") occurs " + std::to_string(n) +
               " times but its mirror occurs " + std::to_string(partner);
      break;
    }
  }
  check(report, "exchanges-pair-up", paired,
        paired ? std::to_string(successes) + " successes pair up" : detail);
  check(report, "even-success-count", successes % 2 == 0,
        std::to_string(successes) + " successes");
  return report;
}

std::string StressReport::summary() const {
  std::ostringstream os;
  os << "native stress: " << object << ", " << threads << " threads x "
     << ops_per_thread << " ops, seed " << seed << "\n";
  if (object == "exchanger") os << "successes: " << successes << "\n";
  for (const StressCheck& c : checks)
    os << (c.ok ? "  ok   " : "  FAIL ") << c.name << ": " << c.detail
       << "\n";
  return os.str();
}

std::string StressReport::to_json() const {
  nlohmann::json j;
  j["mode"] = "native";
  j["object"] = object;
  j["threads"] = threads;
  j["ops_per_thread"] = ops_per_thread;
  j["seed"] = seed;
  j["successes"] = successes;
  j["checks"] = nlohmann::json::array();
  for (const StressCheck& c : checks)
    j["checks"].push_back(
        {{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  return j.dump(2);
}

}  // namespace nlcheck
