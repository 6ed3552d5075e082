#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "bora/cache/ring_series.hpp"
#include "bora/cache/sample_cache.hpp"
#include "support/cache_oracle.hpp"

namespace bora::cache {
namespace {

using namespace std::chrono_literals;

std::vector<std::int64_t> stamps(const std::vector<SensorSample>& v) {
  std::vector<std::int64_t> out;
  for (const auto& s : v) out.push_back(s.timestamp);
  return out;
}

TEST(RingSeries, EvictsOldestWhenFull) {
  RingSeries ring("s", 5);
  for (int i = 1; i <= 7; ++i) ring.put({"s", i, static_cast<double>(i)});
  EXPECT_EQ(stamps(ring.all()), (std::vector<std::int64_t>{3, 4, 5, 6, 7}));
  EXPECT_EQ(ring.size(), 5u);
}

TEST(RingSeries, OlderThanOldestInFullRingIsDropped) {
  RingSeries ring("s", 3);
  for (int i = 10; i <= 12; ++i) ring.put({"s", i, 1.0});
  EXPECT_EQ(ring.put({"s", 5, 9.0}), RingSeries::PutResult::dropped);
  EXPECT_EQ(stamps(ring.all()), (std::vector<std::int64_t>{10, 11, 12}));
}

TEST(RingSeries, DuplicateTimestampOverwrites) {
  RingSeries ring("s", 4);
  ring.put({"s", 1, 1.0});
  ring.put({"s", 2, 2.0});
  EXPECT_EQ(ring.put({"s", 1, 5.0}), RingSeries::PutResult::replaced);
  EXPECT_EQ(ring.size(), 2u);
  EXPECT_EQ(ring.all().front().value, 5.0);
}

// Every insertion position (before, between, equal to, after each stored
// timestamp) into full and non-full rings, checked against the oracle.
TEST(RingSeries, EnumeratedInsertionPositionsMatchOracle) {
  for (std::size_t capacity = 1; capacity <= 5; ++capacity) {
    for (std::size_t prefill = 0; prefill <= capacity + 1; ++prefill) {
      for (std::int64_t ts = 1; ts <= static_cast<std::int64_t>(2 * prefill + 3); ++ts) {
        RingSeries ring("s", capacity);
        testing::CacheOracle oracle(capacity);
        for (std::size_t i = 0; i < prefill; ++i) {
          SensorSample s{"s", static_cast<std::int64_t>(2 * i + 2), static_cast<double>(i)};
          ring.put(s);
          oracle.put(s);
        }
        SensorSample probe{"s", ts, -1.0};
        ring.put(probe);
        oracle.put(probe);
        ASSERT_EQ(ring.all(), oracle.retained("s")) << capacity << "/" << prefill << "/" << ts;
      }
    }
  }
}

TEST(RingSeries, ZeroCapacityRejected) { EXPECT_THROW(RingSeries("s", 0), PreconditionError); }

struct FakeClock {
  std::int64_t now = 1'000'000;
  util::MillisClock fn() {
    return [this] { return now; };
  }
};

TEST(SampleCache, RecentOnEmptyAndUnknown) {
  SampleCache cache;
  EXPECT_TRUE(cache.recent("nope", 1000).empty());
  EXPECT_FALSE(cache.latest("nope"));
  EXPECT_THROW(cache.recent("nope", 0), PreconditionError);
}

TEST(SampleCache, WindowLargerThanSpanReturnsWholeRing) {
  FakeClock clock;
  SampleCache cache(4, clock.fn());
  for (int i = 0; i < 6; ++i) cache.put({"a", clock.now - 100 + i, 1.0});
  EXPECT_EQ(cache.recent("a", 1'000'000'000).size(), 4u);
  EXPECT_EQ(cache.recent("a", std::numeric_limits<std::int64_t>::max()).size(), 4u);
}

TEST(SampleCache, WindowFiltersByInjectedNow) {
  FakeClock clock;
  SampleCache cache(100, clock.fn());
  for (int i = 0; i < 10; ++i) cache.put({"a", clock.now - 1000 * i, 1.0});
  EXPECT_EQ(cache.recent("a", 3000).size(), 4u);  // ages 0, 1000, 2000, 3000
  clock.now += 1000;
  EXPECT_EQ(cache.recent("a", 3000).size(), 3u);
}

TEST(SampleCache, LatestIsLastOfRecent) {
  SampleCache cache;
  cache.put({"a", 10, 1.0});
  cache.put({"a", 30, 3.0});
  cache.put({"a", 20, 2.0});
  EXPECT_EQ(cache.latest("a")->timestamp, 30);
  EXPECT_EQ(cache.latest("a"), cache.recent("a", std::numeric_limits<std::int64_t>::max()).back());
}

TEST(SampleCache, RejectsInvalidSamples) {
  SampleCache cache;
  EXPECT_THROW(cache.put({"a", 0, 1.0}), PreconditionError);
  EXPECT_THROW(cache.put({"a", 5, std::numeric_limits<double>::infinity()}), PreconditionError);
}

TEST(SampleCache, RandomOpsMatchOracle) {
  FakeClock clock;
  SampleCache cache(8, clock.fn());
  testing::CacheOracle oracle(8);
  std::mt19937_64 rng(5);
  const std::vector<std::string> ids = {"a", "b", "c"};
  for (int op = 0; op < 5000; ++op) {
    const auto& id = ids[rng() % ids.size()];
    switch (rng() % 4) {
      case 0:
      case 1: {
        SensorSample s{id, clock.now - static_cast<std::int64_t>(rng() % 200), static_cast<double>(rng() % 1000)};
        cache.put(s);
        oracle.put(s);
        break;
      }
      case 2: {
        std::int64_t window = 1 + static_cast<std::int64_t>(rng() % 300);
        ASSERT_EQ(cache.recent(id, window), oracle.recent(id, clock.now, window));
        break;
      }
      default:
        ASSERT_EQ(cache.latest(id), oracle.latest(id));
    }
    if (rng() % 10 == 0) clock.now += static_cast<std::int64_t>(rng() % 20);
  }
}

TEST(Subscriptions, MatchingPutDeliversOnce) {
  SampleCache cache;
  auto q = std::make_shared<SampleQueue>();
  cache.subscribe({"s1"}, q);
  cache.put({"s2", 1, 1.0});
  cache.put({"s1", 1, 1.0});
  auto got = q->pop(1s);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->sensor_id, "s1");
  EXPECT_FALSE(q->try_pop());
}

TEST(Subscriptions, CallbackDelivery) {
  SampleCache cache;
  std::atomic<int> n{0};
  auto sub = cache.subscribe({"s1"}, SampleCallback([&](const SensorSample&) { ++n; }));
  cache.put({"s1", 1, 1.0});
  cache.put({"s2", 1, 1.0});
  for (int i = 0; i < 100 && n < 1; ++i) std::this_thread::sleep_for(5ms);
  std::this_thread::sleep_for(20ms);
  EXPECT_EQ(n.load(), 1);
  cache.cancel(sub);
  cache.cancel(sub);
  cache.put({"s1", 2, 1.0});
  std::this_thread::sleep_for(20ms);
  EXPECT_EQ(n.load(), 1);
}

TEST(Subscriptions, EmptySetRejected) {
  SampleCache cache;
  EXPECT_THROW(cache.subscribe({}, std::make_shared<SampleQueue>()), PreconditionError);
}

TEST(Subscriptions, SlowConsumerDoesNotBlockPut) {
  SampleCache cache;
  std::atomic<bool> release{false};
  auto sub = cache.subscribe({"a"}, SampleCallback([&](const SensorSample&) {
                               while (!release) std::this_thread::sleep_for(1ms);
                             }));
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 1; i <= 1000; ++i) cache.put({"a", i, 1.0});
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 500ms);
  release = true;
  cache.cancel(sub);
}

TEST(Subscriptions, TwoSubscribersConcurrentWritersInOrder) {
  SampleCache cache(1000);
  std::mutex mu;
  std::map<std::string, std::vector<std::int64_t>> got[2];
  std::vector<Subscription> subs;
  for (int k = 0; k < 2; ++k)
    subs.push_back(cache.subscribe({"w0", "w1", "w2", "w3"}, SampleCallback([&, k](const SensorSample& s) {
                                     std::lock_guard lock(mu);
                                     got[k][s.sensor_id].push_back(s.timestamp);
                                   })));
  std::vector<std::thread> writers;
  for (int w = 0; w < 4; ++w)
    writers.emplace_back([&, w] {
      for (int i = 1; i <= 25; ++i) cache.put({"w" + std::to_string(w), i, 1.0});
    });
  for (auto& t : writers) t.join();
  for (int spin = 0; spin < 200; ++spin) {
    {
      std::lock_guard lock(mu);
      std::size_t total = 0;
      for (auto& g : got)
        for (auto& [_, v] : g) total += v.size();
      if (total == 200) break;
    }
    std::this_thread::sleep_for(5ms);
  }
  for (auto& s : subs) cache.cancel(s);
  std::vector<std::int64_t> expected(25);
  std::iota(expected.begin(), expected.end(), 1);
  for (int k = 0; k < 2; ++k)
    for (int w = 0; w < 4; ++w) EXPECT_EQ(got[k]["w" + std::to_string(w)], expected) << k << "/" << w;
}

}  // namespace
}  // namespace bora::cache
