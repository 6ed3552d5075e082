#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bora/cache/ring_series.hpp"
#include "bora/config/dashboard.hpp"
#include "bora/util/clock.hpp"

namespace bora::cache {

/// Unbounded blocking FIFO of samples; close() wakes all waiters.
class SampleQueue {
 public:
  void push(const SensorSample& s);
  std::optional<SensorSample> pop(std::chrono::milliseconds timeout);
  std::optional<SensorSample> try_pop();
  void close();
  bool closed() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<SensorSample> items_;
  bool closed_ = false;
};

using SampleCallback = std::function<void(const SensorSample&)>;
using Delivery = std::variant<SampleCallback, std::shared_ptr<SampleQueue>>;

namespace detail {
struct Subscriber;
}

class Subscription {
 public:
  Subscription() = default;
  std::uint64_t id() const { return id_; }
  explicit operator bool() const { return id_ != 0; }

 private:
  friend class SampleCache;
  Subscription(std::uint64_t id, std::shared_ptr<detail::Subscriber> sub) : id_(id), sub_(std::move(sub)) {}
  std::uint64_t id_ = 0;
  std::shared_ptr<detail::Subscriber> sub_;
};

/// Read/write surface of the recent-data store, so an external store can
/// stand in for the in-process cache.
class RecentStore {
 public:
  virtual ~RecentStore() = default;
  virtual void put(const SensorSample& s) = 0;
  virtual std::vector<SensorSample> recent(const std::string& sensor_id, std::int64_t window_ms) const = 0;
  virtual std::optional<SensorSample> latest(const std::string& sensor_id) const = 0;
  virtual Subscription subscribe(const std::set<std::string>& sensor_ids, Delivery delivery) = 0;
  virtual void cancel(const Subscription& sub) = 0;
};

/// Thread-safe per-sensor ring buffers with subscriptions.
///
/// Subscribers are handed each matching put, in put order per sensor.
/// Deliveries are queued while the store lock is held (which fixes their
/// order) and consumed outside it: callback subscriptions run on their own
/// dispatcher thread, queue subscriptions are drained by the subscriber. A
/// slow consumer therefore never stalls put().
class SampleCache final : public RecentStore {
 public:
  explicit SampleCache(std::size_t default_capacity = config::kDefaultCacheCapacity,
                       util::MillisClock clock = util::system_millis_clock());
  ~SampleCache() override;

  // Throws PreconditionError on an invalid sample.
  void put(const SensorSample& s) override;
  void put_all(const std::vector<SensorSample>& samples);

  // Samples with timestamp >= now - window_ms, oldest first. Unknown sensors
  // yield an empty list.
  std::vector<SensorSample> recent(const std::string& sensor_id, std::int64_t window_ms) const override;
  std::optional<SensorSample> latest(const std::string& sensor_id) const override;

  Subscription subscribe(const std::set<std::string>& sensor_ids, Delivery delivery) override;
  // Idempotent. Once it returns no further callbacks run for `sub`.
  void cancel(const Subscription& sub) override;

  // Applies to rings created after the call.
  void set_default_capacity(std::size_t capacity);
  std::vector<std::string> sensors() const;
  std::int64_t now() const { return clock_(); }

 private:
  mutable std::shared_mutex mu_;
  std::size_t default_capacity_;
  util::MillisClock clock_;
  std::unordered_map<std::string, RingSeries> rings_;
  std::unordered_map<std::string, std::vector<std::shared_ptr<detail::Subscriber>>> by_sensor_;
  std::unordered_map<std::uint64_t, std::shared_ptr<detail::Subscriber>> subscribers_;
  std::uint64_t next_id_ = 1;
};

}  // namespace bora::cache
