#include "bora/cache/sample_cache.hpp"

#include <algorithm>
#include <limits>

namespace bora::cache {

void SampleQueue::push(const SensorSample& s) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    items_.push_back(s);
  }
  cv_.notify_one();
}

std::optional<SensorSample> SampleQueue::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [this] { return closed_ || !items_.empty(); });
  if (items_.empty()) return std::nullopt;
  SensorSample s = std::move(items_.front());
  items_.pop_front();
  return s;
}

std::optional<SensorSample> SampleQueue::try_pop() {
  std::lock_guard lock(mu_);
  if (items_.empty()) return std::nullopt;
  SensorSample s = std::move(items_.front());
  items_.pop_front();
  return s;
}

void SampleQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
    items_.clear();
  }
  cv_.notify_all();
}

bool SampleQueue::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::size_t SampleQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

namespace detail {

struct Subscriber {
  std::set<std::string> sensor_ids;
  std::shared_ptr<SampleQueue> queue;
  SampleCallback callback;  // empty for queue deliveries
  std::thread dispatcher;

  void start() {
    if (!callback) return;
    // Owns copies so a detached dispatcher outlives the Subscriber safely.
    dispatcher = std::thread([q = queue, cb = callback] {
      while (!q->closed()) {
        if (auto s = q->pop(std::chrono::milliseconds(200))) cb(*s);
      }
    });
  }

  void stop() {
    queue->close();
    if (!dispatcher.joinable()) return;
    if (dispatcher.get_id() == std::this_thread::get_id()) dispatcher.detach();
    else dispatcher.join();
  }
};

}  // namespace detail

SampleCache::SampleCache(std::size_t default_capacity, util::MillisClock clock)
    : default_capacity_(default_capacity), clock_(std::move(clock)) {
  if (default_capacity_ == 0) throw PreconditionError("cache capacity must be > 0");
}

SampleCache::~SampleCache() {
  std::vector<std::shared_ptr<detail::Subscriber>> subs;
  {
    std::unique_lock lock(mu_);
    for (auto& [_, s] : subscribers_) subs.push_back(s);
    subscribers_.clear();
    by_sensor_.clear();
  }
  for (auto& s : subs) s->stop();
}

void SampleCache::put(const SensorSample& s) {
  if (!ingest::is_valid(s)) throw PreconditionError("invalid sample for sensor '" + s.sensor_id + "'");
  std::unique_lock lock(mu_);
  auto it = rings_.find(s.sensor_id);
  if (it == rings_.end()) it = rings_.emplace(s.sensor_id, RingSeries(s.sensor_id, default_capacity_)).first;
  it->second.put(s);
  if (auto subs = by_sensor_.find(s.sensor_id); subs != by_sensor_.end())
    for (const auto& sub : subs->second) sub->queue->push(s);
}

void SampleCache::put_all(const std::vector<SensorSample>& samples) {
  for (const auto& s : samples) put(s);
}

std::vector<SensorSample> SampleCache::recent(const std::string& sensor_id, std::int64_t window_ms) const {
  if (window_ms <= 0) throw PreconditionError("window_ms must be > 0");
  const std::int64_t now = clock_();
  const std::int64_t min_ts = window_ms >= now ? std::numeric_limits<std::int64_t>::min() : now - window_ms;
  std::shared_lock lock(mu_);
  auto it = rings_.find(sensor_id);
  if (it == rings_.end()) return {};
  return it->second.since(min_ts);
}

std::optional<SensorSample> SampleCache::latest(const std::string& sensor_id) const {
  std::shared_lock lock(mu_);
  auto it = rings_.find(sensor_id);
  if (it == rings_.end()) return std::nullopt;
  return it->second.latest();
}

Subscription SampleCache::subscribe(const std::set<std::string>& sensor_ids, Delivery delivery) {
  if (sensor_ids.empty()) throw PreconditionError("subscription needs at least one sensor");
  auto sub = std::make_shared<detail::Subscriber>();
  sub->sensor_ids = sensor_ids;
  if (auto* q = std::get_if<std::shared_ptr<SampleQueue>>(&delivery)) {
    if (!*q) throw PreconditionError("null delivery queue");
    sub->queue = *q;
  } else {
    sub->callback = std::get<SampleCallback>(std::move(delivery));
    if (!sub->callback) throw PreconditionError("empty delivery callback");
    sub->queue = std::make_shared<SampleQueue>();
  }
  sub->start();

  std::unique_lock lock(mu_);
  const std::uint64_t id = next_id_++;
  subscribers_.emplace(id, sub);
  for (const auto& sensor : sensor_ids) by_sensor_[sensor].push_back(sub);
  return Subscription(id, sub);
}

void SampleCache::cancel(const Subscription& sub) {
  std::shared_ptr<detail::Subscriber> found;
  {
    std::unique_lock lock(mu_);
    auto it = subscribers_.find(sub.id());
    if (it == subscribers_.end()) return;
    found = it->second;
    subscribers_.erase(it);
    for (const auto& sensor : found->sensor_ids) {
      auto& list = by_sensor_[sensor];
      std::erase(list, found);
      if (list.empty()) by_sensor_.erase(sensor);
    }
  }
  found->stop();
}

void SampleCache::set_default_capacity(std::size_t capacity) {
  if (capacity == 0) throw PreconditionError("cache capacity must be > 0");
  std::unique_lock lock(mu_);
  default_capacity_ = capacity;
}

std::vector<std::string> SampleCache::sensors() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : rings_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bora::cache
