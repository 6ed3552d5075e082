#include "bora/cache/ring_series.hpp"

namespace bora::cache {

RingSeries::RingSeries(std::string sensor_id, std::size_t capacity)
    : sensor_id_(std::move(sensor_id)), slots_(capacity) {
  if (capacity == 0) throw PreconditionError("ring capacity must be > 0");
}

std::size_t RingSeries::lower_bound(std::int64_t ts) const {
  std::size_t lo = 0, hi = size_;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (at(mid).timestamp < ts) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

RingSeries::PutResult RingSeries::put(const SensorSample& s) {
  const std::size_t cap = slots_.size();
  if (size_ == 0 || s.timestamp > at(size_ - 1).timestamp) {
    if (size_ == cap) {
      slots_[head_] = s;  // overwrite the oldest; it becomes the newest
      head_ = (head_ + 1) % cap;
    } else {
      at(size_) = s;
      ++size_;
    }
    return PutResult::appended;
  }

  // Walk back from the tail to the insertion point.
  std::size_t pos = size_;
  while (pos > 0 && at(pos - 1).timestamp > s.timestamp) --pos;
  if (pos > 0 && at(pos - 1).timestamp == s.timestamp) {
    at(pos - 1).value = s.value;
    return PutResult::replaced;
  }
  if (size_ == cap) {
    if (pos == 0) return PutResult::dropped;
    // Evict the oldest, then shift [1, pos) down one slot to open pos-1.
    for (std::size_t i = 0; i + 1 < pos; ++i) at(i) = at(i + 1);
    at(pos - 1) = s;
    return PutResult::inserted;
  }
  for (std::size_t i = size_; i > pos; --i) at(i) = at(i - 1);
  at(pos) = s;
  ++size_;
  return PutResult::inserted;
}

std::vector<SensorSample> RingSeries::since(std::int64_t min_ts) const {
  std::vector<SensorSample> out;
  const std::size_t first = lower_bound(min_ts);
  out.reserve(size_ - first);
  for (std::size_t i = first; i < size_; ++i) out.push_back(at(i));
  return out;
}

std::optional<SensorSample> RingSeries::latest() const {
  if (size_ == 0) return std::nullopt;
  return at(size_ - 1);
}

}  // namespace bora::cache
