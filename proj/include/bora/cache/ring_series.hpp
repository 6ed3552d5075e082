#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bora/ingest/sample.hpp"

namespace bora::cache {

using ingest::SensorSample;

/// Fixed-capacity, timestamp-ordered ring of one sensor's samples.
/// Insertion sorts from the tail; a full ring evicts its oldest entry, and a
/// sample older than the oldest entry of a full ring is dropped. A repeated
/// timestamp overwrites the stored value.
class RingSeries {
 public:
  enum class PutResult { appended, inserted, replaced, dropped };

  RingSeries(std::string sensor_id, std::size_t capacity);

  PutResult put(const SensorSample& s);

  // Samples with timestamp >= min_ts, oldest first.
  std::vector<SensorSample> since(std::int64_t min_ts) const;
  std::vector<SensorSample> all() const { return since(INT64_MIN); }
  std::optional<SensorSample> latest() const;

  const std::string& sensor_id() const { return sensor_id_; }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return slots_.size(); }

 private:
  // Logical index 0 is the oldest sample.
  SensorSample& at(std::size_t i) { return slots_[(head_ + i) % slots_.size()]; }
  const SensorSample& at(std::size_t i) const { return slots_[(head_ + i) % slots_.size()]; }
  std::size_t lower_bound(std::int64_t ts) const;

  std::string sensor_id_;
  std::vector<SensorSample> slots_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

}  // namespace bora::cache
