#pragma once

// Brute-force model of the sample cache: an unbounded sorted map per sensor
// (last write wins on equal timestamps), truncated to the newest `capacity`
// entries on read.

#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bora/ingest/sample.hpp"

namespace bora::testing {

class CacheOracle {
 public:
  explicit CacheOracle(std::size_t capacity) : capacity_(capacity) {}

  void put(const ingest::SensorSample& s) { series_[s.sensor_id][s.timestamp] = s.value; }

  std::vector<ingest::SensorSample> retained(const std::string& id) const {
    std::vector<ingest::SensorSample> out;
    auto it = series_.find(id);
    if (it == series_.end()) return out;
    const auto& m = it->second;
    auto start = m.begin();
    if (m.size() > capacity_) std::advance(start, static_cast<long>(m.size() - capacity_));
    for (auto p = start; p != m.end(); ++p) out.push_back({id, p->first, p->second});
    return out;
  }

  std::vector<ingest::SensorSample> recent(const std::string& id, std::int64_t now, std::int64_t window) const {
    std::vector<ingest::SensorSample> out;
    for (const auto& s : retained(id))
      if (s.timestamp >= now - window) out.push_back(s);
    return out;
  }

  std::optional<ingest::SensorSample> latest(const std::string& id) const {
    auto r = retained(id);
    if (r.empty()) return std::nullopt;
    return r.back();
  }

 private:
  std::size_t capacity_;
  std::map<std::string, std::map<std::int64_t, double>> series_;
};

}  // namespace bora::testing
