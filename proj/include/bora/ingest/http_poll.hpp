#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bora/ingest/registry.hpp"

namespace bora::ingest {

/// One GET {endpoint}?sensors=a,b&window=N, parsed with the parser
/// registered for cfg.protocol. Samples come back sorted by
/// (sensor_id, timestamp); requested sensors with no rows are logged, not
/// treated as errors. The request times out after 80% of the poll interval.
std::vector<SensorSample> poll_http_source(const SourceConfig& cfg, std::int64_t window_s,
                                           const ParserRegistry& registry,
                                           std::int64_t default_interval_ms = 2000);

/// Periodic poller. Requests are spaced by the poll interval and never
/// overlap: the next poll is scheduled only after the previous one returns
/// (success, error, or timeout).
class PollingSource {
 public:
  PollingSource(SourceConfig cfg, std::shared_ptr<const ParserRegistry> registry, SampleSink sink,
                std::int64_t default_interval_ms = 2000);
  ~PollingSource();
  PollingSource(const PollingSource&) = delete;
  PollingSource& operator=(const PollingSource&) = delete;

  void stop();

  std::uint64_t polls() const { return polls_.load(); }
  std::uint64_t failures() const { return failures_.load(); }

 private:
  void run();

  SourceConfig cfg_;
  std::shared_ptr<const ParserRegistry> registry_;
  SampleSink sink_;
  std::int64_t interval_ms_;
  std::atomic<std::uint64_t> polls_{0};
  std::atomic<std::uint64_t> failures_{0};
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace bora::ingest
