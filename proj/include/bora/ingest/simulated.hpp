#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "bora/ingest/sample.hpp"
#include "bora/util/clock.hpp"

namespace bora::ingest {

/// Deterministic waveform for one sensor. Sensor 0 of a sine profile starts
/// at phase zero; later sensors are phase-shifted by index·period/16.
/// random_walk draws its steps from a seed-derived mt19937_64, so value k of
/// a stream depends only on (seed, sensor index, k).
class SimulatedWaveform {
 public:
  SimulatedWaveform(const SimProfile& profile, std::size_t sensor_index);
  double sample(std::int64_t t_ms);

 private:
  SimProfile profile_;
  std::size_t index_;
  std::mt19937_64 rng_;
  double walk_ = 0.0;
};

/// Running simulated source: one sample per sensor per tick, timestamped
/// start + k·tick_ms. stop() returns within one tick and nothing is
/// delivered afterwards.
class SimulatedSource {
 public:
  SimulatedSource(SimProfile profile, std::vector<std::string> sensors, std::int64_t tick_ms,
                  SampleSink sink, util::MillisClock clock = util::system_millis_clock());
  ~SimulatedSource();
  SimulatedSource(const SimulatedSource&) = delete;
  SimulatedSource& operator=(const SimulatedSource&) = delete;

  void stop();
  std::uint64_t ticks() const;

 private:
  void run();

  SimProfile profile_;
  std::vector<std::string> sensors_;
  std::int64_t tick_ms_;
  SampleSink sink_;
  util::MillisClock clock_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::uint64_t ticks_ = 0;
  std::thread thread_;
};

inline constexpr std::int64_t kMinSimTickMs = 10;

std::unique_ptr<SimulatedSource> run_simulated_source(const SimProfile& profile,
                                                      const std::vector<std::string>& sensors,
                                                      std::int64_t tick_ms, SampleSink sink);

}  // namespace bora::ingest
