#include "bora/ingest/simulated.hpp"

#include <cmath>
#include <numbers>

namespace bora::ingest {

SimulatedWaveform::SimulatedWaveform(const SimProfile& profile, std::size_t sensor_index)
    : profile_(profile), index_(sensor_index), rng_(profile.seed ^ (0x9E3779B97F4A7C15ull * (sensor_index + 1))) {
  if (profile_.period_ms <= 0) throw PreconditionError("period_ms must be > 0");
}

double SimulatedWaveform::sample(std::int64_t t_ms) {
  const double period = static_cast<double>(profile_.period_ms);
  switch (profile_.waveform) {
    case Waveform::sine: {
      const double shifted = static_cast<double>(t_ms) + static_cast<double>(index_) * period / 16.0;
      return profile_.amplitude * std::sin(2.0 * std::numbers::pi * shifted / period);
    }
    case Waveform::ramp: {
      const auto phase = ((t_ms + static_cast<std::int64_t>(index_) * profile_.period_ms / 16) %
                          profile_.period_ms + profile_.period_ms) % profile_.period_ms;
      return profile_.amplitude * static_cast<double>(phase) / period;
    }
    case Waveform::random_walk: {
      // 53 random bits mapped to [0, 1); bit-exact across platforms.
      const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      walk_ += profile_.amplitude * 0.05 * (2.0 * u - 1.0);
      return walk_;
    }
  }
  return 0.0;
}

SimulatedSource::SimulatedSource(SimProfile profile, std::vector<std::string> sensors,
                                 std::int64_t tick_ms, SampleSink sink, util::MillisClock clock)
    : profile_(profile),
      sensors_(std::move(sensors)),
      tick_ms_(tick_ms),
      sink_(std::move(sink)),
      clock_(std::move(clock)) {
  if (tick_ms_ < kMinSimTickMs) throw PreconditionError("tick_ms must be >= 10");
  if (sensors_.empty()) throw PreconditionError("simulated source needs at least one sensor");
  if (profile_.period_ms <= 0) throw PreconditionError("period_ms must be > 0");
  thread_ = std::thread([this] { run(); });
}

SimulatedSource::~SimulatedSource() { stop(); }

void SimulatedSource::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

std::uint64_t SimulatedSource::ticks() const {
  std::lock_guard lock(mu_);
  return ticks_;
}

void SimulatedSource::run() {
  std::vector<SimulatedWaveform> waves;
  for (std::size_t i = 0; i < sensors_.size(); ++i) waves.emplace_back(profile_, i);

  const std::int64_t start_ms = clock_();
  const auto start = std::chrono::steady_clock::now();
  for (std::int64_t k = 0;; ++k) {
    {
      std::unique_lock lock(mu_);
      const auto due = start + std::chrono::milliseconds(k * tick_ms_);
      if (cv_.wait_until(lock, due, [this] { return stopping_; })) return;
      ++ticks_;
    }
    const std::int64_t t_ms = k * tick_ms_;
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
      sink_(SensorSample{sensors_[i], start_ms + t_ms, waves[i].sample(t_ms)});
    }
  }
}

std::unique_ptr<SimulatedSource> run_simulated_source(const SimProfile& profile,
                                                      const std::vector<std::string>& sensors,
                                                      std::int64_t tick_ms, SampleSink sink) {
  return std::make_unique<SimulatedSource>(profile, sensors, tick_ms, std::move(sink));
}

}  // namespace bora::ingest
