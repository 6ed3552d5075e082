#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bora/util/error.hpp"

namespace bora::ingest {

struct SensorSample {
  std::string sensor_id;
  std::int64_t timestamp = 0;  // UTC ms since epoch
  double value = 0.0;
  bool operator==(const SensorSample&) const = default;
};

// Finite value, positive timestamp, nonempty id.
bool is_valid(const SensorSample& s);

// Orders by (sensor_id, timestamp); stable so duplicates keep arrival order.
void sort_samples(std::vector<SensorSample>& samples);

using SampleSink = std::function<void(const SensorSample&)>;

struct FormatError : Error {
  FormatError(const std::string& message, std::size_t row = 0)
      : Error("FormatError", message), row(row) {}
  std::size_t row;  // 1-based CSV row, 0 when not applicable
};

struct TransportError : Error {
  explicit TransportError(const std::string& message) : Error("TransportError", message) {}
};

enum class Waveform { sine, ramp, random_walk };

std::optional<Waveform> waveform_from_string(const std::string& s);

struct SimProfile {
  Waveform waveform = Waveform::sine;
  std::int64_t period_ms = 1000;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kHttpPoll = "http_poll";
inline constexpr const char* kPushChannel = "push_channel";
inline constexpr const char* kSimulated = "simulated";

struct SourceConfig {
  std::string name;
  std::string protocol = kHttpPoll;  // any registered protocol name
  std::string endpoint;
  std::vector<std::string> sensors;
  std::optional<std::int64_t> poll_interval_ms;
  std::int64_t window_s = 600;
  std::optional<SimProfile> sim;
  std::int64_t tick_ms = 1000;  // simulated sources only

  std::int64_t effective_poll_interval_ms(std::int64_t fallback) const {
    return poll_interval_ms.value_or(fallback);
  }
};

// Throws PreconditionError describing the first broken SourceConfig invariant.
void validate_source(const SourceConfig& cfg);

}  // namespace bora::ingest
