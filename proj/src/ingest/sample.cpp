#include "bora/ingest/sample.hpp"

#include <algorithm>
#include <cmath>

namespace bora::ingest {

bool is_valid(const SensorSample& s) {
  return !s.sensor_id.empty() && s.timestamp > 0 && std::isfinite(s.value);
}

void sort_samples(std::vector<SensorSample>& samples) {
  std::stable_sort(samples.begin(), samples.end(), [](const SensorSample& a, const SensorSample& b) {
    if (a.sensor_id != b.sensor_id) return a.sensor_id < b.sensor_id;
    return a.timestamp < b.timestamp;
  });
}

std::optional<Waveform> waveform_from_string(const std::string& s) {
  if (s == "sine") return Waveform::sine;
  if (s == "ramp") return Waveform::ramp;
  if (s == "random_walk") return Waveform::random_walk;
  return std::nullopt;
}

void validate_source(const SourceConfig& cfg) {
  if (cfg.name.empty()) throw PreconditionError("source needs a name");
  if (cfg.sensors.empty()) throw PreconditionError("source " + cfg.name + " lists no sensors");
  if (cfg.protocol == kHttpPoll && cfg.endpoint.empty())
    throw PreconditionError("http_poll source " + cfg.name + " needs an endpoint");
  if (cfg.protocol == kSimulated) {
    if (!cfg.sim) throw PreconditionError("simulated source " + cfg.name + " needs a profile");
    if (cfg.sim->period_ms <= 0) throw PreconditionError("sim period_ms must be > 0");
  }
  if (cfg.poll_interval_ms && *cfg.poll_interval_ms <= 0)
    throw PreconditionError("poll_interval_ms must be > 0");
  if (cfg.window_s <= 0) throw PreconditionError("window_s must be > 0");
}

}  // namespace bora::ingest
