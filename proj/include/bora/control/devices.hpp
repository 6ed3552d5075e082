#pragma once

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bora/cache/sample_cache.hpp"
#include "bora/util/clock.hpp"
#include "bora/util/error.hpp"

namespace bora::control {

struct DeviceParamConfig {
  std::string id;  // sensor-like id, e.g. "cam.exposure"
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();  // both bounds inclusive
  double initial = 0;
};

struct DeviceState {
  double value = 0;
  std::int64_t last_set_ts = 0;  // UTC ms; 0 until the first write
  std::string setter;
};

struct DeviceAck {
  std::string param_id;
  double value = 0;
  std::int64_t ts = 0;
};

struct UnknownDevice : Error {
  explicit UnknownDevice(const std::string& id) : Error("UnknownDevice", "unknown device parameter: " + id) {}
};

struct ValueOutOfRange : Error {
  explicit ValueOutOfRange(const std::string& message) : Error("ValueOutOfRange", message) {}
};

/// Simulated device parameters. Each accepted write is echoed into the
/// sample cache under the parameter id, so bound widgets see it on the next
/// broadcast.
class DeviceRegistry {
 public:
  DeviceRegistry(std::vector<DeviceParamConfig> params, std::shared_ptr<cache::RecentStore> cache,
                 util::MillisClock clock = util::system_millis_clock());

  // Throws UnknownDevice, or ValueOutOfRange (registry unchanged) outside
  // [min, max] or for non-finite values.
  DeviceAck set(const std::string& param_id, double value, const std::string& setter = {});

  std::optional<DeviceState> get(const std::string& param_id) const;
  const DeviceParamConfig* config(const std::string& param_id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, DeviceParamConfig> configs_;
  std::shared_ptr<cache::RecentStore> cache_;
  util::MillisClock clock_;
  mutable std::mutex mu_;
  std::map<std::string, DeviceState> state_;
};

}  // namespace bora::control
