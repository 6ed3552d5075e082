#include "bora/control/devices.hpp"

#include <cmath>

namespace bora::control {

DeviceRegistry::DeviceRegistry(std::vector<DeviceParamConfig> params, std::shared_ptr<cache::RecentStore> cache,
                               util::MillisClock clock)
    : cache_(std::move(cache)), clock_(std::move(clock)) {
  for (auto& p : params) {
    if (p.id.empty()) throw PreconditionError("device parameter id must be nonempty");
    if (!(p.min <= p.max)) throw PreconditionError("device " + p.id + ": min must not exceed max");
    state_[p.id] = DeviceState{p.initial, 0, "config"};
    std::string id = p.id;
    if (!configs_.emplace(id, std::move(p)).second) throw PreconditionError("duplicate device parameter: " + id);
  }
}

DeviceAck DeviceRegistry::set(const std::string& param_id, double value, const std::string& setter) {
  auto it = configs_.find(param_id);
  if (it == configs_.end()) throw UnknownDevice(param_id);
  const auto& cfg = it->second;
  if (!std::isfinite(value) || value < cfg.min || value > cfg.max) {
    throw ValueOutOfRange(param_id + " = " + std::to_string(value) + " outside [" + std::to_string(cfg.min) + ", " +
                          std::to_string(cfg.max) + "]");
  }
  DeviceAck ack{param_id, value, 0};
  {
    // The cache echo happens under the lock so cache order matches ack order.
    std::lock_guard lock(mu_);
    ack.ts = clock_();
    state_[param_id] = DeviceState{value, ack.ts, setter};
    if (cache_) cache_->put({param_id, ack.ts, value});
  }
  return ack;
}

std::optional<DeviceState> DeviceRegistry::get(const std::string& param_id) const {
  std::lock_guard lock(mu_);
  auto it = state_.find(param_id);
  if (it == state_.end()) return std::nullopt;
  return it->second;
}

const DeviceParamConfig* DeviceRegistry::config(const std::string& param_id) const {
  auto it = configs_.find(param_id);
  return it == configs_.end() ? nullptr : &it->second;
}

std::vector<std::string> DeviceRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, c] : configs_) out.push_back(id);
  return out;
}

}  // namespace bora::control
