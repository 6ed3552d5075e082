#include "bora/server/server_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>

#include "bora/config/bundle.hpp"
#include "bora/ingest/simulated.hpp"

namespace bora::server {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Small typed accessor that names the offending key on failure and
// rejects keys nobody reads.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const char* key) {
    seen_.push_back(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  template <typename T>
  T get(const char* key, T fallback) {
    if (!has(key)) return fallback;
    return as<T>(key);
  }

  template <typename T>
  T need(const char* key) {
    if (!has(key)) throw ConfigError(path(key) + ": required");
    return as<T>(key);
  }

  const json& raw(const char* key) {
    seen_.push_back(key);
    return j_.at(key);
  }

  std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ConfigError(path(it.key().c_str()) + ": unknown key");
    }
  }

 private:
  template <typename T>
  T as(const char* key) {
    const json& v = j_[key];
    bool ok;
    if constexpr (std::is_same_v<T, std::string>) {
      ok = v.is_string();
    } else if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      ok = v.is_number_integer() && (std::is_signed_v<T> || v.get<std::int64_t>() >= 0);
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else {
      ok = v.is_array();
    }
    if (!ok) throw ConfigError(path(key) + ": wrong type");
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path(key) + ": " + e.what());
    }
  }

  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError(where + ": entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

ingest::SourceConfig parse_source(const json& j, const std::string& where) {
  Obj o(j, where);
  ingest::SourceConfig s;
  s.name = o.need<std::string>("name");
  s.protocol = o.get<std::string>("protocol", s.protocol);
  s.endpoint = o.get<std::string>("endpoint", "");
  if (o.has("sensors")) s.sensors = string_list(o.raw("sensors"), o.path("sensors"));
  if (o.has("poll_interval_ms")) s.poll_interval_ms = o.need<std::int64_t>("poll_interval_ms");
  s.window_s = o.get<std::int64_t>("window_s", s.window_s);
  s.tick_ms = o.get<std::int64_t>("tick_ms", s.tick_ms);
  if (o.has("sim")) {
    Obj sim(o.raw("sim"), o.path("sim"));
    ingest::SimProfile p;
    std::string wf = sim.get<std::string>("waveform", "sine");
    auto w = ingest::waveform_from_string(wf);
    if (!w) throw ConfigError(sim.path("waveform") + ": unknown waveform '" + wf + "'");
    p.waveform = *w;
    p.period_ms = sim.get<std::int64_t>("period_ms", p.period_ms);
    p.amplitude = sim.get<double>("amplitude", p.amplitude);
    p.seed = sim.get<std::uint64_t>("seed", p.seed);
    sim.finish();
    s.sim = p;
  }
  o.finish();
  try {
    ingest::validate_source(s);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (s.protocol == ingest::kSimulated && s.tick_ms < ingest::kMinSimTickMs)
    throw ConfigError(where + ".tick_ms: must be >= " + std::to_string(ingest::kMinSimTickMs));
  return s;
}

control::DeviceParamConfig parse_device(const json& j, const std::string& where) {
  Obj o(j, where);
  control::DeviceParamConfig d;
  d.id = o.need<std::string>("id");
  d.min = o.get<double>("min", d.min);
  d.max = o.get<double>("max", d.max);
  d.initial = o.get<double>("initial", d.min > 0 ? d.min : 0);
  o.finish();
  if (!(d.min <= d.max)) throw ConfigError(where + ": min exceeds max");
  if (d.initial < d.min || d.initial > d.max) throw ConfigError(where + ".initial: outside [min, max]");
  return d;
}

stream::StreamConfig parse_stream(const json& j, const std::string& where) {
  Obj o(j, where);
  stream::StreamConfig s;
  s.id = o.need<std::string>("id");
  auto w = o.get<std::uint32_t>("width", 640), h = o.get<std::uint32_t>("height", 480);
  s.pattern = (w == 640 && h == 480) ? stream::PatternParams{} : stream::PatternParams::fit(w, h);
  s.pattern.period_ms = o.get<std::int64_t>("period_ms", s.pattern.period_ms);
  s.fps = o.get<double>("fps", s.fps);
  s.segment_target_ms = o.get<std::int64_t>("segment_ms", s.segment_target_ms);
  s.playlist_wrap = o.get<std::size_t>("wrap", s.playlist_wrap);
  s.encode_delay_ms = o.get<std::int64_t>("encode_delay_ms", s.encode_delay_ms);
  s.ring_capacity = o.get<std::size_t>("ring_capacity", s.ring_capacity);
  o.finish();
  try {
    stream::validate_stream_config(s);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return s;
}

}  // namespace

ServerConfig parse_server_config(std::string_view json_text, const fs::path& base_dir) {
  json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("server config is not valid JSON");
  Obj o(doc, "");
  ServerConfig cfg;
  cfg.bind = o.get<std::string>("bind", cfg.bind);
  cfg.port = o.get<unsigned short>("port", cfg.port);
  if (o.has("spec")) {
    cfg.spec_path = resolve(base_dir, o.need<std::string>("spec"));
  } else if (o.has("spec_inline")) {
    cfg.spec_text = o.raw("spec_inline").dump();
  } else {
    throw ConfigError("spec: required");
  }
  cfg.asset_root = o.has("asset_root") ? resolve(base_dir, o.need<std::string>("asset_root"))
                                       : (cfg.spec_path.empty() ? base_dir : cfg.spec_path.parent_path());
  cfg.token = o.get<std::string>("token", "");
  if (o.has("sources")) {
    const json& arr = o.raw("sources");
    if (!arr.is_array()) throw ConfigError("sources: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.sources.push_back(parse_source(arr[i], "sources[" + std::to_string(i) + "]"));
  }
  if (o.has("devices")) {
    const json& arr = o.raw("devices");
    if (!arr.is_array()) throw ConfigError("devices: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.devices.push_back(parse_device(arr[i], "devices[" + std::to_string(i) + "]"));
  }
  if (o.has("streams")) {
    const json& arr = o.raw("streams");
    if (!arr.is_array()) throw ConfigError("streams: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.streams.push_back(parse_stream(arr[i], "streams[" + std::to_string(i) + "]"));
  }
  cfg.recordings_dir = resolve(base_dir, o.get<std::string>("recordings_dir", "recordings"));
  if (o.has("static_dir")) cfg.static_dir = resolve(base_dir, o.need<std::string>("static_dir"));
  if (o.has("cache_capacity")) {
    cfg.cache_capacity = o.need<std::size_t>("cache_capacity");
    if (*cfg.cache_capacity == 0) throw ConfigError("cache_capacity: must be > 0");
  }
  cfg.session_queue_limit = o.get<std::size_t>("session_queue_limit", cfg.session_queue_limit);
  cfg.io_threads = o.get<int>("io_threads", cfg.io_threads);
  o.finish();

  std::vector<std::string> names;
  for (const auto& s : cfg.sources) {
    if (std::find(names.begin(), names.end(), s.name) != names.end())
      throw ConfigError("sources: duplicate name '" + s.name + "'");
    names.push_back(s.name);
  }
  return cfg;
}

void apply_env_overrides(ServerConfig& cfg) {
  if (const char* t = std::getenv(kTokenEnv)) cfg.token = t;
}

ServerConfig load_server_config(const fs::path& path) {
  std::string text;
  try {
    text = config::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  ServerConfig cfg = parse_server_config(text, path.parent_path());
  apply_env_overrides(cfg);
  return cfg;
}

}  // namespace bora::server
