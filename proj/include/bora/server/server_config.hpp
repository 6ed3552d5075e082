#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bora/control/devices.hpp"
#include "bora/ingest/sample.hpp"
#include "bora/stream/streamer.hpp"

namespace bora::server {

inline constexpr const char* kTokenEnv = "BORA_TOKEN";
inline constexpr const char* kTokenHeader = "x-bora-token";

struct ConfigError : Error {
  explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

/// Everything `bora serve` needs. Relative paths in the file are resolved
/// against the config file's directory.
struct ServerConfig {
  std::string bind = "0.0.0.0";
  unsigned short port = 8080;
  std::filesystem::path spec_path;            // dashboard JSON
  std::optional<std::string> spec_text;       // inline spec instead of a file (tests, embedding)
  std::filesystem::path asset_root;           // where background images resolve; defaults to the spec's dir
  std::string token;                          // empty: mutating endpoints are open
  std::vector<ingest::SourceConfig> sources;
  std::vector<control::DeviceParamConfig> devices;
  std::vector<stream::StreamConfig> streams;
  std::filesystem::path recordings_dir = "recordings";
  std::optional<std::filesystem::path> static_dir;  // built frontend bundle
  std::optional<std::size_t> cache_capacity;        // overrides the spec's value
  std::size_t session_queue_limit = 256;            // per display session, in messages
  int io_threads = 2;
};

// Throws ConfigError with a path-like location ("sources[1].sim.period_ms").
ServerConfig parse_server_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
// Reads the file, parses, and applies the BORA_TOKEN override.
ServerConfig load_server_config(const std::filesystem::path& path);
void apply_env_overrides(ServerConfig& cfg);

}  // namespace bora::server
