#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "bora/cache/sample_cache.hpp"
#include "bora/control/service.hpp"
#include "bora/ingest/http_poll.hpp"
#include "bora/ingest/registry.hpp"
#include "bora/ingest/simulated.hpp"
#include "bora/net/http_server.hpp"
#include "bora/server/server_config.hpp"
#include "bora/stream/transports.hpp"

namespace bora::server {

namespace detail {
struct DisplaySession;
}

/// The running service: ingestion sources feed the cache, a ticker fans
/// cache deltas out to display sessions every poll interval, and the
/// control service owns the live spec.
///
/// Every display session receives messages through its own bounded queue,
/// filled under one lock by both the spec listener and the ticker, so spec
/// and data messages reach each display in a single total order.
class Server {
 public:
  // Loads and validates the spec; throws config::SyntaxError,
  // config::ValidationError, ConfigError. Nothing is started yet.
  explicit Server(ServerConfig cfg, std::shared_ptr<ingest::ParserRegistry> registry = nullptr);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds (throws net::NetError) and starts streams, sources and the ticker.
  void start();
  // Closes every session with a close frame and stops all tasks; bounded
  // to roughly two seconds.
  void stop();

  unsigned short port() const;
  const ServerConfig& config() const { return cfg_; }
  cache::SampleCache& cache() { return *cache_; }
  control::ControlService& control() { return *control_; }
  stream::StreamHub& streams() { return *hub_; }
  std::size_t display_sessions() const;

  // One fan-out round; the ticker calls this every poll interval.
  void broadcast_tick();

 private:
  void mount_routes();
  void on_spec_published(const control::SpecHandle& spec);
  void serve_display(const std::shared_ptr<net::WsSession>& ws);
  void tick_loop();

  ServerConfig cfg_;
  std::shared_ptr<ingest::ParserRegistry> registry_;
  std::shared_ptr<cache::SampleCache> cache_;
  std::shared_ptr<stream::StreamHub> hub_;
  std::shared_ptr<control::RecordingService> recordings_;
  std::unique_ptr<control::ControlService> control_;
  std::unique_ptr<net::HttpServer> http_;

  std::vector<std::unique_ptr<ingest::PollingSource>> pollers_;
  std::vector<std::unique_ptr<ingest::SimulatedSource>> simulators_;
  std::map<std::string, ingest::SourceConfig> push_sources_;

  mutable std::mutex sessions_mu_;
  control::SpecHandle broadcast_spec_;  // spec as last announced to sessions
  std::map<std::uint64_t, std::shared_ptr<detail::DisplaySession>> sessions_;
  std::uint64_t next_session_ = 1;

  std::mutex tick_mu_;
  std::condition_variable tick_cv_;
  bool stopping_ = false;
  bool started_ = false;
  std::thread ticker_;
};

}  // namespace bora::server
