#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "bora/net/http.hpp"
#include "bora/net/ws_session.hpp"

namespace bora::net {

/// Blocking WebSocket client with per-call timeouts. A read that times out
/// stays pending, so a later read() picks up the same message.
class WsClient {
 public:
  WsClient();
  ~WsClient();
  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  // Throws NetError on failure or timeout.
  void connect(const std::string& host, unsigned short port, const std::string& target,
               std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void send_text(const std::string& text, std::chrono::milliseconds timeout = std::chrono::seconds(5));

  // nullopt on timeout; throws NetError once the connection is closed.
  std::optional<WsMessage> read(std::chrono::milliseconds timeout);

  // Close handshake, bounded by `timeout`.
  void close(std::chrono::milliseconds timeout = std::chrono::seconds(1));
  // Drops the TCP connection without a close frame.
  void abort();
  bool is_open() const;
  bool closed_by_peer() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bora::net
