#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bora::net {

struct WsMessage {
  bool binary = false;
  std::string data;
};

/// Server side of one WebSocket connection. All methods are thread-safe:
/// the socket is driven on its own strand and a read loop runs for the
/// whole session (answering pings and close frames), so handler threads
/// only ever queue work.
class WsSession {
 public:
  virtual ~WsSession() = default;

  // Block until the frame is written (or the session fails). Returns false
  // when the session is closed or the write does not finish in `timeout`.
  virtual bool send_text(std::string message,
                         std::chrono::milliseconds timeout = std::chrono::seconds(5)) = 0;
  virtual bool send_binary(std::string payload,
                           std::chrono::milliseconds timeout = std::chrono::seconds(5)) = 0;

  // Next inbound message; nullopt on timeout or once closed and drained.
  virtual std::optional<WsMessage> receive(std::chrono::milliseconds timeout) = 0;

  // Sends a close frame after queued writes drain; returns once the close
  // handshake finished or was forced (about a second at most).
  virtual void close() = 0;

  virtual bool is_open() const = 0;
  virtual bool wait_closed(std::chrono::milliseconds timeout) = 0;
  virtual std::uint64_t id() const = 0;
};

}  // namespace bora::net
