#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "bora/net/http.hpp"
#include "bora/net/ws_session.hpp"

namespace bora::net {

using HttpHandler = std::function<HttpResponse(const HttpRequest&)>;
// Runs on the connection's own thread for the lifetime of the session; the
// session is closed when the handler returns.
using WsHandler = std::function<void(const std::shared_ptr<WsSession>&, const HttpRequest&)>;

/// HTTP/1.1 + WebSocket server on one port. Each connection gets its own
/// thread (plain HTTP is handled synchronously with keep-alive); WebSocket
/// I/O runs on a small shared io pool.
class HttpServer {
 public:
  struct Options {
    std::string address = "127.0.0.1";
    unsigned short port = 0;  // 0 picks an ephemeral port
    int io_threads = 2;
  };

  explicit HttpServer(Options options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  void route(std::string method, std::string pattern, HttpHandler handler);
  void ws_route(std::string pattern, WsHandler handler);

  // Binds and starts accepting. Throws NetError when the port is unavailable.
  void start();
  unsigned short port() const;

  // Stops accepting, closes every WebSocket session with a close frame and
  // waits for connection threads to finish.
  void stop();
  bool running() const;
  std::size_t websocket_sessions() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace bora::net
