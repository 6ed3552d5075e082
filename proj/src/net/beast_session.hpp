#pragma once

// Internal: the Beast-backed WebSocket session shared by the server files.

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <deque>
#include <future>
#include <mutex>

#include "bora/net/ws_session.hpp"

namespace bora::net::detail {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

class BeastWsSession final : public WsSession, public std::enable_shared_from_this<BeastWsSession> {
 public:
  // The socket's executor must be a strand.
  BeastWsSession(tcp::socket socket, std::uint64_t id);

  // Server handshake, run synchronously by the connection thread before
  // start(). Throws beast::system_error.
  void accept(const http::request<http::string_body>& req);
  void start();

  bool send_text(std::string message, std::chrono::milliseconds timeout) override;
  bool send_binary(std::string payload, std::chrono::milliseconds timeout) override;
  std::optional<WsMessage> receive(std::chrono::milliseconds timeout) override;
  void close() override;
  bool is_open() const override;
  bool wait_closed(std::chrono::milliseconds timeout) override;
  std::uint64_t id() const override { return id_; }

  // Non-blocking: queue a close frame behind pending writes.
  void initiate_close();
  // Non-blocking: drop the socket.
  void force_close();

 private:
  struct Outgoing {
    std::shared_ptr<std::string> data;
    bool binary = false;
    std::shared_ptr<std::promise<bool>> done;
  };

  bool enqueue(std::string data, bool binary, std::chrono::milliseconds timeout);
  void do_read();
  void do_write();
  void do_close();
  void mark_closed();  // strand only

  static constexpr std::size_t kInboxLimit = 1024;

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer read_buffer_;
  std::uint64_t id_;

  // Touched only on the strand.
  std::deque<Outgoing> out_;
  bool writing_ = false;
  bool close_requested_ = false;
  bool close_started_ = false;
  bool finished_ = false;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<WsMessage> inbox_;
  bool open_ = true;
};

}  // namespace bora::net::detail
