#include "bora/net/ws_client.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace bora::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct WsClient::Impl {
  asio::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  beast::flat_buffer buffer;
  bool connected = false;
  bool closed = false;
  bool peer_closed = false;

  bool read_pending = false;
  bool read_done = false;
  beast::error_code read_ec;

  // Runs the io_context until `done` or the deadline; returns done.
  bool run_until(const bool& done, std::chrono::milliseconds timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!done) {
      auto now = std::chrono::steady_clock::now();
      if (now >= deadline) break;
      ioc.restart();
      ioc.run_one_for(deadline - now);
    }
    return done;
  }

  // Cancels outstanding socket work and drains the handlers.
  void abandon() {
    beast::error_code ec;
    beast::get_lowest_layer(ws).socket().cancel(ec);
    beast::get_lowest_layer(ws).socket().close(ec);
    ioc.restart();
    ioc.run_for(std::chrono::milliseconds(200));
    connected = false;
    closed = true;
  }
};

WsClient::WsClient() : impl_(std::make_unique<Impl>()) {}

WsClient::~WsClient() {
  if (impl_->connected && !impl_->closed) {
    try {
      close(std::chrono::milliseconds(500));
    } catch (...) {
    }
  }
}

void WsClient::connect(const std::string& host, unsigned short port, const std::string& target,
                       std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  tcp::resolver resolver(im.ioc);
  beast::error_code ec;
  auto results = resolver.resolve(host, std::to_string(port), ec);
  if (ec) throw NetError("resolve " + host + ": " + ec.message());

  bool done = false;
  beast::get_lowest_layer(im.ws).async_connect(results, [&](beast::error_code e, const tcp::endpoint&) {
    ec = e;
    done = true;
  });
  if (!im.run_until(done, timeout)) {
    im.abandon();
    throw NetError("connect to " + host + ":" + std::to_string(port) + " timed out");
  }
  if (ec) throw NetError("connect to " + host + ":" + std::to_string(port) + ": " + ec.message());

  done = false;
  im.ws.async_handshake(host + ":" + std::to_string(port), target, [&](beast::error_code e) {
    ec = e;
    done = true;
  });
  if (!im.run_until(done, timeout)) {
    im.abandon();
    throw NetError("websocket handshake for " + target + " timed out");
  }
  if (ec) throw NetError("websocket handshake for " + target + ": " + ec.message());
  im.connected = true;
}

void WsClient::send_text(const std::string& text, std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  if (!im.connected || im.closed) throw NetError("send on a closed websocket");
  bool done = false;
  beast::error_code ec;
  im.ws.text(true);
  im.ws.async_write(asio::buffer(text), [&](beast::error_code e, std::size_t) {
    ec = e;
    done = true;
  });
  if (!im.run_until(done, timeout)) {
    im.abandon();
    throw NetError("websocket write timed out");
  }
  if (ec) {
    im.closed = true;
    throw NetError("websocket write: " + ec.message());
  }
}

std::optional<WsMessage> WsClient::read(std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  if (!im.connected || im.closed) throw NetError("read on a closed websocket");
  if (!im.read_pending) {
    im.read_pending = true;
    im.read_done = false;
    im.ws.async_read(im.buffer, [&im](beast::error_code e, std::size_t) {
      im.read_ec = e;
      im.read_done = true;
    });
  }
  if (!im.run_until(im.read_done, timeout)) return std::nullopt;
  im.read_pending = false;
  if (im.read_ec) {
    im.closed = true;
    im.peer_closed = im.read_ec == websocket::error::closed;
    throw NetError("websocket closed: " + im.read_ec.message());
  }
  WsMessage msg;
  msg.binary = im.ws.got_binary();
  msg.data = beast::buffers_to_string(im.buffer.data());
  im.buffer.consume(im.buffer.size());
  return msg;
}

void WsClient::close(std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  if (!im.connected || im.closed) return;
  bool done = false;
  im.ws.async_close(websocket::close_code::normal, [&](beast::error_code) { done = true; });
  auto deadline = std::chrono::steady_clock::now() + timeout;
  // A pending read completes (with `closed`) as part of the handshake.
  while (!(done && (!im.read_pending || im.read_done)) && std::chrono::steady_clock::now() < deadline) {
    im.ioc.restart();
    im.ioc.run_one_for(std::chrono::milliseconds(20));
  }
  if (!done) {
    im.abandon();
    return;
  }
  im.read_pending = false;
  im.closed = true;
}

void WsClient::abort() {
  if (impl_->connected && !impl_->closed) impl_->abandon();
}

bool WsClient::is_open() const { return impl_->connected && !impl_->closed; }

bool WsClient::closed_by_peer() const { return impl_->peer_closed; }

}  // namespace bora::net
