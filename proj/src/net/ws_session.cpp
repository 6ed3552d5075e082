#include "beast_session.hpp"

#include <spdlog/spdlog.h>

namespace bora::net::detail {

BeastWsSession::BeastWsSession(tcp::socket socket, std::uint64_t id) : ws_(std::move(socket)), id_(id) {}

void BeastWsSession::accept(const http::request<http::string_body>& req) {
  ws_.set_option(websocket::stream_base::decorator(
      [](websocket::response_type& res) { res.set(http::field::server, "bora"); }));
  ws_.accept(req);
  // Bounds the close handshake; idle connections are fine.
  websocket::stream_base::timeout opt{std::chrono::seconds(1), websocket::stream_base::none(), false};
  ws_.set_option(opt);
}

void BeastWsSession::start() {
  asio::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->do_read(); });
}

void BeastWsSession::do_read() {
  ws_.async_read(read_buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->mark_closed();
      return;
    }
    WsMessage msg;
    msg.binary = self->ws_.got_binary();
    msg.data = beast::buffers_to_string(self->read_buffer_.data());
    self->read_buffer_.consume(self->read_buffer_.size());
    {
      std::lock_guard lock(self->mu_);
      if (self->inbox_.size() >= kInboxLimit) self->inbox_.pop_front();
      self->inbox_.push_back(std::move(msg));
    }
    self->cv_.notify_all();
    self->do_read();
  });
}

bool BeastWsSession::enqueue(std::string data, bool binary, std::chrono::milliseconds timeout) {
  if (!is_open()) return false;
  auto done = std::make_shared<std::promise<bool>>();
  auto fut = done->get_future();
  Outgoing item{std::make_shared<std::string>(std::move(data)), binary, done};
  asio::post(ws_.get_executor(), [self = shared_from_this(), item = std::move(item)]() mutable {
    if (self->finished_ || self->close_requested_) {
      item.done->set_value(false);
      return;
    }
    self->out_.push_back(std::move(item));
    if (!self->writing_) self->do_write();
  });
  if (fut.wait_for(timeout) != std::future_status::ready) return false;
  return fut.get();
}

bool BeastWsSession::send_text(std::string message, std::chrono::milliseconds timeout) {
  return enqueue(std::move(message), false, timeout);
}

bool BeastWsSession::send_binary(std::string payload, std::chrono::milliseconds timeout) {
  return enqueue(std::move(payload), true, timeout);
}

void BeastWsSession::do_write() {
  if (out_.empty()) {
    writing_ = false;
    if (close_requested_) do_close();
    return;
  }
  writing_ = true;
  auto& front = out_.front();
  ws_.binary(front.binary);
  ws_.async_write(asio::buffer(*front.data), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (self->out_.empty()) return;  // drained by mark_closed
    auto item = std::move(self->out_.front());
    self->out_.pop_front();
    item.done->set_value(!ec);
    if (ec) {
      self->writing_ = false;
      self->mark_closed();
      return;
    }
    self->do_write();
  });
}

void BeastWsSession::initiate_close() {
  asio::post(ws_.get_executor(), [self = shared_from_this()] {
    if (self->finished_ || self->close_requested_) return;
    self->close_requested_ = true;
    if (!self->writing_) self->do_close();
  });
}

void BeastWsSession::do_close() {
  if (close_started_ || finished_) return;
  close_started_ = true;
  ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {
    self->mark_closed();
  });
}

void BeastWsSession::force_close() {
  asio::post(ws_.get_executor(), [self = shared_from_this()] {
    beast::error_code ec;
    beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(self->ws_).socket().close(ec);
    self->mark_closed();
  });
}

void BeastWsSession::mark_closed() {
  if (!finished_) {
    finished_ = true;
    for (auto& item : out_) item.done->set_value(false);
    out_.clear();
  }
  {
    std::lock_guard lock(mu_);
    open_ = false;
  }
  cv_.notify_all();
}

std::optional<WsMessage> BeastWsSession::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || !open_; });
  if (inbox_.empty()) return std::nullopt;
  WsMessage msg = std::move(inbox_.front());
  inbox_.pop_front();
  return msg;
}

void BeastWsSession::close() {
  initiate_close();
  if (wait_closed(std::chrono::milliseconds(1200))) return;
  spdlog::debug("ws session {}: close handshake timed out, dropping socket", id_);
  force_close();
  wait_closed(std::chrono::milliseconds(500));
}

bool BeastWsSession::is_open() const {
  std::lock_guard lock(mu_);
  return open_;
}

bool BeastWsSession::wait_closed(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return !open_; });
}

}  // namespace bora::net::detail
