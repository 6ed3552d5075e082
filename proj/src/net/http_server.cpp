#include "bora/net/http_server.hpp"

#include <spdlog/spdlog.h>
#include <sys/socket.h>

#include <condition_variable>
#include <set>
#include <thread>
#include <unordered_map>

#include "beast_session.hpp"

namespace bora::net {

using namespace detail;

namespace {

constexpr std::size_t kBodyLimit = 16u << 20;

struct Route {
  std::string method;
  std::string pattern;
  HttpHandler handler;
};

struct WsRoute {
  std::string pattern;
  WsHandler handler;
};

HttpRequest to_request(const http::request<http::string_body>& req) {
  HttpRequest out;
  out.method = std::string(req.method_string());
  std::string_view target(req.target().data(), req.target().size());
  auto q = target.find('?');
  out.path = url_decode(target.substr(0, q));
  if (q != std::string_view::npos) out.query = parse_query(target.substr(q + 1));
  for (const auto& field : req) {
    std::string name(field.name_string());
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.headers[name] = std::string(field.value());
  }
  out.body = req.body();
  return out;
}

}  // namespace

struct HttpServer::Impl : std::enable_shared_from_this<HttpServer::Impl> {
  Options options;
  asio::io_context ioc;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> io_threads;
  unsigned short bound_port = 0;

  std::vector<Route> routes;
  std::vector<WsRoute> ws_routes;

  mutable std::mutex mu;
  std::condition_variable cv;
  bool started = false;
  bool stopping = false;
  int active_connections = 0;
  std::set<int> http_fds;
  std::unordered_map<std::uint64_t, std::weak_ptr<BeastWsSession>> sessions;
  std::uint64_t next_session = 1;

  void do_accept() {
    acceptor.async_accept(asio::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
      if (ec) {
        if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        if (!self->acceptor.is_open()) return;
      } else {
        {
          std::lock_guard lock(self->mu);
          if (self->stopping) return;
          ++self->active_connections;
        }
        std::thread([self, sock = std::move(s)]() mutable { self->serve(std::move(sock)); }).detach();
      }
      self->do_accept();
    });
  }

  HttpResponse dispatch(HttpRequest& req) {
    bool path_matched = false;
    for (const auto& r : routes) {
      auto caps = match_route(r.pattern, req.path);
      if (!caps) continue;
      path_matched = true;
      if (r.method != req.method) continue;
      req.params = std::move(*caps);
      try {
        return r.handler(req);
      } catch (const std::exception& e) {
        spdlog::error("{} {}: unhandled error: {}", req.method, req.path, e.what());
        return HttpResponse::text(500, std::string("internal error: ") + e.what());
      }
    }
    if (path_matched) return HttpResponse::text(405, "method not allowed");
    return HttpResponse::text(404, "not found");
  }

  void serve(tcp::socket socket) {
    int fd = socket.native_handle();
    {
      std::lock_guard lock(mu);
      http_fds.insert(fd);
    }
    auto unregister = [&] {
      std::lock_guard lock(mu);
      http_fds.erase(fd);
    };
    beast::tcp_stream stream(std::move(socket));
    beast::flat_buffer buffer;
    beast::error_code ec;
    bool upgraded = false;
    for (;;) {
      http::request_parser<http::string_body> parser;
      parser.body_limit(kBodyLimit);
      http::read(stream, buffer, parser, ec);
      if (ec) break;
      auto raw = parser.release();
      HttpRequest req = to_request(raw);
      if (websocket::is_upgrade(raw)) {
        const WsRoute* match = nullptr;
        for (const auto& r : ws_routes) {
          if (auto caps = match_route(r.pattern, req.path)) {
            req.params = std::move(*caps);
            match = &r;
            break;
          }
        }
        if (match) {
          unregister();
          upgraded = true;
          run_websocket(stream.release_socket(), raw, req, *match);
          break;
        }
      }
      HttpResponse res = dispatch(req);
      http::response<http::string_body> out{static_cast<http::status>(res.status), raw.version()};
      out.set(http::field::server, "bora");
      out.set(http::field::content_type, res.content_type);
      for (const auto& [k, v] : res.headers) out.set(k, v);
      out.body() = std::move(res.body);
      out.keep_alive(raw.keep_alive());
      out.prepare_payload();
      http::write(stream, out, ec);
      bool stop_now;
      {
        std::lock_guard lock(mu);
        stop_now = stopping;
      }
      if (ec || !out.keep_alive() || stop_now) break;
    }
    if (!upgraded) {
      unregister();
      stream.socket().shutdown(tcp::socket::shutdown_both, ec);
      stream.socket().close(ec);
    }
    finish();
  }

  void run_websocket(tcp::socket socket, const http::request<http::string_body>& raw, const HttpRequest& req,
                     const WsRoute& route) {
    std::uint64_t id;
    {
      std::lock_guard lock(mu);
      id = next_session++;
    }
    auto session = std::make_shared<BeastWsSession>(std::move(socket), id);
    try {
      session->accept(raw);
    } catch (const std::exception& e) {
      spdlog::warn("websocket handshake on {} failed: {}", req.path, e.what());
      return;
    }
    session->start();
    bool stop_now;
    {
      std::lock_guard lock(mu);
      stop_now = stopping;
      if (!stop_now) sessions[id] = session;
    }
    if (!stop_now) {
      try {
        route.handler(session, req);
      } catch (const std::exception& e) {
        spdlog::error("websocket handler {}: {}", req.path, e.what());
      }
    }
    session->close();
    std::lock_guard lock(mu);
    sessions.erase(id);
  }

  void finish() {
    {
      std::lock_guard lock(mu);
      --active_connections;
    }
    cv.notify_all();
  }
};

HttpServer::HttpServer(Options options) : impl_(std::make_shared<Impl>()) { impl_->options = std::move(options); }

HttpServer::~HttpServer() { stop(); }

void HttpServer::route(std::string method, std::string pattern, HttpHandler handler) {
  impl_->routes.push_back({std::move(method), std::move(pattern), std::move(handler)});
}

void HttpServer::ws_route(std::string pattern, WsHandler handler) {
  impl_->ws_routes.push_back({std::move(pattern), std::move(handler)});
}

void HttpServer::start() {
  auto& im = *impl_;
  beast::error_code ec;
  auto address = asio::ip::make_address(im.options.address, ec);
  if (ec) throw NetError("bad listen address '" + im.options.address + "'");
  tcp::endpoint endpoint(address, im.options.port);
  im.acceptor.open(endpoint.protocol(), ec);
  if (!ec) im.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor.bind(endpoint, ec);
  if (!ec) im.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw NetError("cannot listen on " + im.options.address + ":" + std::to_string(im.options.port) + ": " +
                   ec.message());
  }
  im.bound_port = im.acceptor.local_endpoint().port();
  im.work.emplace(asio::make_work_guard(im.ioc));
  im.do_accept();
  for (int i = 0; i < std::max(1, im.options.io_threads); ++i) {
    im.io_threads.emplace_back([&im] { im.ioc.run(); });
  }
  std::lock_guard lock(im.mu);
  im.started = true;
}

unsigned short HttpServer::port() const { return impl_->bound_port; }

bool HttpServer::running() const {
  std::lock_guard lock(impl_->mu);
  return impl_->started && !impl_->stopping;
}

std::size_t HttpServer::websocket_sessions() const {
  std::lock_guard lock(impl_->mu);
  return impl_->sessions.size();
}

void HttpServer::stop() {
  auto& im = *impl_;
  std::vector<std::shared_ptr<BeastWsSession>> live;
  {
    std::lock_guard lock(im.mu);
    if (!im.started || im.stopping) return;
    im.stopping = true;
    for (int fd : im.http_fds) ::shutdown(fd, SHUT_RDWR);
    for (auto& [id, weak] : im.sessions) {
      if (auto s = weak.lock()) live.push_back(std::move(s));
    }
  }
  asio::post(im.ioc, [&im] {
    beast::error_code ec;
    im.acceptor.close(ec);
  });
  for (auto& s : live) s->initiate_close();
  {
    std::unique_lock lock(im.mu);
    if (!im.cv.wait_for(lock, std::chrono::milliseconds(1500), [&] { return im.active_connections == 0; })) {
      // Sessions that did not finish their close handshake get dropped.
      for (auto& s : live) s->force_close();
      if (!im.cv.wait_for(lock, std::chrono::milliseconds(500), [&] { return im.active_connections == 0; })) {
        spdlog::warn("http server stopping with {} connection threads still running", im.active_connections);
      }
    }
  }
  im.work.reset();
  im.ioc.stop();
  for (auto& t : im.io_threads) t.join();
  im.io_threads.clear();
}

}  // namespace bora::net
