#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "bora/net/http_server.hpp"
#include "bora/net/ws_client.hpp"

using namespace bora::net;
using namespace std::chrono_literals;

TEST(Routing, PlaceholdersAndRest) {
  auto m = match_route("/api/device/{id}", "/api/device/pump1");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->at("id"), "pump1");
  EXPECT_FALSE(match_route("/api/device/{id}", "/api/device"));
  EXPECT_FALSE(match_route("/api/device/{id}", "/api/device/a/b"));
  EXPECT_TRUE(match_route("/", "/"));
  auto rest = match_route("/static/*", "/static/css/app.css");
  ASSERT_TRUE(rest);
  EXPECT_EQ(rest->at("*"), "css/app.css");
}

TEST(Routing, QueryDecoding) {
  auto q = parse_query("sensors=a%2Cb&window=60&x=hello+world&bad=%zz");
  EXPECT_EQ(q["sensors"], "a,b");
  EXPECT_EQ(q["window"], "60");
  EXPECT_EQ(q["x"], "hello world");
  EXPECT_EQ(q["bad"], "%zz");
}

class ServerFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<HttpServer>(HttpServer::Options{});
    server_->route("GET", "/hello/{name}", [](const HttpRequest& r) {
      return HttpResponse::text(200, "hi " + r.params.at("name") + " " + r.query_param("q").value_or("-"));
    });
    server_->route("POST", "/echo", [](const HttpRequest& r) {
      return HttpResponse::json(201, r.body + "|" + r.header("x-bora-token"));
    });
    server_->route("GET", "/boom", [](const HttpRequest&) -> HttpResponse { throw std::runtime_error("kaput"); });
    server_->ws_route("/ws/echo", [](const std::shared_ptr<WsSession>& s, const HttpRequest&) {
      while (s->is_open()) {
        auto m = s->receive(50ms);
        if (!m) continue;
        if (m->data == "bye") return;  // server-initiated close
        bool ok = m->binary ? s->send_binary(m->data) : s->send_text("echo:" + m->data);
        if (!ok) return;
      }
    });
    server_->start();
  }
  void TearDown() override { server_->stop(); }

  std::unique_ptr<HttpServer> server_;
};

TEST_F(ServerFixture, HttpRoutes) {
  httplib::Client c("127.0.0.1", server_->port());
  auto r = c.Get("/hello/bob?q=1%202");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "hi bob 1 2");
  httplib::Headers h{{"X-Bora-Token", "t0k"}};
  auto p = c.Post("/echo", h, "payload", "text/plain");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->status, 201);
  EXPECT_EQ(p->body, "payload|t0k");
  EXPECT_EQ(p->get_header_value("Content-Type"), "application/json");
  EXPECT_EQ(c.Get("/nope")->status, 404);
  EXPECT_EQ(c.Post("/hello/bob", "", "text/plain")->status, 405);
  EXPECT_EQ(c.Get("/boom")->status, 500);
}

TEST_F(ServerFixture, WebSocketEchoAndServerClose) {
  WsClient c;
  c.connect("127.0.0.1", server_->port(), "/ws/echo");
  c.send_text("one");
  auto m = c.read(2s);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->data, "echo:one");
  EXPECT_FALSE(m->binary);
  c.send_text("bye");
  EXPECT_THROW(
      {
        for (int i = 0; i < 40; ++i) c.read(100ms);
      },
      NetError);
  EXPECT_TRUE(c.closed_by_peer());
}

TEST_F(ServerFixture, ReadTimeoutKeepsMessage) {
  WsClient c;
  c.connect("127.0.0.1", server_->port(), "/ws/echo");
  EXPECT_FALSE(c.read(100ms));  // nothing sent yet
  c.send_text("late");
  auto m = c.read(2s);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->data, "echo:late");
  c.close();
  EXPECT_FALSE(c.is_open());
}

TEST_F(ServerFixture, UnknownWebSocketPathIs404) {
  WsClient c;
  EXPECT_THROW(c.connect("127.0.0.1", server_->port(), "/ws/missing"), NetError);
}

TEST_F(ServerFixture, ConcurrentSendersOnOneSession) {
  std::shared_ptr<WsSession> held;
  std::atomic<bool> ready{false};
  HttpServer srv(HttpServer::Options{});
  srv.ws_route("/ws/fan", [&](const std::shared_ptr<WsSession>& s, const HttpRequest&) {
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t) {
      ts.emplace_back([s, t] {
        for (int i = 0; i < 50; ++i) s->send_text(std::to_string(t) + ":" + std::to_string(i));
      });
    }
    for (auto& th : ts) th.join();
    s->wait_closed(5s);
  });
  srv.start();
  WsClient c;
  c.connect("127.0.0.1", srv.port(), "/ws/fan");
  std::map<int, int> next;
  for (int n = 0; n < 200; ++n) {
    auto m = c.read(3s);
    ASSERT_TRUE(m);
    int t = std::stoi(m->data.substr(0, m->data.find(':')));
    int i = std::stoi(m->data.substr(m->data.find(':') + 1));
    EXPECT_EQ(next[t], i) << "per-thread order";
    next[t] = i + 1;
  }
  c.close();
  srv.stop();
}

TEST(ServerLifecycle, StopIsBoundedWithOpenConnections) {
  HttpServer srv(HttpServer::Options{});
  srv.route("GET", "/", [](const HttpRequest&) { return HttpResponse::text(200, "ok"); });
  srv.ws_route("/ws/idle", [](const std::shared_ptr<WsSession>& s, const HttpRequest&) {
    while (s->is_open()) s->receive(100ms);
  });
  srv.start();

  httplib::Client keep("127.0.0.1", srv.port());
  keep.set_keep_alive(true);
  ASSERT_TRUE(keep.Get("/"));
  std::vector<std::unique_ptr<WsClient>> clients;
  for (int i = 0; i < 3; ++i) {
    clients.push_back(std::make_unique<WsClient>());
    clients.back()->connect("127.0.0.1", srv.port(), "/ws/idle");
  }
  for (int i = 0; i < 50 && srv.websocket_sessions() < 3; ++i) std::this_thread::sleep_for(10ms);
  EXPECT_EQ(srv.websocket_sessions(), 3u);

  // Clients must keep reading for the close handshake to be answered.
  std::atomic<int> saw_close{0};
  std::vector<std::thread> readers;
  for (auto& c : clients) {
    readers.emplace_back([&, raw = c.get()] {
      try {
        for (int i = 0; i < 40; ++i) raw->read(100ms);
      } catch (const NetError&) {
        if (raw->closed_by_peer()) ++saw_close;
      }
    });
  }
  auto t0 = std::chrono::steady_clock::now();
  srv.stop();
  auto took = std::chrono::steady_clock::now() - t0;
  for (auto& r : readers) r.join();
  EXPECT_LT(took, 2s);
  EXPECT_EQ(saw_close.load(), 3);
  EXPECT_FALSE(srv.running());
}

TEST(ServerLifecycle, PortInUseFails) {
  HttpServer a(HttpServer::Options{});
  a.start();
  HttpServer b(HttpServer::Options{"127.0.0.1", a.port(), 1});
  EXPECT_THROW(b.start(), NetError);
}
