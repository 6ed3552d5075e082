#include "bora/stream/transports.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <random>
#include <thread>

#include "bora/stream/codec.hpp"

namespace bora::stream {

using json = nlohmann::json;
using net::HttpRequest;
using net::HttpResponse;
using net::WsSession;

void StreamHub::add(std::shared_ptr<Streamer> streamer) {
  std::lock_guard lock(mu_);
  std::string id = streamer->id();
  if (!streams_.emplace(id, std::move(streamer)).second) throw PreconditionError("duplicate stream id: " + id);
}

std::shared_ptr<Streamer> StreamHub::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = streams_.find(id);
  return it == streams_.end() ? nullptr : it->second;
}

std::vector<std::string> StreamHub::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : streams_) out.push_back(id);
  return out;
}

void StreamHub::stop_all() {
  std::lock_guard lock(mu_);
  for (auto& [id, s] : streams_) s->stop();
}

std::uint64_t pump_frames(const FrameRing& ring, std::uint64_t after_seq, std::size_t backlog,
                          const std::function<bool()>& keep_going, const FrameSend& send) {
  std::uint64_t cursor = after_seq, sent = 0;
  while (keep_going() && !ring.closed()) {
    auto batch = ring.next_after(cursor, backlog, std::chrono::milliseconds(100));
    for (const auto& f : batch) {
      if (!send(f)) return sent;
      cursor = f.seq;
      ++sent;
      if (!keep_going()) return sent;
    }
  }
  return sent;
}

DirectSessions::DirectSessions(std::chrono::milliseconds ttl) : ttl_(ttl) {}

std::string DirectSessions::open(const std::string& stream_id) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu_);
  auto now = std::chrono::steady_clock::now();
  expire_locked(now);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  std::string id = std::to_string(++counter_) + "-" + buf;
  sessions_[id] = {stream_id, now + ttl_};
  return id;
}

std::optional<std::string> DirectSessions::claim(const std::string& session_id) {
  std::lock_guard lock(mu_);
  expire_locked(std::chrono::steady_clock::now());
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  std::string stream = it->second.stream_id;
  sessions_.erase(it);
  return stream;
}

std::size_t DirectSessions::pending() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void DirectSessions::expire_locked(std::chrono::steady_clock::time_point now) {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    it = it->second.expires <= now ? sessions_.erase(it) : std::next(it);
  }
}

namespace {

HttpResponse error_response(int status, const std::string& kind, const std::string& message) {
  return HttpResponse::json(status, json{{"error", kind}, {"message", message}}.dump());
}

std::string error_message(const std::string& kind, const std::string& message) {
  return json{{"type", "error"}, {"error", kind}, {"message", message}}.dump();
}

HttpResponse serve_playlist(const StreamHub& hub, const HttpRequest& req) {
  auto s = hub.find(req.params.at("id"));
  if (!s) return error_response(404, "UnknownStream", "no stream '" + req.params.at("id") + "'");
  auto res = HttpResponse::text(200, s->playlist().manifest());
  res.headers.emplace_back("Cache-Control", "no-cache");
  return res;
}

HttpResponse serve_segment(const StreamHub& hub, const HttpRequest& req) {
  auto s = hub.find(req.params.at("id"));
  if (!s) return error_response(404, "UnknownStream", "no stream '" + req.params.at("id") + "'");
  const std::string& n = req.params.at("n");
  std::uint64_t index = 0;
  auto [p, ec] = std::from_chars(n.data(), n.data() + n.size(), index);
  if (ec != std::errc() || p != n.data() + n.size()) return error_response(400, "BadRequest", "bad segment index");
  auto [lookup, seg] = s->segment(index);
  switch (lookup) {
    case SegmentLookup::found: {
      Bytes blob = seg->blob();
      auto res = HttpResponse::binary(std::string(blob.begin(), blob.end()), "application/vnd.bora.segment");
      res.headers.emplace_back("X-Bora-Duration-Ms", std::to_string(seg->duration_ms));
      return res;
    }
    case SegmentLookup::gone:
      return error_response(410, "UnknownSegment",
                            "segment " + n + " wrapped away (oldest is " +
                                std::to_string(s->playlist().media_sequence()) + ")");
    case SegmentLookup::not_yet:
      break;
  }
  return error_response(404, "UnknownSegment", "segment " + n + " not produced yet");
}

void serve_push(const StreamHub& hub, const std::shared_ptr<WsSession>& ws, const HttpRequest& req) {
  auto s = hub.find(req.params.at("id"));
  if (!s) {
    ws->send_text(error_message("UnknownStream", "no stream '" + req.params.at("id") + "'"));
    return;
  }
  // The per-client encoder starts now, on the next frame the source emits.
  const auto delay = std::chrono::milliseconds(s->config().encode_delay_ms);
  auto sent = pump_frames(
      s->ring(), s->ring().newest_seq(), kPushBacklog, [&] { return ws->is_open() && s->running(); },
      [&](const SourceFrame& f) {
        Bytes encoded = encode_frame(*f.raw);
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        return ws->send_binary(std::string(encoded.begin(), encoded.end()));
      });
  spdlog::debug("push client {} on {} done after {} frames", ws->id(), s->id(), sent);
}

void serve_signal(const StreamHub& hub, DirectSessions& sessions, const std::shared_ptr<WsSession>& ws) {
  while (ws->is_open()) {
    auto msg = ws->receive(std::chrono::milliseconds(200));
    if (!msg) continue;
    json offer = json::parse(msg->data, nullptr, false);
    if (offer.is_discarded() || !offer.is_object() || offer.value("type", "") != "offer" ||
        !offer.contains("stream_id") || !offer["stream_id"].is_string()) {
      ws->send_text(error_message("BadOffer", "expected {\"type\":\"offer\",\"stream_id\":...}"));
      continue;
    }
    std::string stream_id = offer["stream_id"];
    if (!hub.find(stream_id)) {
      ws->send_text(error_message("UnknownStream", "no stream '" + stream_id + "'"));
      continue;
    }
    std::string sid = sessions.open(stream_id);
    json answer{{"type", "answer"}, {"session_id", sid}, {"data_channel_url", "/ws/direct/" + sid}};
    if (!ws->send_text(answer.dump())) return;
  }
}

void serve_direct(const StreamHub& hub, DirectSessions& sessions, const std::shared_ptr<WsSession>& ws,
                  const HttpRequest& req) {
  auto stream_id = sessions.claim(req.params.at("session"));
  auto s = stream_id ? hub.find(*stream_id) : nullptr;
  if (!s) {
    ws->send_text(error_message("SessionUnknown", "no pending session '" + req.params.at("session") + "'"));
    return;
  }
  // Forwarded as the source encoded them, starting from the newest frame.
  std::uint64_t newest = s->ring().newest_seq();
  pump_frames(
      s->ring(), newest > 0 ? newest - 1 : 0, kDirectBacklog, [&] { return ws->is_open() && s->running(); },
      [&](const SourceFrame& f) { return ws->send_binary(std::string(f.encoded->begin(), f.encoded->end())); });
}

}  // namespace

void mount_stream_endpoints(net::HttpServer& server, std::shared_ptr<StreamHub> hub,
                            std::shared_ptr<DirectSessions> sessions) {
  if (!sessions) sessions = std::make_shared<DirectSessions>();
  server.route("GET", "/stream/{id}/playlist", [hub](const HttpRequest& r) { return serve_playlist(*hub, r); });
  server.route("GET", "/stream/{id}/segment/{n}", [hub](const HttpRequest& r) { return serve_segment(*hub, r); });
  server.ws_route("/ws/stream/{id}", [hub](const std::shared_ptr<WsSession>& ws, const HttpRequest& r) {
    serve_push(*hub, ws, r);
  });
  server.ws_route("/ws/signal", [hub, sessions](const std::shared_ptr<WsSession>& ws, const HttpRequest&) {
    serve_signal(*hub, *sessions, ws);
  });
  server.ws_route("/ws/direct/{session}", [hub, sessions](const std::shared_ptr<WsSession>& ws, const HttpRequest& r) {
    serve_direct(*hub, *sessions, ws, r);
  });
}

}  // namespace bora::stream
