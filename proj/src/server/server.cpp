#include "bora/server/server.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <deque>
#include <future>
#include <set>

#include "bora/config/bundle.hpp"
#include "bora/config/json.hpp"
#include "bora/ingest/parsers.hpp"

namespace bora::server {

using json = nlohmann::json;
using net::HttpRequest;
using net::HttpResponse;
namespace fs = std::filesystem;

namespace detail {

struct DisplaySession {
  std::uint64_t id = 0;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> outbox;
  bool dropped = false;  // queue overflowed; the session gets closed
  // Touched only under Server::sessions_mu_.
  std::map<std::string, std::int64_t> last_sent_ts;
  std::uint64_t last_sent_revision = 0;
};

}  // namespace detail

namespace {

constexpr const char* kFallbackIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>BORA</title></head>
<body><p>No frontend bundle is configured (set <code>static_dir</code>).
The dashboard spec is at <a href="/api/spec">/api/spec</a>.</p></body></html>
)";

HttpResponse error_json(int status, const std::string& kind, const std::string& message) {
  return HttpResponse::json(status, json{{"error", kind}, {"message", message}}.dump());
}

int status_for(const std::string& kind) {
  static const std::map<std::string, int> table = {
      {"UnknownWidget", 404}, {"UnknownDevice", 404},   {"UnknownStream", 404},   {"IllegalPatch", 400},
      {"EmptyRange", 400},    {"ValidationError", 422}, {"ValueOutOfRange", 422}, {"FormatError", 400},
      {"PreconditionError", 400}};
  auto it = table.find(kind);
  return it == table.end() ? 500 : it->second;
}

HttpResponse error_from(const Error& e) {
  json body{{"error", e.kind()}, {"message", e.what()}};
  if (const auto* v = dynamic_cast<const config::ValidationError*>(&e)) {
    for (const auto& viol : v->violations)
      body["violations"].push_back({{"widget_id", viol.widget_id}, {"message", viol.message}});
  }
  return HttpResponse::json(status_for(e.kind()), body.dump());
}

json ack_json(const control::DeviceAck& a) { return {{"param_id", a.param_id}, {"value", a.value}, {"ts", a.ts}}; }

json mark_json(const control::RecordingMark& m) {
  json j{{"id", m.id},
         {"stream_id", m.stream_id},
         {"from_ts", m.from_ts},
         {"to_ts", m.to_ts},
         {"created_ts", m.created_ts},
         {"status", std::string(control::to_string(m.status))},
         {"frames", m.frames}};
  if (m.file) {
    j["file"] = m.file->filename().string();
    j["sha256"] = m.sha256;
  }
  return j;
}

std::string spec_message(const config::DashboardSpec& spec) {
  return json{{"type", "spec"}, {"revision", spec.revision}, {"spec", config::dashboard_to_json(spec)}}.dump();
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty() && std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string guess_media_type(const fs::path& p) {
  static const std::map<std::string, std::string> types = {
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"},  {".css", "text/css"},
      {".json", "application/json"},         {".png", "image/png"},       {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"},               {".svg", "image/svg+xml"},   {".gif", "image/gif"},
      {".webp", "image/webp"},               {".map", "application/json"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

// File under `root`, refusing anything that escapes it.
std::optional<fs::path> contained(const fs::path& root, const std::string& rel) {
  std::error_code ec;
  fs::path base = fs::weakly_canonical(root, ec);
  fs::path full = fs::weakly_canonical(root / rel, ec);
  if (ec) return std::nullopt;
  auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end()) return std::nullopt;
  if (!fs::is_regular_file(full, ec)) return std::nullopt;
  return full;
}

HttpResponse file_response(const fs::path& p) {
  auto res = HttpResponse::binary(config::read_file(p), guess_media_type(p));
  return res;
}

}  // namespace

Server::Server(ServerConfig cfg, std::shared_ptr<ingest::ParserRegistry> registry)
    : cfg_(std::move(cfg)), registry_(registry ? std::move(registry) : ingest::ParserRegistry::with_builtins()) {
  std::string text = cfg_.spec_text ? *cfg_.spec_text : config::read_file(cfg_.spec_path);
  config::DashboardSpec spec = config::parse_dashboard_spec(text);
  // A served spec always starts its revision history at 0.
  spec.revision = 0;

  cache_ = std::make_shared<cache::SampleCache>(cfg_.cache_capacity.value_or(spec.cache_capacity));
  hub_ = std::make_shared<stream::StreamHub>();
  for (const auto& sc : cfg_.streams) hub_->add(std::make_shared<stream::Streamer>(sc, util::system_micros_clock()));
  recordings_ = std::make_shared<control::RecordingService>(hub_, cfg_.recordings_dir);
  auto devices = std::make_shared<control::DeviceRegistry>(cfg_.devices, cache_);

  for (const auto& src : cfg_.sources) {
    if (src.protocol == ingest::kSimulated) continue;
    if (!registry_->contains(src.protocol))
      throw ConfigError("source " + src.name + ": no parser registered for protocol '" + src.protocol + "'");
    if (src.protocol == ingest::kPushChannel) push_sources_[src.name] = src;
  }

  control_ = std::make_unique<control::ControlService>(std::move(spec), std::move(devices),
                                                       std::make_shared<control::AttachmentStore>(), recordings_,
                                                       cfg_.token);
  broadcast_spec_ = control_->spec();
  control_->on_spec_change([this](const control::SpecHandle& s) { on_spec_published(s); });

  http_ = std::make_unique<net::HttpServer>(net::HttpServer::Options{cfg_.bind, cfg_.port, cfg_.io_threads});
  mount_routes();
}

Server::~Server() { stop(); }

unsigned short Server::port() const { return http_->port(); }

std::size_t Server::display_sessions() const {
  std::lock_guard lock(sessions_mu_);
  return sessions_.size();
}

void Server::start() {
  http_->start();
  for (const auto& id : hub_->ids()) hub_->find(id)->start();
  auto sink = [cache = cache_](const ingest::SensorSample& s) { cache->put(s); };
  std::int64_t interval = control_->spec()->poll_interval_ms;
  for (const auto& src : cfg_.sources) {
    if (src.protocol == ingest::kSimulated) {
      simulators_.push_back(std::make_unique<ingest::SimulatedSource>(*src.sim, src.sensors, src.tick_ms, sink));
    } else if (src.protocol != ingest::kPushChannel) {
      pollers_.push_back(std::make_unique<ingest::PollingSource>(src, registry_, sink, interval));
    }
  }
  {
    std::lock_guard lock(tick_mu_);
    stopping_ = false;
    started_ = true;
  }
  ticker_ = std::thread([this] { tick_loop(); });
  spdlog::info("bora serving '{}' on {}:{} ({} sources, {} streams)", control_->spec()->name, cfg_.bind, port(),
               cfg_.sources.size(), cfg_.streams.size());
}

void Server::stop() {
  {
    std::lock_guard lock(tick_mu_);
    if (!started_ || stopping_) return;
    stopping_ = true;
  }
  tick_cv_.notify_all();
  // Pollers may sit in a request for most of an interval; stop them while
  // the HTTP side winds down.
  auto sources = std::async(std::launch::async, [this] {
    for (auto& p : pollers_) p->stop();
    for (auto& s : simulators_) s->stop();
  });
  if (ticker_.joinable()) ticker_.join();
  {
    std::lock_guard lock(sessions_mu_);
    for (auto& [id, s] : sessions_) s->cv.notify_all();
  }
  http_->stop();
  hub_->stop_all();
  sources.wait();
  spdlog::info("bora stopped");
}

// ---------- display fan-out ----------

void Server::on_spec_published(const control::SpecHandle& spec) {
  if (spec->cache_capacity != broadcast_spec_->cache_capacity && !cfg_.cache_capacity)
    cache_->set_default_capacity(spec->cache_capacity);
  std::string msg = spec_message(*spec);
  std::lock_guard lock(sessions_mu_);
  broadcast_spec_ = spec;
  for (auto& [id, s] : sessions_) {
    std::lock_guard slock(s->mu);
    if (s->outbox.size() >= cfg_.session_queue_limit) {
      s->dropped = true;
    } else {
      s->outbox.push_back(msg);
      s->last_sent_revision = spec->revision;
    }
    s->cv.notify_all();
  }
}

void Server::broadcast_tick() {
  std::lock_guard lock(sessions_mu_);
  if (sessions_.empty()) return;
  const auto& spec = *broadcast_spec_;
  std::vector<ingest::SensorSample> latest;
  for (const auto& id : spec.bound_sensors())
    if (auto s = cache_->latest(id)) latest.push_back(*s);

  for (auto& [id, session] : sessions_) {
    json samples = json::array();
    for (const auto& s : latest) {
      auto it = session->last_sent_ts.find(s.sensor_id);
      if (it != session->last_sent_ts.end() && it->second >= s.timestamp) continue;
      samples.push_back({{"sensor_id", s.sensor_id}, {"timestamp", s.timestamp}, {"value", s.value}});
      session->last_sent_ts[s.sensor_id] = s.timestamp;
    }
    if (samples.empty()) continue;  // nothing new: no message
    std::string msg = json{{"type", "data"}, {"revision", spec.revision}, {"samples", std::move(samples)}}.dump();
    std::lock_guard slock(session->mu);
    if (session->outbox.size() >= cfg_.session_queue_limit) {
      session->dropped = true;
    } else {
      session->outbox.push_back(std::move(msg));
    }
    session->cv.notify_all();
  }
}

void Server::tick_loop() {
  auto next = std::chrono::steady_clock::now();
  std::unique_lock lock(tick_mu_);
  while (!stopping_) {
    next += std::chrono::milliseconds(control_->spec()->poll_interval_ms);
    // After a long stall (or an interval change) restart the schedule.
    auto now = std::chrono::steady_clock::now();
    if (next < now) next = now;
    if (tick_cv_.wait_until(lock, next, [&] { return stopping_; })) break;
    lock.unlock();
    try {
      broadcast_tick();
      recordings_->poll_pending();
    } catch (const std::exception& e) {
      spdlog::error("tick failed: {}", e.what());
    }
    lock.lock();
  }
}

void Server::serve_display(const std::shared_ptr<net::WsSession>& ws) {
  auto session = std::make_shared<detail::DisplaySession>();
  {
    std::lock_guard lock(sessions_mu_);
    session->id = next_session_++;
    session->outbox.push_back(spec_message(*broadcast_spec_));
    session->last_sent_revision = broadcast_spec_->revision;
    sessions_[session->id] = session;
  }
  spdlog::debug("display session {} connected", session->id);
  for (;;) {
    std::string msg;
    {
      std::unique_lock lock(session->mu);
      session->cv.wait_for(lock, std::chrono::milliseconds(100),
                           [&] { return !session->outbox.empty() || session->dropped; });
      if (session->dropped) {
        spdlog::warn("display session {} fell {} messages behind, closing", session->id, cfg_.session_queue_limit);
        break;
      }
      if (session->outbox.empty()) {
        if (!ws->is_open()) break;
        std::lock_guard tl(tick_mu_);
        if (stopping_) break;
        continue;
      }
      msg = std::move(session->outbox.front());
      session->outbox.pop_front();
    }
    if (!ws->send_text(std::move(msg))) break;
  }
  std::lock_guard lock(sessions_mu_);
  sessions_.erase(session->id);
}

// ---------- HTTP ----------

void Server::mount_routes() {
  auto& http = *http_;
  auto guarded = [this](auto handler) {
    return [this, handler](const HttpRequest& req) -> HttpResponse {
      if (!control_->authorized(req.header(kTokenHeader)))
        return error_json(401, "Unauthorized", "missing or wrong X-Bora-Token");
      try {
        return handler(req);
      } catch (const Error& e) {
        return error_from(e);
      }
    };
  };

  http.route("GET", "/", [this](const HttpRequest&) {
    if (cfg_.static_dir) {
      if (auto p = contained(*cfg_.static_dir, "index.html")) return file_response(*p);
    }
    auto res = HttpResponse::text(200, kFallbackIndex);
    res.content_type = "text/html; charset=utf-8";
    return res;
  });
  http.route("GET", "/static/*", [this](const HttpRequest& req) {
    if (!cfg_.static_dir) return error_json(404, "NotFound", "no static_dir configured");
    auto p = contained(*cfg_.static_dir, req.params.at("*"));
    return p ? file_response(*p) : error_json(404, "NotFound", "no such file");
  });
  http.route("GET", "/api/background", [this](const HttpRequest&) {
    auto spec = control_->spec();
    if (!spec->background_image) return error_json(404, "NotFound", "spec has no background image");
    auto p = contained(cfg_.asset_root, *spec->background_image);
    return p ? file_response(*p) : error_json(404, "NotFound", "background image missing on disk");
  });

  http.route("GET", "/api/spec", [this](const HttpRequest&) {
    return HttpResponse::json(200, config::serialize_dashboard(*control_->spec()));
  });

  http.route("GET", "/api/data", [this](const HttpRequest& req) {
    auto sensors = req.query_param("sensors");
    auto window = req.query_param("window");
    if (!sensors) return error_json(400, "BadRequest", "sensors parameter required");
    auto window_s = window ? parse_int(*window) : std::optional<std::int64_t>(600);
    if (!window_s || *window_s <= 0) return error_json(400, "BadRequest", "window must be a positive integer");
    std::vector<ingest::SensorSample> rows;
    for (const auto& id : split_csv_list(*sensors)) {
      auto part = cache_->recent(id, *window_s * 1000);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    ingest::sort_samples(rows);
    auto res = HttpResponse::text(200, ingest::format_csv_samples(rows));
    res.content_type = "text/csv";
    return res;
  });

  http.route("POST", "/api/control", guarded([this](const HttpRequest& req) {
               auto patch = config::parse_control_patch(req.body);
               auto r = control_->submit(patch, req.header("x-bora-client"));
               json body{{"revision", r.revision}};
               if (r.device) body["ack"] = ack_json(*r.device);
               if (r.recording) body["recording"] = mark_json(*r.recording);
               return HttpResponse::json(200, body.dump());
             }));

  http.route("POST", "/api/device/{id}", guarded([this](const HttpRequest& req) {
               json body = json::parse(req.body, nullptr, false);
               if (!body.is_object() || !body.contains("value") || !body["value"].is_number())
                 return error_json(400, "IllegalPatch", "body must be {\"value\": <number>}");
               auto r = control_->submit(config::ControlPatch::set_device_param(req.params.at("id"), body["value"].get<double>()),
                                         req.header("x-bora-client"));
               return HttpResponse::json(200, ack_json(*r.device).dump());
             }));

  http.route("GET", "/api/device/{id}", [this](const HttpRequest& req) {
    const auto& id = req.params.at("id");
    auto state = control_->devices().get(id);
    if (!state) return error_json(404, "UnknownDevice", "unknown device parameter: " + id);
    const auto* c = control_->devices().config(id);
    json j{{"param_id", id}, {"value", state->value}, {"last_set_ts", state->last_set_ts}, {"setter", state->setter}};
    if (std::isfinite(c->min)) j["min"] = c->min;
    if (std::isfinite(c->max)) j["max"] = c->max;
    return HttpResponse::json(200, j.dump());
  });

  http.route("POST", "/api/recordings", guarded([this](const HttpRequest& req) {
               json body = json::parse(req.body, nullptr, false);
               if (!body.is_object() || !body.contains("stream_id") || !body["stream_id"].is_string() ||
                   !body.contains("from_ts") || !body["from_ts"].is_number_integer() || !body.contains("to_ts") ||
                   !body["to_ts"].is_number_integer())
                 return error_json(400, "IllegalPatch", "body must be {stream_id, from_ts, to_ts}");
               auto r = control_->submit(config::ControlPatch::mark_recording(
                   body["stream_id"], body["from_ts"].get<std::int64_t>(), body["to_ts"].get<std::int64_t>()));
               return HttpResponse::json(200, json{{"revision", r.revision}, {"recording", mark_json(*r.recording)}}.dump());
             }));

  http.route("GET", "/api/recordings", [this](const HttpRequest&) {
    json arr = json::array();
    for (const auto& m : recordings_->list()) arr.push_back(mark_json(m));
    return HttpResponse::json(200, arr.dump());
  });

  http.route("GET", "/api/widget/{id}/attachment", [this](const HttpRequest& req) {
    auto a = control_->attachments().get(req.params.at("id"));
    if (!a) return error_json(404, "NoAttachment", "widget has no attachment");
    auto res = HttpResponse::binary(std::string(a->data.begin(), a->data.end()), a->media_type);
    res.headers.emplace_back("ETag", "\"" + a->sha256 + "\"");
    return res;
  });

  http.route("POST", "/ingest/{source}", guarded([this](const HttpRequest& req) {
               auto it = push_sources_.find(req.params.at("source"));
               if (it == push_sources_.end())
                 return error_json(404, "UnknownSource", "no push_channel source '" + req.params.at("source") + "'");
               auto parser = registry_->resolve(it->second.protocol);
               auto samples = parser->parse(util::as_bytes(req.body), it->second);
               std::set<std::string> allowed(it->second.sensors.begin(), it->second.sensors.end());
               std::size_t accepted = 0;
               for (const auto& s : samples) {
                 if (!allowed.count(s.sensor_id)) continue;
                 cache_->put(s);
                 ++accepted;
               }
               return HttpResponse::json(200, json{{"accepted", accepted}, {"received", samples.size()}}.dump());
             }));

  stream::mount_stream_endpoints(http, hub_);
  http.ws_route("/ws/display", [this](const std::shared_ptr<net::WsSession>& ws, const HttpRequest&) {
    serve_display(ws);
  });
}

}  // namespace bora::server
