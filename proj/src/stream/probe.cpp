#include "bora/stream/probe.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <numeric>
#include <thread>

#include "bora/net/ws_client.hpp"
#include "bora/stream/codec.hpp"
#include "bora/stream/playlist.hpp"
#include "bora/stream/segment.hpp"
#include "bora/util/digest.hpp"

namespace bora::stream {

using json = nlohmann::json;
using namespace std::chrono;

double ProbeResult::mean_latency_ms() const {
  if (latencies_ms.empty()) return 0;
  return std::accumulate(latencies_ms.begin(), latencies_ms.end(), 0.0) / static_cast<double>(latencies_ms.size());
}

namespace {

double ms_between(std::int64_t from_us, std::int64_t to_us) { return static_cast<double>(to_us - from_us) / 1000.0; }

// Decodes one frame message and books it into `r`.
void record_frame(ProbeResult& r, const ProbeOptions& opt, std::string_view bytes, std::int64_t t_start_us) {
  Frame f = decode_frame(util::as_bytes(bytes));
  std::int64_t now = opt.clock();
  if (r.seqs.empty()) r.startup_ms = ms_between(t_start_us, now);
  if (!r.seqs.empty() && f.seq <= r.seqs.back())
    throw TransportFailure("seq " + std::to_string(f.seq) + " after " + std::to_string(r.seqs.back()));
  r.seqs.push_back(f.seq);
  r.latencies_ms.push_back(ms_between(f.capture_ts_us, now));
  if (opt.hash_payloads) r.payload_sha256[f.seq] = util::sha256_hex(bytes);
}

void check_error_message(const net::WsMessage& m) {
  if (m.binary) return;
  json j = json::parse(m.data, nullptr, false);
  std::string kind = j.is_object() ? j.value("error", "") : "";
  std::string message = j.is_object() ? j.value("message", m.data) : m.data;
  if (kind == "SessionUnknown") throw SessionUnknown(message);
  throw TransportFailure(kind.empty() ? "unexpected text message: " + m.data : kind + ": " + message);
}

// Reads frames off a connected channel until run_time after the first.
void watch_channel(net::WsClient& ws, ProbeResult& r, const ProbeOptions& opt, std::int64_t t_start_us) {
  auto first_deadline = steady_clock::now() + opt.first_frame_timeout;
  steady_clock::time_point end{};
  for (;;) {
    auto now = steady_clock::now();
    auto deadline = r.seqs.empty() ? first_deadline : end;
    if (now >= deadline) break;
    auto m = ws.read(duration_cast<milliseconds>(deadline - now) + milliseconds(1));
    if (!m) continue;
    check_error_message(*m);
    bool first = r.seqs.empty();
    record_frame(r, opt, m->data, t_start_us);
    if (first) end = steady_clock::now() + opt.run_time;
  }
  if (r.seqs.empty()) throw ProbeTimeout("no frame within " + std::to_string(opt.first_frame_timeout.count()) + " ms");
  ws.close();
}

}  // namespace

ProbeResult probe_push(const ProbeOptions& opt) {
  ProbeResult r;
  r.transport = Transport::push;
  std::int64_t t0 = opt.clock();
  net::WsClient ws;
  ws.connect(opt.host, opt.port, "/ws/stream/" + opt.stream_id);
  watch_channel(ws, r, opt, t0);
  return r;
}

ProbeResult probe_direct(const ProbeOptions& opt) {
  ProbeResult r;
  r.transport = Transport::direct;
  std::int64_t t0 = opt.clock();
  net::WsClient signal;
  signal.connect(opt.host, opt.port, "/ws/signal");
  signal.send_text(json{{"type", "offer"}, {"stream_id", opt.stream_id}}.dump());
  auto answer_msg = signal.read(kOfferTimeout);
  if (!answer_msg) throw HandshakeTimeout("offer unanswered after " + std::to_string(kOfferTimeout.count()) + " ms");
  json answer = json::parse(answer_msg->data, nullptr, false);
  if (!answer.is_object() || answer.value("type", "") != "answer") check_error_message(*answer_msg);
  std::string url = answer.value("data_channel_url", "");
  if (url.empty()) throw TransportFailure("answer without data_channel_url");

  net::WsClient data;
  data.connect(opt.host, opt.port, url);
  watch_channel(data, r, opt, t0);
  signal.close();
  return r;
}

ProbeResult probe_segmented(const ProbeOptions& opt) {
  ProbeResult r;
  r.transport = Transport::segmented;
  std::int64_t t0 = opt.clock();
  auto first_deadline = steady_clock::now() + opt.first_frame_timeout;
  httplib::Client http(opt.host, opt.port);
  http.set_keep_alive(true);
  const std::string base = "/stream/" + opt.stream_id + "/";

  auto fetch_playlist = [&] {
    auto res = http.Get(base + "playlist");
    if (!res) throw TransportFailure("playlist fetch failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportFailure("playlist status " + std::to_string(res->status));
    return parse_manifest(res->body);
  };

  // Join at the newest complete segment, as a live player does.
  ParsedPlaylist pl = fetch_playlist();
  while (pl.indices.empty()) {
    if (steady_clock::now() >= first_deadline) throw ProbeTimeout("playlist stayed empty");
    std::this_thread::sleep_for(milliseconds(50));
    pl = fetch_playlist();
  }
  std::uint64_t next = pl.indices.back();

  std::int64_t origin_clock = 0, origin_ts = 0;
  steady_clock::time_point end{};
  bool done = false;
  while (!done) {
    auto res = http.Get(base + "segment/" + std::to_string(next));
    if (!res) throw TransportFailure("segment fetch failed: " + httplib::to_string(res.error()));
    if (res->status == 410) {
      // Fell out of the window while stalled: resume at the oldest entry.
      pl = fetch_playlist();
      if (!pl.indices.empty()) next = pl.indices.front();
      continue;
    }
    if (res->status == 404) {
      auto limit = r.seqs.empty() ? first_deadline : end;
      if (steady_clock::now() >= limit) {
        if (r.seqs.empty()) throw ProbeTimeout("segment " + std::to_string(next) + " never appeared");
        break;
      }
      std::this_thread::sleep_for(milliseconds(20));
      continue;
    }
    if (res->status != 200) throw TransportFailure("segment status " + std::to_string(res->status));

    for (ByteView bytes : split_segment_blob(util::as_bytes(res->body))) {
      FrameHeader h = peek_header(bytes);
      if (!r.seqs.empty()) {
        // Real-time playback: hold each frame until its capture offset.
        std::int64_t due = origin_clock + (h.capture_ts_us - origin_ts);
        std::int64_t wait = due - opt.clock();
        if (wait > 0) std::this_thread::sleep_for(microseconds(wait));
      }
      bool first = r.seqs.empty();
      record_frame(r, opt, util::as_chars(bytes), t0);
      if (first) {
        origin_clock = opt.clock();
        origin_ts = h.capture_ts_us;
        end = steady_clock::now() + opt.run_time;
      }
      if (steady_clock::now() >= end) {
        done = true;
        break;
      }
    }
    ++next;
  }
  return r;
}

ProbeResult probe(Transport transport, const ProbeOptions& opt) {
  switch (transport) {
    case Transport::segmented:
      return probe_segmented(opt);
    case Transport::push:
      return probe_push(opt);
    case Transport::direct:
      return probe_direct(opt);
  }
  throw PreconditionError("unknown transport");
}

LatencyStats summarize(const std::vector<double>& values) {
  LatencyStats s;
  if (values.empty()) return s;
  double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1));
  }
  return s;
}

LatencyReport make_report(Transport transport, const std::vector<ProbeResult>& runs) {
  LatencyReport rep;
  rep.transport = transport;
  rep.n = runs.size();
  for (const auto& r : runs) {
    rep.run_startup_ms.push_back(r.startup_ms);
    rep.run_latency_ms.push_back(r.mean_latency_ms());
  }
  rep.startup_delay_ms = summarize(rep.run_startup_ms).mean;
  rep.latency_ms = summarize(rep.run_latency_ms);
  return rep;
}

}  // namespace bora::stream
