#include "bora/bench/benchmark.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <sstream>

#include "bora/net/http_server.hpp"
#include "bora/stream/transports.hpp"

namespace bora::bench {

using namespace std::chrono;
using stream::ProbeResult;

namespace {

constexpr const char* kBenchStream = "bench";

stream::StreamConfig stream_config(const BenchmarkConfig& cfg) {
  stream::StreamConfig sc;
  sc.id = kBenchStream;
  sc.pattern = stream::PatternParams::fit(cfg.width, cfg.height);
  sc.fps = cfg.fps;
  sc.segment_target_ms = cfg.segment_ms;
  sc.playlist_wrap = cfg.playlist_wrap;
  sc.encode_delay_ms = cfg.encode_delay_ms;
  return sc;
}

LatencyReport failed(Transport t, const std::string& why) {
  LatencyReport r;
  r.transport = t;
  r.error = why;
  return r;
}

LatencyReport measure(const BenchmarkConfig& cfg, Transport t, const RunObserver& observer) {
  util::MicrosClock clock = util::steady_now_us;
  auto streamer = std::make_shared<stream::Streamer>(stream_config(cfg), clock);
  auto hub = std::make_shared<stream::StreamHub>();
  hub->add(streamer);
  net::HttpServer server(net::HttpServer::Options{"127.0.0.1", 0, 2});
  stream::mount_stream_endpoints(server, hub);
  server.start();
  streamer->start();

  auto segment = milliseconds(cfg.segment_ms);
  stream::ProbeOptions opt;
  opt.port = server.port();
  opt.stream_id = kBenchStream;
  opt.clock = clock;
  opt.run_time = milliseconds(static_cast<std::int64_t>(cfg.duration_s * 1000 / static_cast<double>(cfg.runs)));
  opt.first_frame_timeout = std::max<milliseconds>(seconds(10), 3 * segment);

  std::vector<ProbeResult> runs;
  try {
    // Every transport starts measuring against a source that is already
    // live; segmented additionally needs a first complete segment.
    auto ready = steady_clock::now() + seconds(5);
    while (streamer->ring().newest_seq() < 2 && steady_clock::now() < ready) std::this_thread::sleep_for(5ms);
    if (t == Transport::segmented && !streamer->wait_for_segments(0, 2 * segment + seconds(10)))
      throw stream::ProbeTimeout("no segment was produced");
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      runs.push_back(cfg.prober ? cfg.prober(t, opt) : stream::probe(t, opt));
      if (observer) observer(t, i, runs.back());
    }
  } catch (const Error& e) {
    spdlog::warn("bench {}: {} ({})", config::to_string(t), e.what(), e.kind());
    server.stop();
    streamer->stop();
    return failed(t, e.kind() + ": " + e.what());
  }
  server.stop();
  streamer->stop();
  return stream::make_report(t, runs);
}

std::string run_list(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  os << "]";
  return os.str();
}

}  // namespace

void validate_benchmark_config(const BenchmarkConfig& cfg) {
  if (!(cfg.fps >= 1)) throw PreconditionError("fps must be >= 1");
  if (cfg.runs == 0) throw PreconditionError("runs must be >= 1");
  if (cfg.width == 0 || cfg.height == 0) throw PreconditionError("resolution must be positive");
  if (cfg.encode_delay_ms < 0) throw PreconditionError("encode delay must be >= 0");
  if (cfg.transports.empty()) throw PreconditionError("no transport selected");
  bool segmented =
      std::find(cfg.transports.begin(), cfg.transports.end(), Transport::segmented) != cfg.transports.end();
  if (segmented && cfg.duration_s * 1000 < 2.0 * static_cast<double>(cfg.segment_ms))
    throw PreconditionError("duration must cover at least two segments for segmented");
  if (!(cfg.duration_s > 0)) throw PreconditionError("duration must be positive");
}

const LatencyReport* BenchmarkResult::find(Transport t) const {
  for (const auto& r : reports)
    if (r.transport == t) return &r;
  return nullptr;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const RunObserver& observer) {
  validate_benchmark_config(cfg);
  BenchmarkResult result;
  result.config = cfg;
  auto t0 = steady_clock::now();
  for (Transport t : cfg.transports) {
    spdlog::info("bench {}: {} runs over {:.1f} s at {}x{}@{} fps, encode delay {} ms", config::to_string(t), cfg.runs,
                 cfg.duration_s, cfg.width, cfg.height, cfg.fps, cfg.encode_delay_ms);
    result.reports.push_back(measure(cfg, t, observer));
  }
  result.wall_s = duration<double>(steady_clock::now() - t0).count();
  return result;
}

std::vector<OrderingCheck> check_ordering(const BenchmarkResult& result) {
  std::vector<OrderingCheck> checks;
  const auto* seg = result.find(Transport::segmented);
  const auto* push = result.find(Transport::push);
  const auto* direct = result.find(Transport::direct);
  auto usable = [](const LatencyReport* r) { return r && r->error.empty() && r->n > 0; };

  // a < b on every paired run.
  auto pairwise_less = [&](const std::string& name, const std::vector<double>& a, const std::vector<double>& b) {
    OrderingCheck c{name, false, {}};
    std::size_t n = std::min(a.size(), b.size()), ok = 0;
    for (std::size_t i = 0; i < n; ++i) ok += a[i] < b[i];
    c.pass = n > 0 && ok == n && a.size() == b.size();
    c.detail = std::to_string(ok) + "/" + std::to_string(std::max(a.size(), b.size())) + " runs " + run_list(a) +
               " vs " + run_list(b);
    return c;
  };

  if (usable(direct) && usable(push)) {
    checks.push_back(
        pairwise_less("latency(direct) < latency(push)", direct->run_latency_ms, push->run_latency_ms));
    checks.push_back(
        pairwise_less("startup(direct) < startup(push)", direct->run_startup_ms, push->run_startup_ms));
  } else if (direct || push) {
    checks.push_back({"latency(direct) < latency(push)", false, "transport failed"});
    checks.push_back({"startup(direct) < startup(push)", false, "transport failed"});
  }
  if (seg) {
    double floor = 0.9 * static_cast<double>(result.config.segment_ms);
    OrderingCheck c{"latency(segmented) >= 0.9 x segment", false, {}};
    if (usable(seg)) {
      std::size_t ok = 0;
      for (double l : seg->run_latency_ms) ok += l >= floor;
      c.pass = ok == seg->run_latency_ms.size();
      c.detail = std::to_string(ok) + "/" + std::to_string(seg->run_latency_ms.size()) + " runs >= " +
                 std::to_string(static_cast<long>(floor)) + " ms " + run_list(seg->run_latency_ms);
    } else {
      c.detail = "transport failed";
    }
    checks.push_back(c);
  }
  return checks;
}

}  // namespace bora::bench
