// bora: command-line front end.
//
//   bora serve    --config <path> [--port <n>] [--bind <addr>] [--static <dir>]
//   bora bench    [--transport segmented|push|direct]... [--runs 10] [--fps 30] [--duration 20]
//   bora simulate [--profile sine] [--sensors 8] [--tick-ms 1000] [--ticks N] [--push <url>]
//   bora patch    --server <url> [--token <t>] (<json> | --file <path>)

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "bora/bench/benchmark.hpp"
#include "bora/bench/report.hpp"
#include "bora/config/bundle.hpp"
#include "bora/ingest/parsers.hpp"
#include "bora/ingest/simulated.hpp"
#include "bora/server/server.hpp"

using namespace bora;

namespace {

void report_error(const std::exception& e) {
  if (const auto* v = dynamic_cast<const config::ValidationError*>(&e)) {
    std::fprintf(stderr, "bora: ValidationError: %s\n", e.what());
    for (const auto& viol : v->violations)
      std::fprintf(stderr, "  %s: %s\n", viol.widget_id.empty() ? "<dashboard>" : viol.widget_id.c_str(),
                   viol.message.c_str());
  } else if (const auto* b = dynamic_cast<const Error*>(&e)) {
    std::fprintf(stderr, "bora: %s: %s\n", b->kind().c_str(), e.what());
  } else {
    std::fprintf(stderr, "bora: %s\n", e.what());
  }
}

// Splits "http://host:port/path" into the scheme-host part and the path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

// ---------- serve ----------

struct ServeArgs {
  std::string config;
  std::optional<int> port;
  std::optional<std::string> bind;
  std::optional<std::string> static_dir;
};

int cmd_serve(const ServeArgs& a) {
  // Block the shutdown signals before any thread exists so that only the
  // sigwait below receives them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  std::unique_ptr<server::Server> srv;
  try {
    auto cfg = server::load_server_config(a.config);
    if (a.port) cfg.port = static_cast<unsigned short>(*a.port);
    if (a.bind) cfg.bind = *a.bind;
    if (a.static_dir) cfg.static_dir = *a.static_dir;
    srv = std::make_unique<server::Server>(std::move(cfg));
    srv->start();
  } catch (const std::exception& e) {
    report_error(e);
    return 1;
  }
  // Scripts read this line to find an ephemeral port.
  std::printf("listening on %s:%u\n", srv->config().bind.c_str(), srv->port());
  std::fflush(stdout);

  int sig = 0;
  sigwait(&set, &sig);
  spdlog::info("received signal {}, shutting down", sig);
  srv->stop();
  return 0;
}

// ---------- bench ----------

struct BenchArgs {
  std::vector<std::string> transports;
  std::size_t runs = 10;
  double fps = 30;
  double duration = 20;
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  std::int64_t encode_delay = 15;
  std::int64_t segment_ms = 3000;
  std::string format = "text";
  std::string out;
  bool check = false;
};

int cmd_bench(const BenchArgs& a) {
  bench::BenchmarkConfig cfg;
  cfg.runs = a.runs;
  cfg.fps = a.fps;
  cfg.duration_s = a.duration;
  cfg.width = a.width;
  cfg.height = a.height;
  cfg.encode_delay_ms = a.encode_delay;
  cfg.segment_ms = a.segment_ms;
  if (!a.transports.empty()) {
    cfg.transports.clear();
    for (const auto& name : a.transports) cfg.transports.push_back(*config::transport_from_string(name));
  }
  bench::BenchmarkResult result;
  try {
    result = bench::run_benchmark(cfg, [](stream::Transport t, std::size_t i, const stream::ProbeResult& r) {
      spdlog::info("{} run {}: startup {:.1f} ms, latency {:.1f} ms over {} frames", config::to_string(t), i + 1,
                   r.startup_ms, r.mean_latency_ms(), r.latencies_ms.size());
    });
  } catch (const std::exception& e) {
    report_error(e);
    return 1;
  }
  auto text = bench::render_report(result, a.format == "csv" ? bench::ReportFormat::csv : bench::ReportFormat::text);
  if (a.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    config::write_file(a.out, text);
  }
  if (a.check) {
    for (const auto& c : bench::check_ordering(result))
      if (!c.pass) return 3;
    for (const auto& r : result.reports)
      if (!r.error.empty()) return 3;
  }
  return 0;
}

// ---------- simulate ----------

struct SimulateArgs {
  std::string profile = "sine";
  std::size_t sensors = 8;
  std::string prefix = "sim";
  std::int64_t tick_ms = 1000;
  std::int64_t period_ms = 60000;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t ticks = 0;  // 0: until interrupted
  std::string push;
  std::string token;
};

int cmd_simulate(const SimulateArgs& a) {
  auto waveform = ingest::waveform_from_string(a.profile);
  if (!waveform) {
    std::fprintf(stderr, "bora: unknown profile '%s' (sine, ramp, random_walk)\n", a.profile.c_str());
    return 2;
  }
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < a.sensors; ++i) ids.push_back(a.prefix + "_" + std::to_string(i));

  std::unique_ptr<httplib::Client> client;
  std::string push_path;
  if (!a.push.empty()) {
    auto [host, path] = split_url(a.push);
    client = std::make_unique<httplib::Client>(host);
    push_path = path;
  }

  std::mutex mu;
  std::vector<ingest::SensorSample> batch;
  std::uint64_t ticks_done = 0;
  std::condition_variable cv;
  auto sink = [&](const ingest::SensorSample& s) {
    std::lock_guard lock(mu);
    batch.push_back(s);
    if (batch.size() < ids.size()) return;
    if (client) {
      auto raw = ingest::encode_push_message(batch);
      httplib::Headers h;
      if (!a.token.empty()) h.emplace(server::kTokenHeader, a.token);
      auto res = client->Post(push_path, h, std::string(raw.begin(), raw.end()), "application/octet-stream");
      if (!res || res->status != 200)
        spdlog::warn("push to {} failed: {}", a.push, res ? std::to_string(res->status) : httplib::to_string(res.error()));
    } else {
      std::fputs(ingest::format_csv_samples(batch).c_str(), stdout);
      std::fflush(stdout);
    }
    batch.clear();
    ++ticks_done;
    cv.notify_all();
  };

  ingest::SimProfile profile{*waveform, a.period_ms, a.amplitude, a.seed};
  std::unique_ptr<ingest::SimulatedSource> source;
  try {
    source = ingest::run_simulated_source(profile, ids, a.tick_ms, sink);
  } catch (const std::exception& e) {
    report_error(e);
    return 1;
  }
  if (a.ticks > 0) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return ticks_done >= a.ticks; });
  } else {
    int sig = 0;
    sigwait(&set, &sig);
  }
  source->stop();
  return 0;
}

// ---------- patch ----------

int cmd_patch(const std::string& server_url, const std::string& token, const std::string& body_arg,
              const std::string& file) {
  std::string body;
  try {
    body = file.empty() ? body_arg : config::read_file(file);
    config::parse_control_patch(body);  // fail locally before sending
  } catch (const std::exception& e) {
    report_error(e);
    return 2;
  }
  httplib::Client client(server_url);
  httplib::Headers h;
  if (!token.empty()) h.emplace(server::kTokenHeader, token);
  auto res = client.Post("/api/control", h, body, "application/json");
  if (!res) {
    std::fprintf(stderr, "bora: request failed: %s\n", httplib::to_string(res.error()).c_str());
    return 1;
  }
  std::printf("%s\n", res->body.c_str());
  return res->status == 200 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BORA monitoring server"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run the dashboard server");
  s->add_option("--config", serve.config, "Server config (JSON)")->required()->check(CLI::ExistingFile);
  s->add_option("--port", serve.port, "Listen port (overrides config; 0 picks a free port)")
      ->check(CLI::Range(0, 65535));
  s->add_option("--bind", serve.bind, "Listen address (overrides config)");
  s->add_option("--static", serve.static_dir, "Frontend bundle directory")->check(CLI::ExistingDirectory);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Compare stream transports");
  b->add_option("--transport", bench.transports, "Transport(s) to measure; default all")
      ->check(CLI::IsMember({"segmented", "push", "direct"}))
      ->take_all();
  b->add_option("--runs", bench.runs, "Runs per transport")->check(CLI::PositiveNumber);
  b->add_option("--fps", bench.fps, "Source frame rate")->check(CLI::Range(1.0, 240.0));
  b->add_option("--duration", bench.duration, "Seconds of measurement per transport")->check(CLI::PositiveNumber);
  b->add_option("--width", bench.width, "Frame width")->check(CLI::Range(1, 4096));
  b->add_option("--height", bench.height, "Frame height")->check(CLI::Range(1, 4096));
  b->add_option("--encode-delay", bench.encode_delay, "Per-frame encode cost in ms")->check(CLI::NonNegativeNumber);
  b->add_option("--segment-ms", bench.segment_ms, "Segment target duration")->check(CLI::PositiveNumber);
  b->add_option("--format", bench.format, "Report format")->check(CLI::IsMember({"text", "csv"}));
  b->add_option("--out", bench.out, "Write the report to a file");
  b->add_flag("--check", bench.check, "Exit 3 if an ordering property fails");

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Emit synthetic sensor data (CSV to stdout, or push to a server)");
  m->add_option("--profile", sim.profile, "sine, ramp or random_walk");
  m->add_option("--sensors", sim.sensors, "Number of sensors")->check(CLI::Range(1, 10000));
  m->add_option("--prefix", sim.prefix, "Sensor id prefix");
  m->add_option("--tick-ms", sim.tick_ms, "Sample interval")->check(CLI::Range(ingest::kMinSimTickMs, INT64_MAX));
  m->add_option("--period-ms", sim.period_ms, "Waveform period")->check(CLI::PositiveNumber);
  m->add_option("--amplitude", sim.amplitude, "Waveform amplitude");
  m->add_option("--seed", sim.seed, "Random walk seed");
  m->add_option("--ticks", sim.ticks, "Stop after N ticks (0 = run until interrupted)");
  m->add_option("--push", sim.push, "POST each tick to this push endpoint, e.g. http://host:8080/ingest/daq");
  m->add_option("--token", sim.token, "Token for --push");

  std::string patch_server, patch_token, patch_body, patch_file;
  auto* p = app.add_subcommand("patch", "Submit one control patch");
  p->add_option("--server", patch_server, "Server base URL")->required();
  p->add_option("--token", patch_token, "X-Bora-Token value (default: $BORA_TOKEN)")->envname(server::kTokenEnv);
  p->add_option("--file", patch_file, "Read the patch from a file")->check(CLI::ExistingFile);
  p->add_option("patch", patch_body, "Patch JSON");

  CLI11_PARSE(app, argc, argv);
  // Logs go to stderr so stdout stays machine-readable.
  spdlog::set_default_logger(spdlog::stderr_color_mt("bora"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  if (*s) return cmd_serve(serve);
  if (*b) return cmd_bench(bench);
  if (*m) return cmd_simulate(sim);
  if (*p) {
    if (patch_body.empty() == patch_file.empty()) {
      std::fprintf(stderr, "bora: give the patch inline or with --file\n");
      return 2;
    }
    return cmd_patch(patch_server, patch_token, patch_body, patch_file);
  }
  return 0;
}
