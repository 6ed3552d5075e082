#include "bora/ingest/http_poll.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <set>

namespace bora::ingest {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host:port
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw PreconditionError("endpoint is not an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ',';
    out += id;
  }
  return out;
}

}  // namespace

std::vector<SensorSample> poll_http_source(const SourceConfig& cfg, std::int64_t window_s,
                                           const ParserRegistry& registry,
                                           std::int64_t default_interval_ms) {
  if (cfg.sensors.empty()) throw PreconditionError("poll source " + cfg.name + " lists no sensors");
  if (window_s <= 0) throw PreconditionError("window_s must be > 0");
  if (cfg.endpoint.empty()) throw PreconditionError("poll source " + cfg.name + " has no endpoint");
  auto parser = registry.resolve(cfg.protocol);

  const auto [base, path] = split_url(cfg.endpoint);
  const auto timeout =
      std::chrono::milliseconds(cfg.effective_poll_interval_ms(default_interval_ms) * 8 / 10);

  httplib::Client client(base);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Params params{{"sensors", join(cfg.sensors)}, {"window", std::to_string(window_s)}};
  auto res = client.Get(path, params, httplib::Headers{});
  if (!res) throw TransportError(cfg.endpoint + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError(cfg.endpoint + ": HTTP " + std::to_string(res->status));

  auto samples = parser->parse(util::as_bytes(res->body), cfg);
  const std::set<std::string> wanted(cfg.sensors.begin(), cfg.sensors.end());
  std::erase_if(samples, [&](const SensorSample& s) { return !wanted.count(s.sensor_id); });
  sort_samples(samples);

  std::set<std::string> seen;
  for (const auto& s : samples) seen.insert(s.sensor_id);
  for (const auto& id : wanted)
    if (!seen.count(id)) spdlog::warn("source {}: no samples for sensor {}", cfg.name, id);
  return samples;
}

PollingSource::PollingSource(SourceConfig cfg, std::shared_ptr<const ParserRegistry> registry,
                             SampleSink sink, std::int64_t default_interval_ms)
    : cfg_(std::move(cfg)),
      registry_(std::move(registry)),
      sink_(std::move(sink)),
      interval_ms_(cfg_.effective_poll_interval_ms(default_interval_ms)) {
  validate_source(cfg_);
  registry_->resolve(cfg_.protocol);
  thread_ = std::thread([this] { run(); });
}

PollingSource::~PollingSource() { stop(); }

void PollingSource::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void PollingSource::run() {
  using clock = std::chrono::steady_clock;
  const auto interval = std::chrono::milliseconds(interval_ms_);
  auto next_due = clock::now();
  for (;;) {
    {
      std::unique_lock lock(mu_);
      if (cv_.wait_until(lock, next_due, [this] { return stopping_; })) return;
    }
    next_due += interval;
    ++polls_;
    try {
      for (const auto& s : poll_http_source(cfg_, cfg_.window_s, *registry_, interval_ms_)) sink_(s);
    } catch (const std::exception& e) {
      ++failures_;
      spdlog::warn("source {}: poll failed: {}", cfg_.name, e.what());
    }
    // A poll that overran its slot restarts the schedule instead of bursting.
    if (clock::now() > next_due) next_due = clock::now();
  }
}

}  // namespace bora::ingest
