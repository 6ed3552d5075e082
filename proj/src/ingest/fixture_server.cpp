#include "bora/ingest/fixture_server.hpp"

#include <httplib.h>

#include <optional>
#include <thread>

#include "bora/ingest/parsers.hpp"

namespace bora::ingest {

struct FixtureServer::Impl {
  httplib::Server server;
  std::thread thread;
  mutable std::mutex mu;
  std::vector<SensorSample> canned;
  std::optional<std::string> raw_body;
  int delay_ms = 0;
  std::vector<Request> requests;
  int in_flight = 0;
  int max_in_flight = 0;
};

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!part.empty()) out.push_back(part);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

FixtureServer::FixtureServer(std::vector<SensorSample> canned) : impl_(std::make_unique<Impl>()) {
  impl_->canned = std::move(canned);
  impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    Request seen{req.path, split_csv_list(req.get_param_value("sensors")), req.get_param_value("window"),
                 std::chrono::steady_clock::now()};
    std::string body;
    int delay = 0;
    {
      std::lock_guard lock(impl_->mu);
      impl_->requests.push_back(seen);
      impl_->max_in_flight = std::max(impl_->max_in_flight, ++impl_->in_flight);
      delay = impl_->delay_ms;
      if (impl_->raw_body) {
        body = *impl_->raw_body;
      } else {
        std::vector<SensorSample> rows;
        for (const auto& s : impl_->canned)
          if (std::find(seen.sensors.begin(), seen.sensors.end(), s.sensor_id) != seen.sensors.end())
            rows.push_back(s);
        body = format_csv_samples(rows);
      }
    }
    if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    {
      std::lock_guard lock(impl_->mu);
      --impl_->in_flight;
    }
    res.set_content(body, "text/csv");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

FixtureServer::~FixtureServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string FixtureServer::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + path;
}

void FixtureServer::set_raw_body(std::string body) {
  std::lock_guard lock(impl_->mu);
  impl_->raw_body = std::move(body);
}

void FixtureServer::set_delay_ms(int ms) {
  std::lock_guard lock(impl_->mu);
  impl_->delay_ms = ms;
}

std::vector<FixtureServer::Request> FixtureServer::requests() const {
  std::lock_guard lock(impl_->mu);
  return impl_->requests;
}

}  // namespace bora::ingest

namespace bora::ingest {

int FixtureServer::max_in_flight() const {
  std::lock_guard lock(impl_->mu);
  return impl_->max_in_flight;
}

}  // namespace bora::ingest
