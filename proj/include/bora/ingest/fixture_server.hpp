#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bora/ingest/sample.hpp"

namespace bora::ingest {

/// Minimal stand-in for an upstream getdata-style service: answers
/// GET <any path>?sensors=..&window=.. with the canned rows for the
/// requested sensors, in the poll CSV format.
class FixtureServer {
 public:
  struct Request {
    std::string path;
    std::vector<std::string> sensors;
    std::string window;
    std::chrono::steady_clock::time_point at;
  };

  explicit FixtureServer(std::vector<SensorSample> canned);
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  int port() const { return port_; }
  std::string url(const std::string& path = "/getdata.php") const;

  // Serve this body verbatim instead of the canned rows.
  void set_raw_body(std::string body);
  // Delay every response (for timeout tests).
  void set_delay_ms(int ms);

  std::vector<Request> requests() const;
  // Highest number of requests being handled at the same time.
  int max_in_flight() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace bora::ingest
