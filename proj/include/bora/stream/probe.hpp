#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bora/config/dashboard.hpp"
#include "bora/util/clock.hpp"
#include "bora/util/error.hpp"

namespace bora::stream {

using config::Transport;

struct ProbeTimeout : Error {
  explicit ProbeTimeout(const std::string& message) : Error("Timeout", message) {}
};
struct HandshakeTimeout : Error {
  explicit HandshakeTimeout(const std::string& message) : Error("HandshakeTimeout", message) {}
};
struct SessionUnknown : Error {
  explicit SessionUnknown(const std::string& message) : Error("SessionUnknown", message) {}
};
// Server refused or broke the stream (error message, unexpected status).
struct TransportFailure : Error {
  explicit TransportFailure(const std::string& message) : Error("TransportFailure", message) {}
};

inline constexpr std::chrono::milliseconds kOfferTimeout{5000};

struct ProbeOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 0;
  std::string stream_id = "cam1";
  // How long to keep watching after the first decoded frame.
  std::chrono::milliseconds run_time{2000};
  // Limit on waiting for the first frame.
  std::chrono::milliseconds first_frame_timeout{10000};
  // Must be the clock the source stamps frames with.
  util::MicrosClock clock = util::system_micros_clock();
  // Record sha256 of every received frame's bytes (direct / push).
  bool hash_payloads = false;
};

/// One client session against one transport. Start-up delay is measured
/// from just before connecting to the first decoded frame; per-frame
/// latency is the decode (or, for segmented playback, display) instant
/// minus the frame's capture timestamp.
struct ProbeResult {
  Transport transport = Transport::direct;
  double startup_ms = 0;
  std::vector<double> latencies_ms;
  std::vector<std::uint64_t> seqs;
  std::map<std::uint64_t, std::string> payload_sha256;

  double mean_latency_ms() const;
};

ProbeResult probe_push(const ProbeOptions& opt);
ProbeResult probe_direct(const ProbeOptions& opt);
// Joins at the newest playlist entry and plays in real time (frames shown
// at their capture spacing), fetching following segments as they appear.
ProbeResult probe_segmented(const ProbeOptions& opt);
ProbeResult probe(Transport transport, const ProbeOptions& opt);

struct LatencyStats {
  double mean = 0;
  double min = 0;
  double max = 0;
  double stddev = 0;  // sample standard deviation; 0 for n < 2
};

/// Aggregate over n probe runs: start-up is the mean of the runs' start-up
/// delays; latency statistics are over the runs' mean latencies.
struct LatencyReport {
  Transport transport = Transport::direct;
  double startup_delay_ms = 0;
  LatencyStats latency_ms;
  std::size_t n = 0;
  std::vector<double> run_startup_ms;
  std::vector<double> run_latency_ms;
  std::string error;  // set when the transport failed
};

LatencyStats summarize(const std::vector<double>& values);
LatencyReport make_report(Transport transport, const std::vector<ProbeResult>& runs);

}  // namespace bora::stream
