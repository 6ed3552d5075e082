#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bora/stream/probe.hpp"

namespace bora::bench {

using stream::LatencyReport;
using stream::Transport;

struct BenchmarkConfig {
  double fps = 30;
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  // Measurement time per transport, shared out over the runs.
  double duration_s = 20;
  std::size_t runs = 10;
  std::int64_t encode_delay_ms = 0;
  std::int64_t segment_ms = 3000;
  std::size_t playlist_wrap = 10;
  std::vector<Transport> transports = {Transport::segmented, Transport::push, Transport::direct};
  // Client used per run; empty means stream::probe.
  std::function<stream::ProbeResult(Transport, const stream::ProbeOptions&)> prober;
};

// Throws PreconditionError: fps ≥ 1, runs ≥ 1, positive resolution, and a
// duration of at least two segments when segmented is measured.
void validate_benchmark_config(const BenchmarkConfig& cfg);

struct BenchmarkResult {
  BenchmarkConfig config;
  std::vector<LatencyReport> reports;  // one per requested transport, in order
  double wall_s = 0;

  const LatencyReport* find(Transport t) const;
};

// Progress hook: (transport, run index, result of that run).
using RunObserver = std::function<void(Transport, std::size_t, const stream::ProbeResult&)>;

/// Measures each transport in turn against its own in-process stream
/// server built from identical source parameters. A transport that fails
/// (TransportFailure, timeouts) gets an entry with `error` set and n = 0;
/// the others still run.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const RunObserver& observer = {});

/// The ordering properties the evaluation asserts, checked per run.
struct OrderingCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<OrderingCheck> check_ordering(const BenchmarkResult& result);

}  // namespace bora::bench
