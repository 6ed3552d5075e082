#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bora/bench/benchmark.hpp"

namespace bora::bench {

struct ReportFormatError : Error {
  explicit ReportFormatError(const std::string& message) : Error("FormatError", message) {}
};

enum class ReportFormat { text, csv };

// Row per transport: transport, startup_ms, latency_mean_ms,
// latency_stddev_ms, n. Text output adds the ordering checks and a note
// that only orderings, not absolute values, are asserted.
std::string render_report(const BenchmarkResult& result, ReportFormat format);

struct ReportRow {
  std::string transport;
  double startup_ms = 0;
  double latency_mean_ms = 0;
  double latency_stddev_ms = 0;
  std::size_t n = 0;
  bool operator==(const ReportRow&) const = default;
};

// Parses render_report(..., csv); throws ReportFormatError on malformed input.
std::vector<ReportRow> parse_report_csv(std::string_view text);

}  // namespace bora::bench
