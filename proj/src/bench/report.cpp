#include "bora/bench/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace bora::bench {

namespace {

constexpr const char* kCsvHeader = "transport,startup_ms,latency_mean_ms,latency_stddev_ms,n";

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double to_double(const std::string& s, std::size_t row) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ReportFormatError("row " + std::to_string(row) + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string render_report(const BenchmarkResult& result, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << kCsvHeader << "\n";
    for (const auto& r : result.reports) {
      os << config::to_string(r.transport) << "," << fixed(r.startup_delay_ms, 3) << ","
         << fixed(r.latency_ms.mean, 3) << "," << fixed(r.latency_ms.stddev, 3) << "," << r.n << "\n";
    }
    return os.str();
  }

  const auto& c = result.config;
  os << "transport benchmark: " << c.width << "x" << c.height << " @ " << c.fps << " fps, " << c.duration_s
     << " s per transport, " << c.runs << " runs, encode delay " << c.encode_delay_ms << " ms, segments "
     << c.segment_ms << " ms\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %12s %16s %18s %4s\n", "transport", "startup_ms", "latency_mean_ms",
                "latency_stddev_ms", "n");
  os << line;
  for (const auto& r : result.reports) {
    if (!r.error.empty()) {
      std::snprintf(line, sizeof line, "%-10s failed: %s\n", std::string(config::to_string(r.transport)).c_str(),
                    r.error.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-10s %12.1f %16.1f %18.1f %4zu\n",
                    std::string(config::to_string(r.transport)).c_str(), r.startup_delay_ms, r.latency_ms.mean,
                    r.latency_ms.stddev, r.n);
    }
    os << line;
  }
  os << "\n";
  for (const auto& check : check_ordering(result))
    os << (check.pass ? "PASS " : "FAIL ") << check.name << ": " << check.detail << "\n";
  os << "\nOnly the orderings above are asserted. Absolute values depend on the host and are not expected to "
        "match published measurements.\n";
  os << "wall time " << fixed(result.wall_s, 1) << " s\n";
  return os.str();
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  std::size_t row = 0, start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++row;
    if (row == 1) {
      if (line != kCsvHeader) throw ReportFormatError("unexpected header: '" + std::string(line) + "'");
      continue;
    }
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 5) throw ReportFormatError("row " + std::to_string(row) + ": expected 5 fields");
    ReportRow r;
    r.transport = f[0];
    r.startup_ms = to_double(f[1], row);
    r.latency_mean_ms = to_double(f[2], row);
    r.latency_stddev_ms = to_double(f[3], row);
    double n = to_double(f[4], row);
    if (n < 0 || n != static_cast<double>(static_cast<std::size_t>(n)))
      throw ReportFormatError("row " + std::to_string(row) + ": n must be a count");
    r.n = static_cast<std::size_t>(n);
    rows.push_back(std::move(r));
  }
  if (row == 0) throw ReportFormatError("empty report");
  return rows;
}

}  // namespace bora::bench
