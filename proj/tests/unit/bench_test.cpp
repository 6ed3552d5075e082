#include <gtest/gtest.h>

#include <cmath>

#include "bora/bench/benchmark.hpp"
#include "bora/bench/report.hpp"

using namespace bora;
using namespace bora::bench;
using stream::Transport;

namespace {

// Small frames and short segments keep a full three-transport run brief.
BenchmarkConfig small_config() {
  BenchmarkConfig c;
  c.width = 160;
  c.height = 120;
  c.fps = 30;
  c.duration_s = 1.5;
  c.runs = 3;
  c.segment_ms = 300;
  c.playlist_wrap = 4;
  return c;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(BenchConfig, RejectsUnsaneSettings) {
  auto c = small_config();
  c.fps = 0.5;
  EXPECT_THROW(validate_benchmark_config(c), PreconditionError);
  c = small_config();
  c.runs = 0;
  EXPECT_THROW(validate_benchmark_config(c), PreconditionError);
  c = small_config();
  c.duration_s = 0.5;  // shorter than two 300 ms segments
  EXPECT_THROW(validate_benchmark_config(c), PreconditionError);
  c.transports = {Transport::push};
  EXPECT_NO_THROW(validate_benchmark_config(c));
}

TEST(Bench, ThreeReportsWithRequestedRunCount) {
  auto c = small_config();
  c.encode_delay_ms = 15;
  std::size_t observed = 0;
  auto result = run_benchmark(c, [&](Transport, std::size_t, const stream::ProbeResult& r) {
    ++observed;
    EXPECT_FALSE(r.latencies_ms.empty());
  });
  ASSERT_EQ(result.reports.size(), 3u);
  EXPECT_EQ(observed, 9u);
  for (const auto& r : result.reports) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(r.n, 3u);
    EXPECT_EQ(r.run_latency_ms.size(), 3u);
    EXPECT_NEAR(r.latency_ms.mean, mean_of(r.run_latency_ms), 1e-9);
  }
  for (const auto& check : check_ordering(result)) EXPECT_TRUE(check.pass) << check.name << ": " << check.detail;
}

TEST(Bench, FailedTransportDoesNotAbortOthers) {
  auto c = small_config();
  c.transports = {Transport::push, Transport::direct};
  c.prober = [](Transport t, const stream::ProbeOptions& opt) {
    if (t == Transport::push) throw stream::TransportFailure("refused");
    return stream::probe(t, opt);
  };
  auto result = run_benchmark(c);
  ASSERT_EQ(result.reports.size(), 2u);
  EXPECT_EQ(result.reports[0].n, 0u);
  EXPECT_NE(result.reports[0].error.find("TransportFailure"), std::string::npos);
  EXPECT_TRUE(result.reports[1].error.empty());
  EXPECT_EQ(result.reports[1].n, 3u);
  auto checks = check_ordering(result);
  ASSERT_FALSE(checks.empty());
  EXPECT_FALSE(checks[0].pass);
  EXPECT_NE(render_report(result, ReportFormat::text).find("failed: TransportFailure"), std::string::npos);
}

TEST(Bench, EncodeDelayKnobMovesPushOnly) {
  auto c = small_config();
  c.transports = {Transport::push, Transport::direct};
  c.runs = 4;
  c.duration_s = 2;
  c.encode_delay_ms = 0;
  auto base = run_benchmark(c);
  c.encode_delay_ms = 20;
  auto slow = run_benchmark(c);
  double push_delta = slow.find(Transport::push)->latency_ms.mean - base.find(Transport::push)->latency_ms.mean;
  double direct_delta =
      slow.find(Transport::direct)->latency_ms.mean - base.find(Transport::direct)->latency_ms.mean;
  // ≈ 20 ms per frame on push; direct forwards source bytes untouched.
  EXPECT_NEAR(push_delta, 20.0, 6.0);
  EXPECT_NEAR(direct_delta, 0.0, 5.0);
}

TEST(Report, CsvRoundTrip) {
  BenchmarkResult result;
  result.config = small_config();
  for (Transport t : {Transport::segmented, Transport::push, Transport::direct}) {
    LatencyReport r;
    r.transport = t;
    r.n = 10;
    r.startup_delay_ms = 12.345 * (1 + static_cast<int>(t));
    r.latency_ms.mean = 100.125 + static_cast<int>(t);
    r.latency_ms.stddev = 0.5;
    result.reports.push_back(r);
  }
  auto csv = render_report(result, ReportFormat::csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "transport,startup_ms,latency_mean_ms,latency_stddev_ms,n");
  auto rows = parse_report_csv(csv);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].transport, config::to_string(result.reports[i].transport));
    EXPECT_NEAR(rows[i].startup_ms, result.reports[i].startup_delay_ms, 5e-4);
    EXPECT_NEAR(rows[i].latency_mean_ms, result.reports[i].latency_ms.mean, 5e-4);
    EXPECT_EQ(rows[i].latency_stddev_ms, 0.5);
    EXPECT_EQ(rows[i].n, 10u);
  }
  EXPECT_THROW(parse_report_csv("nope\n"), ReportFormatError);
  EXPECT_THROW(parse_report_csv(csv + "push,1,2,3\n"), ReportFormatError);
  EXPECT_THROW(parse_report_csv(csv + "push,1,2,3,x\n"), ReportFormatError);
}

TEST(Report, TextStatesOrderingOnlyIsAsserted) {
  BenchmarkResult result;
  result.config = small_config();
  auto text = render_report(result, ReportFormat::text);
  EXPECT_NE(text.find("latency_mean_ms"), std::string::npos);
  EXPECT_NE(text.find("Only the orderings above are asserted"), std::string::npos);
}
