#include "bora/stream/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bora::stream {

PatternParams PatternParams::fit(std::uint32_t width, std::uint32_t height) {
  PatternParams p;
  p.width = width;
  p.height = height;
  p.center_x = width / 2.0;
  p.center_y = height / 2.0;
  double half = std::min(p.center_x, p.center_y);
  p.disc_radius = half >= 6 ? std::floor(half / 6) : half / 2;
  p.orbit_radius = std::clamp(std::floor(half * 2 / 3), 0.0, half - p.disc_radius);
  return p;
}

void check_pattern(const PatternParams& p) {
  if (p.width == 0 || p.height == 0) throw PatternOutOfBounds("frame size must be positive");
  if (p.disc_radius < 0 || p.orbit_radius < 0) throw PatternOutOfBounds("radii must be non-negative");
  if (p.period_ms <= 0) throw PatternOutOfBounds("period_ms must be positive");
  double room = std::min({p.center_x, p.center_y, p.width - p.center_x, p.height - p.center_y});
  if (p.orbit_radius + p.disc_radius > room) {
    throw PatternOutOfBounds("orbit R=" + std::to_string(p.orbit_radius) + " plus disc r=" +
                             std::to_string(p.disc_radius) + " leaves the " + std::to_string(p.width) + "x" +
                             std::to_string(p.height) + " frame");
  }
}

Point disc_center(std::int64_t t_ms, const PatternParams& p) {
  // Reduce the phase in integers first so long-running streams keep precision.
  std::int64_t phase_ms = t_ms % p.period_ms;
  if (phase_ms < 0) phase_ms += p.period_ms;
  double angle = 2 * std::numbers::pi * static_cast<double>(phase_ms) / static_cast<double>(p.period_ms);
  return {p.center_x + p.orbit_radius * std::cos(angle), p.center_y + p.orbit_radius * std::sin(angle)};
}

Frame generate_test_frame(std::uint64_t seq, std::int64_t t_ms, const PatternParams& p) {
  return generate_test_frame(seq, t_ms, p, t_ms * 1000);
}

Frame generate_test_frame(std::uint64_t seq, std::int64_t t_ms, const PatternParams& p, std::int64_t capture_ts_us) {
  check_pattern(p);
  Frame f;
  f.seq = seq;
  f.capture_ts_us = capture_ts_us;
  f.width = p.width;
  f.height = p.height;
  f.pixels.assign(static_cast<std::size_t>(p.width) * p.height, 0);

  Point c = disc_center(t_ms, p);
  double r2 = p.disc_radius * p.disc_radius;
  auto y0 = static_cast<std::int64_t>(std::max(0.0, std::floor(c.y - p.disc_radius)));
  auto y1 = static_cast<std::int64_t>(std::min<double>(p.height - 1, std::ceil(c.y + p.disc_radius)));
  for (std::int64_t y = y0; y <= y1; ++y) {
    double dy = static_cast<double>(y) - c.y;
    double span2 = r2 - dy * dy;
    if (span2 < 0) continue;
    double half = std::sqrt(span2);
    auto x0 = static_cast<std::int64_t>(std::max(0.0, std::ceil(c.x - half)));
    auto x1 = static_cast<std::int64_t>(std::min<double>(p.width - 1, std::floor(c.x + half)));
    // Guard the rounding at the span ends against the exact predicate.
    while (x0 <= x1 && (x0 - c.x) * (x0 - c.x) + dy * dy > r2) ++x0;
    while (x1 >= x0 && (x1 - c.x) * (x1 - c.x) + dy * dy > r2) --x1;
    if (x0 > x1) continue;
    auto row = f.pixels.begin() + y * p.width;
    std::fill(row + x0, row + x1 + 1, std::uint8_t{255});
  }
  return f;
}

}  // namespace bora::stream
