#pragma once

#include <cstdint>

#include "bora/util/bytes.hpp"
#include "bora/util/error.hpp"

namespace bora::stream {

using util::Bytes;

/// One grayscale video frame. Pixel (x, y) lives at pixels[y * width + x].
struct Frame {
  std::uint64_t seq = 0;
  std::int64_t capture_ts_us = 0;  // microseconds on the stream's clock
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Bytes pixels;

  bool operator==(const Frame&) const = default;
};

/// Orbiting-disc test card: a white disc of `disc_radius` circling
/// (center_x, center_y) at `orbit_radius`, one revolution per `period_ms`.
struct PatternParams {
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  double orbit_radius = 160;
  double center_x = 320;
  double center_y = 240;
  std::int64_t period_ms = 4000;
  double disc_radius = 40;

  // Centered orbit scaled to the frame (used for non-default resolutions).
  static PatternParams fit(std::uint32_t width, std::uint32_t height);
};

struct PatternOutOfBounds : Error {
  explicit PatternOutOfBounds(const std::string& message) : Error("PatternOutOfBounds", message) {}
};

struct Point {
  double x = 0;
  double y = 0;
};

/// Where the disc center sits at time t.
Point disc_center(std::int64_t t_ms, const PatternParams& p);

/// Renders the card at time t. Pixels whose center (x, y) lies within
/// disc_radius of disc_center() are 255, the rest 0. The result depends
/// only on (seq, t_ms, p); capture_ts_us defaults to t_ms in microseconds.
/// Throws PatternOutOfBounds unless R + r <= min(cx, cy, w - cx, h - cy).
Frame generate_test_frame(std::uint64_t seq, std::int64_t t_ms, const PatternParams& p);
Frame generate_test_frame(std::uint64_t seq, std::int64_t t_ms, const PatternParams& p, std::int64_t capture_ts_us);

void check_pattern(const PatternParams& p);

}  // namespace bora::stream
