#pragma once

// Brute-force reference models for the stream tests.

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "bora/stream/pattern.hpp"

namespace bora::testing {

// Mean position of all lit pixels.
inline std::optional<stream::Point> lit_centroid(const stream::Frame& f) {
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (std::uint32_t y = 0; y < f.height; ++y) {
    for (std::uint32_t x = 0; x < f.width; ++x) {
      if (f.pixels[static_cast<std::size_t>(y) * f.width + x] > 127) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return stream::Point{sx / n, sy / n};
}

// Frames in a segment cut: scan every candidate boundary, take the first
// whose elapsed frame time reaches the target; everything if none does.
inline std::size_t expected_cut(const std::vector<std::int64_t>& ts_us, std::int64_t target_ms) {
  for (std::size_t k = 1; k < ts_us.size(); ++k) {
    if ((ts_us[k] - ts_us[0]) >= target_ms * 1000) return k;
  }
  return ts_us.size();
}

// Sliding window model: keep every index, then look at the newest `wrap`.
struct PlaylistOracle {
  std::size_t wrap;
  std::vector<std::uint64_t> all;

  bool add(std::uint64_t index) {
    std::uint64_t expect = all.empty() ? 1 : all.back() + 1;
    if (index != expect) return false;
    all.push_back(index);
    return true;
  }
  std::deque<std::uint64_t> entries() const {
    std::size_t from = all.size() > wrap ? all.size() - wrap : 0;
    return {all.begin() + static_cast<std::ptrdiff_t>(from), all.end()};
  }
  std::uint64_t media_sequence() const {
    auto e = entries();
    return e.empty() ? (all.empty() ? 1 : all.back() + 1) : e.front();
  }
};

}  // namespace bora::testing
