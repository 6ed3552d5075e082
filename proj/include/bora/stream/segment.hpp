#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bora/stream/codec.hpp"

namespace bora::stream {

inline constexpr std::int64_t kDefaultSegmentTargetMs = 3000;

/// An encoded frame plus the header fields callers look at most.
struct EncodedFrame {
  std::uint64_t seq = 0;
  std::int64_t capture_ts_us = 0;
  std::shared_ptr<const Bytes> bytes;
};

EncodedFrame make_encoded(const Frame& f);

struct Segment {
  std::uint64_t index = 0;
  std::int64_t duration_ms = 0;
  std::vector<EncodedFrame> frames;

  std::int64_t start_ts_us() const { return frames.empty() ? 0 : frames.front().capture_ts_us; }
  // Blob served to clients: count u32 followed by the encoded frames.
  Bytes blob() const;
};

struct EmptyInput : Error {
  explicit EmptyInput(const std::string& message, std::string kind = "EmptyInput")
      : Error(std::move(kind), message) {}
};

// Gap or reordering in the seq numbers handed to build_segment.
struct ContiguityError : EmptyInput {
  explicit ContiguityError(const std::string& message) : EmptyInput(message, "ContiguityError") {}
};

/// Cuts a segment from the front of `frames`: the shortest prefix [0, k)
/// whose frame time ts[k] - ts[0] reaches `target_ms`, i.e. the cut falls on
/// the first frame boundary at or past the target. When no boundary gets
/// there, every frame goes in. Frames must be non-empty with consecutive seq.
Segment build_segment(std::span<const EncodedFrame> frames, std::int64_t target_ms = kDefaultSegmentTargetMs,
                      std::uint64_t index = 0);

/// Splits a segment blob back into per-frame views (checked framing only).
std::vector<ByteView> split_segment_blob(ByteView blob);

}  // namespace bora::stream
