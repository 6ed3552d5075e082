#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "bora/stream/pattern.hpp"

namespace bora::stream {

/// What the source publishes per frame: the raw picture (for per-client
/// re-encoding) and its one-time encoding (forwarded verbatim).
struct SourceFrame {
  std::uint64_t seq = 0;
  std::int64_t capture_ts_us = 0;
  std::shared_ptr<const Frame> raw;
  std::shared_ptr<const Bytes> encoded;
};

/// Single-writer / multi-reader ring of the newest frames. Readers keep
/// their own cursor (the last seq they consumed); the writer overwrites the
/// oldest slot unconditionally, so slow readers lose frames rather than
/// holding the source back. The lock only guards shared_ptr copies.
class FrameRing {
 public:
  explicit FrameRing(std::size_t capacity = 64);

  // seq must be exactly one past the previous frame's.
  void publish(SourceFrame frame);

  // Frames with seq > after_seq, oldest first, keeping only the newest
  // `backlog` of them (the rest are skipped: latest wins). Waits up to
  // `timeout` for at least one; empty on timeout or close.
  std::vector<SourceFrame> next_after(std::uint64_t after_seq, std::size_t backlog,
                                      std::chrono::milliseconds timeout) const;

  std::optional<SourceFrame> latest() const;
  std::optional<SourceFrame> find(std::uint64_t seq) const;
  std::vector<SourceFrame> snapshot() const;  // oldest first
  std::uint64_t newest_seq() const;           // 0 before the first frame
  std::size_t capacity() const { return slots_.size(); }

  // Wakes all waiting readers; publish() is ignored afterwards.
  void close();
  bool closed() const;

 private:
  std::vector<SourceFrame> slots_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::uint64_t newest_ = 0;
  std::size_t count_ = 0;
  bool closed_ = false;
};

}  // namespace bora::stream
