#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "bora/stream/frame_ring.hpp"
#include "bora/stream/playlist.hpp"
#include "bora/util/clock.hpp"

namespace bora::stream {

struct StreamConfig {
  std::string id = "cam1";
  PatternParams pattern;
  double fps = 30;
  std::int64_t segment_target_ms = kDefaultSegmentTargetMs;
  std::size_t playlist_wrap = kDefaultPlaylistWrap;
  // Simulated transcode cost, paid per frame by every re-encoding stage
  // (the segmenter and each push client) but not by direct forwarding.
  std::int64_t encode_delay_ms = 0;
  std::size_t ring_capacity = 64;
};

// Throws PreconditionError (or PatternOutOfBounds) on a bad config.
void validate_stream_config(const StreamConfig& cfg);

enum class SegmentLookup { found, gone, not_yet };

/// One live stream: a producer thread renders the test card at `fps` into
/// the frame ring (encoding each frame once), and a segmenter thread cuts
/// ring frames into segments behind a wrapping playlist.
class Streamer {
 public:
  explicit Streamer(StreamConfig cfg, util::MicrosClock clock = util::system_micros_clock());
  ~Streamer();
  Streamer(const Streamer&) = delete;
  Streamer& operator=(const Streamer&) = delete;

  void start();
  void stop();
  bool running() const { return running_; }

  const StreamConfig& config() const { return cfg_; }
  const std::string& id() const { return cfg_.id; }
  const FrameRing& ring() const { return ring_; }
  std::int64_t now_us() const { return clock_(); }

  Playlist playlist() const;
  std::pair<SegmentLookup, std::shared_ptr<const Segment>> segment(std::uint64_t index) const;
  // Segments still listed in the playlist, oldest first.
  std::vector<std::shared_ptr<const Segment>> retained_segments() const;
  bool wait_for_segments(std::uint64_t newest_index, std::chrono::milliseconds timeout) const;

  std::uint64_t frames_published() const { return published_; }

 private:
  void produce();
  void segment_loop();
  void add_segment(Segment seg);

  StreamConfig cfg_;
  util::MicrosClock clock_;
  FrameRing ring_;

  mutable std::mutex mu_;
  mutable std::condition_variable seg_cv_;
  Playlist playlist_;
  std::map<std::uint64_t, std::shared_ptr<const Segment>> segments_;

  std::atomic<bool> running_{false};
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> published_{0};
  std::thread producer_;
  std::thread segmenter_;
};

}  // namespace bora::stream
