#include "bora/stream/streamer.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "bora/stream/codec.hpp"

namespace bora::stream {

void validate_stream_config(const StreamConfig& cfg) {
  if (cfg.id.empty()) throw PreconditionError("stream id must be nonempty");
  if (!(cfg.fps >= 1 && cfg.fps <= 1000)) throw PreconditionError("stream fps must be in [1, 1000]");
  if (cfg.segment_target_ms < 0) throw PreconditionError("segment target must be >= 0");
  if (cfg.playlist_wrap == 0) throw PreconditionError("playlist wrap must be >= 1");
  if (cfg.encode_delay_ms < 0) throw PreconditionError("encode delay must be >= 0");
  if (cfg.ring_capacity < 2) throw PreconditionError("ring capacity must be >= 2");
  check_pattern(cfg.pattern);
}

Streamer::Streamer(StreamConfig cfg, util::MicrosClock clock)
    : cfg_(std::move(cfg)),
      clock_(std::move(clock)),
      ring_(cfg_.ring_capacity),
      playlist_(cfg_.segment_target_ms, cfg_.playlist_wrap) {
  validate_stream_config(cfg_);
}

Streamer::~Streamer() { stop(); }

void Streamer::start() {
  if (running_.exchange(true)) return;
  stopping_ = false;
  producer_ = std::thread([this] { produce(); });
  segmenter_ = std::thread([this] { segment_loop(); });
}

void Streamer::stop() {
  if (!running_) return;
  stopping_ = true;
  ring_.close();
  if (producer_.joinable()) producer_.join();
  if (segmenter_.joinable()) segmenter_.join();
  seg_cv_.notify_all();
  running_ = false;
}

void Streamer::produce() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / cfg_.fps));
  const auto start = clock::now();
  std::uint64_t slot = 0;
  std::uint64_t seq = 0;
  while (!stopping_) {
    auto due = start + period * static_cast<std::int64_t>(slot);
    std::this_thread::sleep_until(due);
    if (stopping_) break;
    // The picture follows the nominal schedule; the timestamp is the real
    // capture instant.
    auto t_ms = static_cast<std::int64_t>(std::llround(static_cast<double>(slot) * 1000.0 / cfg_.fps));
    auto f = std::make_shared<Frame>(generate_test_frame(++seq, t_ms, cfg_.pattern, clock_()));
    auto encoded = std::make_shared<const Bytes>(encode_frame(*f));
    ring_.publish({f->seq, f->capture_ts_us, std::move(f), std::move(encoded)});
    ++published_;
    // Skip ticks we overslept rather than bursting to catch up.
    auto behind = (clock::now() - start) / period;
    slot = std::max<std::uint64_t>(slot + 1, static_cast<std::uint64_t>(behind));
  }
}

void Streamer::segment_loop() {
  std::vector<EncodedFrame> pending;
  std::uint64_t cursor = 0;
  std::uint64_t next_index = 1;
  const std::int64_t target_us = cfg_.segment_target_ms * 1000;
  while (!stopping_) {
    auto batch = ring_.next_after(cursor, 0, std::chrono::milliseconds(100));
    for (auto& f : batch) {
      if (stopping_) return;
      if (cursor != 0 && f.seq != cursor + 1) {
        spdlog::warn("stream {}: segmenter lost frames {}..{}, restarting segment", cfg_.id, cursor + 1, f.seq - 1);
        pending.clear();
      }
      cursor = f.seq;
      if (cfg_.encode_delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.encode_delay_ms));
      pending.push_back({f.seq, f.capture_ts_us, f.encoded});
      if (pending.size() >= 2 && pending.back().capture_ts_us - pending.front().capture_ts_us >= target_us) {
        Segment seg = build_segment(pending, cfg_.segment_target_ms, next_index++);
        pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(seg.frames.size()));
        add_segment(std::move(seg));
      }
    }
  }
}

void Streamer::add_segment(Segment seg) {
  {
    std::lock_guard lock(mu_);
    playlist_.add(seg.index);
    segments_[seg.index] = std::make_shared<const Segment>(std::move(seg));
    // Only what the playlist still lists is retained.
    while (!segments_.empty() && segments_.begin()->first < playlist_.media_sequence())
      segments_.erase(segments_.begin());
  }
  seg_cv_.notify_all();
}

Playlist Streamer::playlist() const {
  std::lock_guard lock(mu_);
  return playlist_;
}

std::pair<SegmentLookup, std::shared_ptr<const Segment>> Streamer::segment(std::uint64_t index) const {
  std::lock_guard lock(mu_);
  auto it = segments_.find(index);
  if (it != segments_.end()) return {SegmentLookup::found, it->second};
  if (playlist_.wrapped_away(index)) return {SegmentLookup::gone, nullptr};
  return {SegmentLookup::not_yet, nullptr};
}

std::vector<std::shared_ptr<const Segment>> Streamer::retained_segments() const {
  std::lock_guard lock(mu_);
  std::vector<std::shared_ptr<const Segment>> out;
  for (const auto& [i, s] : segments_) out.push_back(s);
  return out;
}

bool Streamer::wait_for_segments(std::uint64_t newest_index, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return seg_cv_.wait_for(lock, timeout, [&] { return playlist_.newest() >= newest_index; });
}

}  // namespace bora::stream
