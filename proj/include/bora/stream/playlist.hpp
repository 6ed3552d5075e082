#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "bora/stream/segment.hpp"

namespace bora::stream {

inline constexpr std::size_t kDefaultPlaylistWrap = 10;

struct NonMonotonicSegment : Error {
  explicit NonMonotonicSegment(const std::string& message) : Error("NonMonotonicSegment", message) {}
};

/// Sliding window over the newest `wrap` segment indices. Indices start at
/// 1 and must arrive consecutively.
class Playlist {
 public:
  explicit Playlist(std::int64_t target_duration_ms = kDefaultSegmentTargetMs, std::size_t wrap = kDefaultPlaylistWrap);

  // Throws NonMonotonicSegment unless index == newest() + 1.
  void add(std::uint64_t index);

  const std::deque<std::uint64_t>& entries() const { return entries_; }
  std::uint64_t newest() const { return newest_; }
  std::uint64_t media_sequence() const { return newest_ - entries_.size() + 1; }
  std::int64_t target_duration_ms() const { return target_ms_; }
  std::size_t wrap() const { return wrap_; }

  bool contains(std::uint64_t index) const;
  // Produced earlier but no longer listed.
  bool wrapped_away(std::uint64_t index) const { return index >= 1 && index < media_sequence(); }

  // #BORAPL v1 / #TARGET:<ms> / #MEDIA-SEQ:<n> / segment/<index> ...
  std::string manifest() const;

 private:
  std::int64_t target_ms_;
  std::size_t wrap_;
  std::uint64_t newest_ = 0;
  std::deque<std::uint64_t> entries_;
};

// Functional form: returns the playlist with `seg` appended.
Playlist playlist_add(Playlist pl, const Segment& seg);

struct ParsedPlaylist {
  std::int64_t target_duration_ms = 0;
  std::uint64_t media_sequence = 0;
  std::vector<std::string> urls;
  std::vector<std::uint64_t> indices;
};

struct BadManifest : Error {
  explicit BadManifest(const std::string& message) : Error("BadManifest", message) {}
};

ParsedPlaylist parse_manifest(std::string_view text);

}  // namespace bora::stream
