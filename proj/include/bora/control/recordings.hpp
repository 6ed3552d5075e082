#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bora/stream/transports.hpp"
#include "bora/util/clock.hpp"

namespace bora::control {

enum class RecordingStatus { pending, captured, expired };
std::string_view to_string(RecordingStatus s);

struct RecordingMark {
  std::uint64_t id = 0;
  std::string stream_id;
  std::int64_t from_ts = 0;  // UTC ms, inclusive
  std::int64_t to_ts = 0;    // UTC ms, exclusive
  std::int64_t created_ts = 0;
  RecordingStatus status = RecordingStatus::pending;
  // Set once captured.
  std::optional<std::filesystem::path> file;
  std::size_t frames = 0;
  std::string sha256;  // of the file contents
};

struct UnknownStream : Error {
  explicit UnknownStream(const std::string& id) : Error("UnknownStream", "unknown stream: " + id) {}
};

struct EmptyRange : Error {
  explicit EmptyRange(const std::string& message) : Error("EmptyRange", message) {}
};

/// Marks stream ranges for keeping. A mark whose range overlaps what the
/// stream still retains (playlist segments plus the frame ring) is copied
/// out at once, as BFR1 frames in segment-blob layout; a range already
/// wrapped out of retention is expired; anything else (not yet streamed)
/// stays pending until poll_pending() can resolve it.
class RecordingService {
 public:
  RecordingService(std::shared_ptr<stream::StreamHub> hub, std::filesystem::path dir,
                   util::MillisClock clock = util::system_millis_clock());

  // Throws EmptyRange unless from_ts < to_ts, UnknownStream.
  RecordingMark mark(const std::string& stream_id, std::int64_t from_ts, std::int64_t to_ts);
  // Resolves pending marks whose range has since been streamed or lost.
  void poll_pending();

  std::vector<RecordingMark> list() const;
  std::optional<RecordingMark> get(std::uint64_t id) const;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  // Updates `m` in place from the stream's current retention.
  void resolve(RecordingMark& m, bool final_pass);

  std::shared_ptr<stream::StreamHub> hub_;
  std::filesystem::path dir_;
  util::MillisClock clock_;
  mutable std::mutex mu_;
  std::map<std::uint64_t, RecordingMark> marks_;
  std::uint64_t next_id_ = 1;
};

}  // namespace bora::control
