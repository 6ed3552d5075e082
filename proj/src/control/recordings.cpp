#include "bora/control/recordings.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>

#include "bora/util/digest.hpp"

namespace bora::control {

std::string_view to_string(RecordingStatus s) {
  switch (s) {
    case RecordingStatus::pending:
      return "pending";
    case RecordingStatus::captured:
      return "captured";
    case RecordingStatus::expired:
      return "expired";
  }
  return "?";
}

RecordingService::RecordingService(std::shared_ptr<stream::StreamHub> hub, std::filesystem::path dir,
                                   util::MillisClock clock)
    : hub_(std::move(hub)), dir_(std::move(dir)), clock_(std::move(clock)) {}

namespace {

// Every frame the stream still holds, oldest first, without duplicates.
std::vector<stream::EncodedFrame> retained_frames(const stream::Streamer& s) {
  std::map<std::uint64_t, stream::EncodedFrame> by_seq;
  for (const auto& seg : s.retained_segments())
    for (const auto& f : seg->frames) by_seq.emplace(f.seq, f);
  for (const auto& f : s.ring().snapshot()) by_seq.emplace(f.seq, stream::EncodedFrame{f.seq, f.capture_ts_us, f.encoded});
  std::vector<stream::EncodedFrame> out;
  out.reserve(by_seq.size());
  for (auto& [seq, f] : by_seq) out.push_back(std::move(f));
  return out;
}

}  // namespace

void RecordingService::resolve(RecordingMark& m, bool final_pass) {
  auto s = hub_->find(m.stream_id);
  if (!s) {
    m.status = RecordingStatus::expired;
    return;
  }
  auto frames = retained_frames(*s);
  const std::int64_t from_us = m.from_ts * 1000, to_us = m.to_ts * 1000;
  std::vector<stream::EncodedFrame> hit;
  for (const auto& f : frames)
    if (f.capture_ts_us >= from_us && f.capture_ts_us < to_us) hit.push_back(f);

  bool range_complete = !frames.empty() && frames.back().capture_ts_us >= to_us;
  if (!hit.empty() && (final_pass || range_complete)) {
    stream::Segment seg;
    seg.frames = std::move(hit);
    util::Bytes blob = seg.blob();
    std::filesystem::create_directories(dir_);
    auto path = dir_ / (m.stream_id + "-" + std::to_string(m.id) + "-" + std::to_string(m.from_ts) + "-" +
                        std::to_string(m.to_ts) + ".bfrs");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (!out) throw Error("IoError", "cannot write recording " + path.string());
    m.status = RecordingStatus::captured;
    m.file = path;
    m.frames = seg.frames.size();
    m.sha256 = util::sha256_hex(blob);
    spdlog::info("recording {} of {}: {} frames -> {}", m.id, m.stream_id, m.frames, path.string());
    return;
  }
  bool before_retention = frames.empty() ? false : to_us <= frames.front().capture_ts_us;
  // Streamed past the range without catching anything: the range is gone.
  bool passed = !frames.empty() && frames.back().capture_ts_us >= to_us && hit.empty();
  if (before_retention || passed) m.status = RecordingStatus::expired;
}

RecordingMark RecordingService::mark(const std::string& stream_id, std::int64_t from_ts, std::int64_t to_ts) {
  if (!(from_ts < to_ts))
    throw EmptyRange("recording range [" + std::to_string(from_ts) + ", " + std::to_string(to_ts) + ") is empty");
  if (!hub_->find(stream_id)) throw UnknownStream(stream_id);
  std::lock_guard lock(mu_);
  RecordingMark m;
  m.id = next_id_++;
  m.stream_id = stream_id;
  m.from_ts = from_ts;
  m.to_ts = to_ts;
  m.created_ts = clock_();
  // A range overlapping retention is captured with what is there now.
  resolve(m, true);
  marks_[m.id] = m;
  return m;
}

void RecordingService::poll_pending() {
  std::lock_guard lock(mu_);
  for (auto& [id, m] : marks_)
    if (m.status == RecordingStatus::pending) resolve(m, false);
}

std::vector<RecordingMark> RecordingService::list() const {
  std::lock_guard lock(mu_);
  std::vector<RecordingMark> out;
  for (const auto& [id, m] : marks_) out.push_back(m);
  return out;
}

std::optional<RecordingMark> RecordingService::get(std::uint64_t id) const {
  std::lock_guard lock(mu_);
  auto it = marks_.find(id);
  if (it == marks_.end()) return std::nullopt;
  return it->second;
}

}  // namespace bora::control
