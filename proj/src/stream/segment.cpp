#include "bora/stream/segment.hpp"

#include <string>

namespace bora::stream {

EncodedFrame make_encoded(const Frame& f) {
  return {f.seq, f.capture_ts_us, std::make_shared<const Bytes>(encode_frame(f))};
}

Bytes Segment::blob() const {
  std::size_t total = 4;
  for (const auto& f : frames) total += f.bytes->size();
  Bytes out;
  out.reserve(total);
  util::BigEndianWriter w(out);
  w.u32(static_cast<std::uint32_t>(frames.size()));
  for (const auto& f : frames) w.raw(*f.bytes);
  return out;
}

Segment build_segment(std::span<const EncodedFrame> frames, std::int64_t target_ms, std::uint64_t index) {
  if (frames.empty()) throw EmptyInput("no frames to segment");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].seq != frames[i - 1].seq + 1) {
      throw ContiguityError("seq " + std::to_string(frames[i].seq) + " follows " +
                            std::to_string(frames[i - 1].seq));
    }
  }
  const std::int64_t target_us = target_ms * 1000;
  const std::int64_t t0 = frames.front().capture_ts_us;
  std::size_t k = frames.size();
  std::int64_t span_us = -1;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].capture_ts_us - t0 >= target_us) {
      k = i;
      span_us = frames[i].capture_ts_us - t0;
      break;
    }
  }
  if (span_us < 0) {
    // Not enough frame time: take everything, last frame counted at the
    // mean interval.
    std::size_t n = frames.size();
    std::int64_t last = frames.back().capture_ts_us - t0;
    span_us = n > 1 ? last + last / static_cast<std::int64_t>(n - 1) : 0;
  }
  Segment seg;
  seg.index = index;
  seg.duration_ms = (span_us + 500) / 1000;
  seg.frames.assign(frames.begin(), frames.begin() + static_cast<std::ptrdiff_t>(k));
  return seg;
}

std::vector<ByteView> split_segment_blob(ByteView blob) {
  util::BigEndianReader r(blob);
  std::uint32_t count;
  std::vector<ByteView> out;
  try {
    count = r.u32();
    out.reserve(std::min<std::size_t>(count, blob.size() / kFrameHeaderSize));
    for (std::uint32_t i = 0; i < count; ++i) {
      ByteView rest = blob.subspan(r.position());
      FrameHeader h = peek_header(rest);
      out.push_back(r.take(kFrameHeaderSize + h.payload_len));
    }
  } catch (const util::ShortRead&) {
    throw CorruptFrame("segment blob truncated");
  }
  if (r.remaining() != 0) throw CorruptFrame("trailing bytes after segment frames");
  return out;
}

}  // namespace bora::stream
