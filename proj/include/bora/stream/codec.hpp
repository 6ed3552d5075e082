#pragma once

#include <cstddef>
#include <cstdint>

#include "bora/stream/pattern.hpp"
#include "bora/util/bytes.hpp"

namespace bora::stream {

using util::ByteView;

// BFR1 wire layout, all integers big-endian:
//   "BFR1" | seq u64 | capture_ts u64 | width u32 | height u32 | payload_len u32 | payload
// The payload is a token stream. Each token is a LEB128 varint t with
// kind = t & 1 and count n = (t >> 1) + 1: kind 0 is a run (one byte,
// repeated n times), kind 1 a literal (n raw bytes follow).
inline constexpr std::size_t kFrameHeaderSize = 32;
inline constexpr char kFrameMagic[4] = {'B', 'F', 'R', '1'};

struct CorruptFrame : Error {
  explicit CorruptFrame(const std::string& message) : Error("CorruptFrame", message) {}
};

struct FrameHeader {
  std::uint64_t seq = 0;
  std::int64_t capture_ts_us = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t payload_len = 0;
};

Bytes encode_frame(const Frame& f);

// `encoded` must hold exactly one frame; anything else is CorruptFrame.
Frame decode_frame(ByteView encoded);

// Header only; checks magic and that the buffer holds at least the header.
FrameHeader peek_header(ByteView encoded);

}  // namespace bora::stream
