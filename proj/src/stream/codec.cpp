#include "bora/stream/codec.hpp"

#include <cstring>
#include <limits>
#include <string>

namespace bora::stream {

namespace {

void put_varint(Bytes& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(ByteView in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) throw CorruptFrame("payload ends inside a token");
    std::uint8_t b = in[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
  }
  throw CorruptFrame("oversized token");
}

constexpr std::size_t kMinRun = 3;

void flush_literal(Bytes& out, const std::uint8_t* from, std::size_t n) {
  if (n == 0) return;
  put_varint(out, ((n - 1) << 1) | 1);
  out.insert(out.end(), from, from + n);
}

}  // namespace

Bytes encode_frame(const Frame& f) {
  if (f.pixels.size() != static_cast<std::size_t>(f.width) * f.height)
    throw PreconditionError("frame pixel buffer does not match width*height");

  Bytes out;
  out.reserve(kFrameHeaderSize + f.pixels.size() / 16 + 16);
  out.resize(kFrameHeaderSize);

  const std::uint8_t* px = f.pixels.data();
  const std::size_t n = f.pixels.size();
  std::size_t lit_start = 0, i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && px[j] == px[i]) ++j;
    std::size_t run = j - i;
    if (run >= kMinRun) {
      flush_literal(out, px + lit_start, i - lit_start);
      put_varint(out, (run - 1) << 1);
      out.push_back(px[i]);
      lit_start = j;
    }
    i = j;
  }
  flush_literal(out, px + lit_start, n - lit_start);

  std::size_t payload = out.size() - kFrameHeaderSize;
  if (payload > std::numeric_limits<std::uint32_t>::max()) throw PreconditionError("frame too large to encode");
  Bytes header;
  header.reserve(kFrameHeaderSize);
  util::BigEndianWriter w(header);
  w.raw(std::string_view(kFrameMagic, 4));
  w.u64(f.seq);
  w.u64(static_cast<std::uint64_t>(f.capture_ts_us));
  w.u32(f.width);
  w.u32(f.height);
  w.u32(static_cast<std::uint32_t>(payload));
  std::memcpy(out.data(), header.data(), kFrameHeaderSize);
  return out;
}

FrameHeader peek_header(ByteView encoded) {
  if (encoded.size() < kFrameHeaderSize)
    throw CorruptFrame("frame shorter than its header (" + std::to_string(encoded.size()) + " bytes)");
  if (std::memcmp(encoded.data(), kFrameMagic, 4) != 0) throw CorruptFrame("bad magic");
  util::BigEndianReader r(encoded.subspan(4));
  FrameHeader h;
  h.seq = r.u64();
  h.capture_ts_us = static_cast<std::int64_t>(r.u64());
  h.width = r.u32();
  h.height = r.u32();
  h.payload_len = r.u32();
  return h;
}

Frame decode_frame(ByteView encoded) {
  FrameHeader h = peek_header(encoded);
  if (encoded.size() - kFrameHeaderSize != h.payload_len) {
    throw CorruptFrame("payload_len " + std::to_string(h.payload_len) + " but " +
                       std::to_string(encoded.size() - kFrameHeaderSize) + " payload bytes present");
  }
  if (h.width == 0 || h.height == 0) throw CorruptFrame("zero frame dimension");
  const std::uint64_t total = static_cast<std::uint64_t>(h.width) * h.height;
  // Reject absurd dimensions before reserving the pixel buffer.
  if (total > (std::uint64_t{1} << 32)) throw CorruptFrame("frame dimensions out of range");

  Frame f;
  f.seq = h.seq;
  f.capture_ts_us = h.capture_ts_us;
  f.width = h.width;
  f.height = h.height;
  f.pixels.reserve(static_cast<std::size_t>(total));

  ByteView payload = encoded.subspan(kFrameHeaderSize);
  std::size_t pos = 0;
  while (pos < payload.size()) {
    std::uint64_t token = get_varint(payload, pos);
    std::uint64_t count = (token >> 1) + 1;
    if (count > total - f.pixels.size()) throw CorruptFrame("token overruns the pixel buffer");
    if (token & 1) {
      if (count > payload.size() - pos) throw CorruptFrame("literal runs past the payload");
      f.pixels.insert(f.pixels.end(), payload.begin() + pos, payload.begin() + pos + count);
      pos += count;
    } else {
      if (pos >= payload.size()) throw CorruptFrame("run without a value byte");
      f.pixels.insert(f.pixels.end(), static_cast<std::size_t>(count), payload[pos++]);
    }
  }
  if (f.pixels.size() != total) {
    throw CorruptFrame("decoded " + std::to_string(f.pixels.size()) + " pixels, header says " +
                       std::to_string(total));
  }
  return f;
}

}  // namespace bora::stream
