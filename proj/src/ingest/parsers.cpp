#include "bora/ingest/parsers.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace bora::ingest {

namespace {

constexpr std::string_view kPushMagic = "PUSH1";

template <class T>
bool parse_number(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<SensorSample> parse_csv_samples(std::string_view text) {
  std::vector<SensorSample> out;
  std::size_t row = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto c1 = line.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw FormatError("row " + std::to_string(row) + ": expected 3 fields", row);

    SensorSample s;
    s.sensor_id = std::string(line.substr(0, c1));
    if (!parse_number(line.substr(c1 + 1, c2 - c1 - 1), s.timestamp))
      throw FormatError("row " + std::to_string(row) + ": bad timestamp", row);
    if (!parse_number(line.substr(c2 + 1), s.value))
      throw FormatError("row " + std::to_string(row) + ": bad value", row);
    if (!is_valid(s)) throw FormatError("row " + std::to_string(row) + ": invalid sample", row);
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_csv_samples(const std::vector<SensorSample>& samples) {
  std::string out;
  std::array<char, 64> buf{};
  for (const auto& s : samples) {
    out += s.sensor_id;
    out += ',';
    out += std::to_string(s.timestamp);
    out += ',';
    // Shortest representation that parses back to the same double.
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), s.value);
    out.append(buf.data(), ptr);
    out += '\n';
  }
  return out;
}

std::vector<SensorSample> decode_push_message(util::ByteView raw) {
  std::vector<SensorSample> out;
  try {
    util::BigEndianReader in(raw);
    if (util::as_chars(in.take(kPushMagic.size())) != kPushMagic) throw FormatError("bad push magic");
    const std::uint16_t count = in.u16();
    out.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
      SensorSample s;
      const std::uint8_t id_len = in.u8();
      s.sensor_id = std::string(util::as_chars(in.take(id_len)));
      const std::uint64_t ts = in.u64();
      if (ts > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw FormatError("push record " + std::to_string(i) + ": timestamp out of range");
      s.timestamp = static_cast<std::int64_t>(ts);
      s.value = in.f64();
      if (!is_valid(s)) throw FormatError("push record " + std::to_string(i) + ": invalid sample");
      out.push_back(std::move(s));
    }
    if (in.remaining() != 0) throw FormatError("trailing bytes after push message");
  } catch (const util::ShortRead&) {
    throw FormatError("truncated push message");
  }
  return out;
}

util::Bytes encode_push_message(const std::vector<SensorSample>& samples) {
  if (samples.size() > std::numeric_limits<std::uint16_t>::max())
    throw PreconditionError("too many samples for one push message");
  util::Bytes out;
  util::BigEndianWriter w(out);
  w.raw(kPushMagic);
  w.u16(static_cast<std::uint16_t>(samples.size()));
  for (const auto& s : samples) {
    if (s.sensor_id.size() > 255) throw PreconditionError("sensor id longer than 255 bytes");
    w.u8(static_cast<std::uint8_t>(s.sensor_id.size()));
    w.raw(s.sensor_id);
    w.u64(static_cast<std::uint64_t>(s.timestamp));
    w.f64(s.value);
  }
  return out;
}

std::vector<SensorSample> CsvParser::parse(util::ByteView payload, const SourceConfig&) const {
  return parse_csv_samples(util::as_chars(payload));
}

std::vector<SensorSample> PushParser::parse(util::ByteView payload, const SourceConfig&) const {
  return decode_push_message(payload);
}

std::vector<SensorSample> ingest_push_message(util::ByteView raw, const SourceConfig& channel_cfg) {
  auto samples = PushParser{}.parse(raw, channel_cfg);
  sort_samples(samples);
  return samples;
}

}  // namespace bora::ingest
