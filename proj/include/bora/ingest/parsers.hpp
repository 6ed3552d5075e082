#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bora/ingest/sample.hpp"
#include "bora/util/bytes.hpp"

namespace bora::ingest {

/// Turns one upstream payload into normalized samples. Implementations must
/// be stateless or internally synchronized; every returned sample satisfies
/// is_valid().
class ProtocolParser {
 public:
  virtual ~ProtocolParser() = default;
  virtual std::vector<SensorSample> parse(util::ByteView payload, const SourceConfig& cfg) const = 0;
};

// `sensor_id,timestamp_ms,value\n` rows, no header. Blank lines are skipped;
// row numbers count every line.
std::vector<SensorSample> parse_csv_samples(std::string_view text);
std::string format_csv_samples(const std::vector<SensorSample>& samples);

// PUSH1 magic, u16 count, then (u8 id length, id, u64 ts, f64 value), all
// big-endian.
std::vector<SensorSample> decode_push_message(util::ByteView raw);
util::Bytes encode_push_message(const std::vector<SensorSample>& samples);

class CsvParser final : public ProtocolParser {
 public:
  std::vector<SensorSample> parse(util::ByteView payload, const SourceConfig& cfg) const override;
};

class PushParser final : public ProtocolParser {
 public:
  std::vector<SensorSample> parse(util::ByteView payload, const SourceConfig& cfg) const override;
};

std::vector<SensorSample> ingest_push_message(util::ByteView raw, const SourceConfig& channel_cfg);

}  // namespace bora::ingest
