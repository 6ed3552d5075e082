#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bora/util/error.hpp"

namespace bora::config {

enum class WidgetKind { value, timeseries, input, image, video, label };
enum class Transport { segmented, push, direct };

std::string_view to_string(WidgetKind kind);
std::string_view to_string(Transport transport);
std::optional<WidgetKind> widget_kind_from_string(std::string_view s);
std::optional<Transport> transport_from_string(std::string_view s);

struct SensorBinding {
  std::vector<std::string> sensor_ids;
  bool operator==(const SensorBinding&) const = default;
};

struct StreamBinding {
  std::string stream_url;
  Transport transport = Transport::direct;
  bool operator==(const StreamBinding&) const = default;
};

using Binding = std::variant<std::monostate, SensorBinding, StreamBinding>;

// Reference to an image attached at runtime; the bytes live in the control
// service, the spec only records what is attached so displays can refetch.
struct AttachmentRef {
  std::string media_type;
  std::uint64_t size = 0;
  std::string sha256;
  bool operator==(const AttachmentRef&) const = default;
};

struct WidgetSpec {
  std::string id;
  WidgetKind kind = WidgetKind::label;
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t width = 1;
  std::int64_t height = 1;
  Binding binding;
  std::optional<std::string> label;
  std::optional<std::string> format;
  std::optional<AttachmentRef> attachment;

  const SensorBinding* sensors() const { return std::get_if<SensorBinding>(&binding); }
  const StreamBinding* stream() const { return std::get_if<StreamBinding>(&binding); }

  bool operator==(const WidgetSpec&) const = default;
};

inline constexpr std::int64_t kDefaultPollIntervalMs = 2000;
inline constexpr std::int64_t kMinPollIntervalMs = 100;
inline constexpr std::size_t kDefaultCacheCapacity = 4096;

struct DashboardSpec {
  std::string name;
  std::optional<std::string> background_image;
  std::int64_t poll_interval_ms = kDefaultPollIntervalMs;
  std::size_t cache_capacity = kDefaultCacheCapacity;
  std::vector<WidgetSpec> widgets;
  std::uint64_t revision = 0;

  const WidgetSpec* find(std::string_view widget_id) const;
  // Sorted, de-duplicated union of every bound sensor id.
  std::vector<std::string> bound_sensors() const;

  bool operator==(const DashboardSpec&) const = default;
};

enum class ViolationCode {
  empty_id,
  duplicate_id,
  negative_position,
  nonpositive_size,
  missing_sensor_binding,
  missing_stream_binding,
  unexpected_binding,
  empty_sensor_list,
  duplicate_sensor,
  empty_stream_url,
  attachment_not_allowed,
  poll_interval_too_small,
  zero_cache_capacity,
  schema,  // wrong type, missing or unknown key
};

struct Violation {
  ViolationCode code;
  std::string widget_id;  // empty for dashboard-level violations
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct SyntaxError : Error {
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error("SyntaxError", message), line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

struct ValidationError : Error {
  explicit ValidationError(std::vector<Violation> v);
  std::vector<Violation> violations;
};

// Reports every invariant violation, in widget order.
std::vector<Violation> validate_dashboard(const DashboardSpec& spec);

// Parses the JSON dashboard document. An absent "revision" key means 0.
DashboardSpec parse_dashboard_spec(std::string_view text);

// Canonical form: sorted keys, no insignificant whitespace, absent optionals
// omitted. parse_dashboard_spec(serialize_dashboard(s)) == s.
std::string serialize_dashboard(const DashboardSpec& spec);

}  // namespace bora::config
