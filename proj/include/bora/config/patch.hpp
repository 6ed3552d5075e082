#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bora/config/dashboard.hpp"
#include "bora/util/bytes.hpp"

namespace bora::config {

inline constexpr std::size_t kMaxAttachmentBytes = 8u << 20;

enum class PatchOp {
  set_poll_interval,
  bind_sensors,
  attach_image,
  attach_video,
  set_device_param,
  mark_recording,
  move_widget,
};

std::string_view to_string(PatchOp op);
std::optional<PatchOp> patch_op_from_string(std::string_view s);

struct ImagePayload {
  std::string media_type;
  util::Bytes data;
  bool operator==(const ImagePayload&) const = default;
};

struct RecordingRange {
  std::int64_t from_ts = 0;  // UTC ms
  std::int64_t to_ts = 0;
  bool operator==(const RecordingRange&) const = default;
};

struct Geometry {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::optional<std::int64_t> width;
  std::optional<std::int64_t> height;
  bool operator==(const Geometry&) const = default;
};

using PatchPayload = std::variant<std::int64_t,               // set_poll_interval
                                  std::vector<std::string>,   // bind_sensors
                                  ImagePayload,               // attach_image
                                  StreamBinding,              // attach_video
                                  double,                     // set_device_param
                                  RecordingRange,             // mark_recording
                                  Geometry>;                  // move_widget

struct IllegalPatch : Error {
  explicit IllegalPatch(const std::string& message) : Error("IllegalPatch", message) {}
};

struct UnknownWidget : Error {
  explicit UnknownWidget(const std::string& id) : Error("UnknownWidget", "unknown widget: " + id), id(id) {}
  std::string id;
};

/// A single runtime mutation. `target` is a widget id for widget ops, a
/// device parameter id for set_device_param, a stream id for
/// mark_recording, and unused for set_poll_interval.
struct ControlPatch {
  PatchOp op = PatchOp::set_poll_interval;
  std::string target;
  PatchPayload payload;

  static ControlPatch set_poll_interval(std::int64_t ms);
  static ControlPatch bind_sensors(std::string widget, std::vector<std::string> sensors);
  static ControlPatch attach_image(std::string widget, std::string media_type, util::Bytes data);
  static ControlPatch attach_video(std::string widget, StreamBinding binding);
  static ControlPatch set_device_param(std::string param, double value);
  static ControlPatch mark_recording(std::string stream, std::int64_t from_ts, std::int64_t to_ts);
  static ControlPatch move_widget(std::string widget, Geometry geometry);

  // True for ops handled by apply_settings_patch.
  bool affects_spec() const;

  bool operator==(const ControlPatch&) const = default;
};

// Throws IllegalPatch when the payload does not match the op.
void check_payload(const ControlPatch& patch);

/// Wire form: {"op":..., "target":..., "payload":...}. Image bytes travel as
/// base64 under payload.data.
ControlPatch parse_control_patch(std::string_view text);
std::string serialize_control_patch(const ControlPatch& patch);

/// Returns a copy of `spec` with the patch applied and revision + 1.
/// Throws UnknownWidget, IllegalPatch, or ValidationError; `spec` is never
/// modified.
DashboardSpec apply_settings_patch(const DashboardSpec& spec, const ControlPatch& patch);

}  // namespace bora::config
