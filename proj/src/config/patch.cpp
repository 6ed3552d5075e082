#include "bora/config/patch.hpp"

#include <cmath>

#include "bora/config/json.hpp"
#include "bora/util/digest.hpp"

namespace bora::config {

using nlohmann::json;

namespace {

constexpr std::string_view kOpNames[] = {"set_poll_interval", "bind_sensors",     "attach_image",
                                         "attach_video",      "set_device_param", "mark_recording",
                                         "move_widget"};

template <class T>
const T& payload_as(const ControlPatch& patch) {
  const T* p = std::get_if<T>(&patch.payload);
  if (!p) throw IllegalPatch("payload does not match op " + std::string(to_string(patch.op)));
  return *p;
}

WidgetSpec& widget_or_throw(DashboardSpec& spec, const std::string& id) {
  for (auto& w : spec.widgets)
    if (w.id == id) return w;
  throw UnknownWidget(id);
}

std::int64_t int_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer())
    throw IllegalPatch(std::string("payload.") + key + " must be an integer");
  return it->get<std::int64_t>();
}

}  // namespace

std::string_view to_string(PatchOp op) { return kOpNames[static_cast<int>(op)]; }

std::optional<PatchOp> patch_op_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kOpNames); ++i)
    if (kOpNames[i] == s) return static_cast<PatchOp>(i);
  return std::nullopt;
}

ControlPatch ControlPatch::set_poll_interval(std::int64_t ms) {
  return {PatchOp::set_poll_interval, "", ms};
}
ControlPatch ControlPatch::bind_sensors(std::string widget, std::vector<std::string> sensors) {
  return {PatchOp::bind_sensors, std::move(widget), std::move(sensors)};
}
ControlPatch ControlPatch::attach_image(std::string widget, std::string media_type, util::Bytes data) {
  return {PatchOp::attach_image, std::move(widget), ImagePayload{std::move(media_type), std::move(data)}};
}
ControlPatch ControlPatch::attach_video(std::string widget, StreamBinding binding) {
  return {PatchOp::attach_video, std::move(widget), std::move(binding)};
}
ControlPatch ControlPatch::set_device_param(std::string param, double value) {
  return {PatchOp::set_device_param, std::move(param), value};
}
ControlPatch ControlPatch::mark_recording(std::string stream, std::int64_t from_ts, std::int64_t to_ts) {
  return {PatchOp::mark_recording, std::move(stream), RecordingRange{from_ts, to_ts}};
}
ControlPatch ControlPatch::move_widget(std::string widget, Geometry geometry) {
  return {PatchOp::move_widget, std::move(widget), geometry};
}

bool ControlPatch::affects_spec() const {
  return op != PatchOp::set_device_param && op != PatchOp::mark_recording;
}

void check_payload(const ControlPatch& patch) {
  switch (patch.op) {
    case PatchOp::set_poll_interval: payload_as<std::int64_t>(patch); return;
    case PatchOp::bind_sensors: {
      const auto& ids = payload_as<std::vector<std::string>>(patch);
      if (ids.empty()) throw IllegalPatch("bind_sensors needs at least one sensor");
      break;
    }
    case PatchOp::attach_image: {
      const auto& img = payload_as<ImagePayload>(patch);
      if (img.data.empty()) throw IllegalPatch("attach_image with empty payload");
      if (img.data.size() > kMaxAttachmentBytes) throw IllegalPatch("attachment exceeds 8 MiB");
      if (img.media_type.rfind("image/", 0) != 0)
        throw IllegalPatch("attachment media type must be image/*, got '" + img.media_type + "'");
      break;
    }
    case PatchOp::attach_video:
      if (payload_as<StreamBinding>(patch).stream_url.empty())
        throw IllegalPatch("attach_video with empty stream_url");
      break;
    case PatchOp::set_device_param:
      if (!std::isfinite(payload_as<double>(patch))) throw IllegalPatch("device value must be finite");
      break;
    case PatchOp::mark_recording: payload_as<RecordingRange>(patch); break;
    case PatchOp::move_widget: payload_as<Geometry>(patch); break;
  }
  if (patch.target.empty()) throw IllegalPatch(std::string(to_string(patch.op)) + " needs a target");
}

ControlPatch parse_control_patch(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw IllegalPatch(std::string("malformed patch: ") + e.what());
  }
  if (!doc.is_object()) throw IllegalPatch("patch must be an object");
  auto op_it = doc.find("op");
  if (op_it == doc.end() || !op_it->is_string()) throw IllegalPatch("patch needs a string 'op'");
  auto op = patch_op_from_string(op_it->get<std::string>());
  if (!op) throw IllegalPatch("unknown op '" + op_it->get<std::string>() + "'");

  ControlPatch patch;
  patch.op = *op;
  if (auto t = doc.find("target"); t != doc.end()) {
    if (!t->is_string()) throw IllegalPatch("'target' must be a string");
    patch.target = t->get<std::string>();
  }
  auto p = doc.find("payload");
  if (p == doc.end()) throw IllegalPatch("patch needs a 'payload'");
  const json& payload = *p;

  switch (patch.op) {
    case PatchOp::set_poll_interval:
      if (!payload.is_number_integer()) throw IllegalPatch("interval must be integer milliseconds");
      patch.payload = payload.get<std::int64_t>();
      break;
    case PatchOp::bind_sensors: {
      if (!payload.is_array()) throw IllegalPatch("bind_sensors payload must be a list of ids");
      std::vector<std::string> ids;
      for (const auto& id : payload) {
        if (!id.is_string()) throw IllegalPatch("sensor ids must be strings");
        ids.push_back(id.get<std::string>());
      }
      patch.payload = std::move(ids);
      break;
    }
    case PatchOp::attach_image: {
      if (!payload.is_object() || !payload.contains("media_type") || !payload.contains("data") ||
          !payload["media_type"].is_string() || !payload["data"].is_string())
        throw IllegalPatch("attach_image payload needs media_type and base64 data");
      auto bytes = util::base64_decode(payload["data"].get<std::string>());
      if (!bytes) throw IllegalPatch("attach_image data is not valid base64");
      patch.payload = ImagePayload{payload["media_type"].get<std::string>(), std::move(*bytes)};
      break;
    }
    case PatchOp::attach_video: {
      std::vector<Violation> v;
      Binding b = binding_from_json(payload, patch.target, v);
      if (!v.empty() || !std::holds_alternative<StreamBinding>(b))
        throw IllegalPatch(v.empty() ? "attach_video payload needs stream_url" : v.front().message);
      patch.payload = std::get<StreamBinding>(b);
      break;
    }
    case PatchOp::set_device_param:
      if (!payload.is_number()) throw IllegalPatch("device value must be a number");
      patch.payload = payload.get<double>();
      break;
    case PatchOp::mark_recording:
      if (!payload.is_object()) throw IllegalPatch("mark_recording payload must be an object");
      patch.payload = RecordingRange{int_field(payload, "from_ts"), int_field(payload, "to_ts")};
      break;
    case PatchOp::move_widget: {
      if (!payload.is_object()) throw IllegalPatch("move_widget payload must be an object");
      Geometry g{int_field(payload, "x"), int_field(payload, "y"), std::nullopt, std::nullopt};
      if (payload.contains("width")) g.width = int_field(payload, "width");
      if (payload.contains("height")) g.height = int_field(payload, "height");
      patch.payload = g;
      break;
    }
  }
  check_payload(patch);
  return patch;
}

std::string serialize_control_patch(const ControlPatch& patch) {
  json doc = {{"op", to_string(patch.op)}, {"target", patch.target}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ImagePayload>) {
          doc["payload"] = {{"media_type", v.media_type}, {"data", util::base64_encode(v.data)}};
        } else if constexpr (std::is_same_v<T, StreamBinding>) {
          doc["payload"] = binding_to_json(v);
        } else if constexpr (std::is_same_v<T, RecordingRange>) {
          doc["payload"] = {{"from_ts", v.from_ts}, {"to_ts", v.to_ts}};
        } else if constexpr (std::is_same_v<T, Geometry>) {
          json g = {{"x", v.x}, {"y", v.y}};
          if (v.width) g["width"] = *v.width;
          if (v.height) g["height"] = *v.height;
          doc["payload"] = std::move(g);
        } else {
          doc["payload"] = v;
        }
      },
      patch.payload);
  return doc.dump();
}

DashboardSpec apply_settings_patch(const DashboardSpec& spec, const ControlPatch& patch) {
  if (!patch.affects_spec())
    throw IllegalPatch(std::string(to_string(patch.op)) + " does not modify dashboard settings");

  DashboardSpec next = spec;
  switch (patch.op) {
    case PatchOp::set_poll_interval:
      next.poll_interval_ms = payload_as<std::int64_t>(patch);
      break;
    case PatchOp::bind_sensors: {
      WidgetSpec& w = widget_or_throw(next, patch.target);
      if (w.kind != WidgetKind::value && w.kind != WidgetKind::timeseries && w.kind != WidgetKind::input)
        throw IllegalPatch("cannot bind sensors to " + std::string(to_string(w.kind)) + " widget " + w.id);
      check_payload(patch);
      w.binding = SensorBinding{payload_as<std::vector<std::string>>(patch)};
      break;
    }
    case PatchOp::attach_image: {
      WidgetSpec& w = widget_or_throw(next, patch.target);
      if (w.kind != WidgetKind::image)
        throw IllegalPatch("cannot attach an image to " + std::string(to_string(w.kind)) + " widget " + w.id);
      check_payload(patch);
      const auto& img = payload_as<ImagePayload>(patch);
      w.attachment = AttachmentRef{img.media_type, img.data.size(), util::sha256_hex(img.data)};
      break;
    }
    case PatchOp::attach_video: {
      WidgetSpec& w = widget_or_throw(next, patch.target);
      if (w.kind != WidgetKind::video)
        throw IllegalPatch("cannot attach a video to " + std::string(to_string(w.kind)) + " widget " + w.id);
      check_payload(patch);
      w.binding = payload_as<StreamBinding>(patch);
      break;
    }
    case PatchOp::move_widget: {
      WidgetSpec& w = widget_or_throw(next, patch.target);
      const auto& g = payload_as<Geometry>(patch);
      w.x = g.x;
      w.y = g.y;
      if (g.width) w.width = *g.width;
      if (g.height) w.height = *g.height;
      break;
    }
    case PatchOp::set_device_param:
    case PatchOp::mark_recording:
      break;  // rejected above
  }
  if (auto violations = validate_dashboard(next); !violations.empty())
    throw ValidationError(std::move(violations));
  ++next.revision;
  return next;
}

}  // namespace bora::config
