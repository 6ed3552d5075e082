#include "bora/config/dashboard.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "bora/config/json.hpp"

namespace bora::config {

using nlohmann::json;

namespace {

constexpr std::string_view kKindNames[] = {"value", "timeseries", "input", "image", "video", "label"};
constexpr std::string_view kTransportNames[] = {"segmented", "push", "direct"};

std::string summarize(const std::vector<Violation>& v) {
  if (v.empty()) return "validation failed";
  std::string out = v.front().message;
  if (v.size() > 1) out += " (+" + std::to_string(v.size() - 1) + " more)";
  return out;
}

void add(std::vector<Violation>& out, ViolationCode code, const std::string& widget,
         std::string message) {
  out.push_back({code, widget, std::move(message)});
}

std::string where(const std::string& widget_id) {
  return widget_id.empty() ? std::string("dashboard") : "widget " + widget_id;
}

// Reads an integer field, recording schema violations instead of throwing.
std::optional<std::int64_t> read_int(const json& obj, const char* key, const std::string& widget,
                                     std::vector<Violation>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    add(out, ViolationCode::schema, widget, where(widget) + ": missing '" + key + "'");
    return std::nullopt;
  }
  if (!it->is_number_integer()) {
    add(out, ViolationCode::schema, widget, where(widget) + ": '" + key + "' must be an integer");
    return std::nullopt;
  }
  return it->get<std::int64_t>();
}

std::optional<std::string> read_string(const json& obj, const char* key, const std::string& widget,
                                       std::vector<Violation>& out, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required)
      add(out, ViolationCode::schema, widget, where(widget) + ": missing '" + key + "'");
    return std::nullopt;
  }
  if (!it->is_string()) {
    add(out, ViolationCode::schema, widget, where(widget) + ": '" + key + "' must be a string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& widget, std::vector<Violation>& out) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      add(out, ViolationCode::schema, widget, where(widget) + ": unknown key '" + key + "'");
  }
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  // nlohmann reports a 1-based byte offset of the offending character.
  std::size_t line = 1, column = 1;
  std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

std::string_view to_string(WidgetKind kind) { return kKindNames[static_cast<int>(kind)]; }
std::string_view to_string(Transport transport) {
  return kTransportNames[static_cast<int>(transport)];
}

std::optional<WidgetKind> widget_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i)
    if (kKindNames[i] == s) return static_cast<WidgetKind>(i);
  return std::nullopt;
}

std::optional<Transport> transport_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kTransportNames); ++i)
    if (kTransportNames[i] == s) return static_cast<Transport>(i);
  return std::nullopt;
}

const WidgetSpec* DashboardSpec::find(std::string_view widget_id) const {
  auto it = std::find_if(widgets.begin(), widgets.end(),
                         [&](const WidgetSpec& w) { return w.id == widget_id; });
  return it == widgets.end() ? nullptr : &*it;
}

std::vector<std::string> DashboardSpec::bound_sensors() const {
  std::set<std::string> ids;
  for (const auto& w : widgets)
    if (const auto* s = w.sensors()) ids.insert(s->sensor_ids.begin(), s->sensor_ids.end());
  return {ids.begin(), ids.end()};
}

ValidationError::ValidationError(std::vector<Violation> v)
    : Error("ValidationError", summarize(v)), violations(std::move(v)) {}

std::vector<Violation> validate_dashboard(const DashboardSpec& spec) {
  std::vector<Violation> out;
  if (spec.poll_interval_ms < kMinPollIntervalMs)
    add(out, ViolationCode::poll_interval_too_small, "",
        "poll_interval_ms must be >= " + std::to_string(kMinPollIntervalMs));
  if (spec.cache_capacity == 0)
    add(out, ViolationCode::zero_cache_capacity, "", "cache_capacity must be > 0");

  std::unordered_set<std::string> seen;
  for (const auto& w : spec.widgets) {
    if (w.id.empty()) add(out, ViolationCode::empty_id, "", "widget with empty id");
    else if (!seen.insert(w.id).second)
      add(out, ViolationCode::duplicate_id, w.id, "duplicate widget id: " + w.id);

    if (w.x < 0 || w.y < 0)
      add(out, ViolationCode::negative_position, w.id, "negative position on widget " + w.id);
    if (w.width <= 0) add(out, ViolationCode::nonpositive_size, w.id, "nonpositive width on widget " + w.id);
    if (w.height <= 0)
      add(out, ViolationCode::nonpositive_size, w.id, "nonpositive height on widget " + w.id);

    const bool has_sensors = w.sensors() != nullptr;
    const bool has_stream = w.stream() != nullptr;
    const bool has_binding = has_sensors || has_stream;
    std::string kind(to_string(w.kind));
    switch (w.kind) {
      case WidgetKind::value:
      case WidgetKind::input:
        if (!has_sensors)
          add(out, ViolationCode::missing_sensor_binding, w.id,
              kind + " widget " + w.id + " requires SensorBinding");
        break;
      case WidgetKind::timeseries:
        if (has_stream)
          add(out, ViolationCode::unexpected_binding, w.id,
              "timeseries widget " + w.id + " cannot take a StreamBinding");
        break;
      case WidgetKind::video:
        if (!has_stream)
          add(out, ViolationCode::missing_stream_binding, w.id,
              "video widget " + w.id + " requires StreamBinding");
        break;
      case WidgetKind::image:
      case WidgetKind::label:
        if (has_binding)
          add(out, ViolationCode::unexpected_binding, w.id,
              kind + " widget " + w.id + " cannot take a binding");
        break;
    }
    if (w.attachment && w.kind != WidgetKind::image)
      add(out, ViolationCode::attachment_not_allowed, w.id,
          "attachment on non-image widget " + w.id);

    if (const auto* s = w.sensors()) {
      if (s->sensor_ids.empty())
        add(out, ViolationCode::empty_sensor_list, w.id, "empty sensor list on widget " + w.id);
      std::unordered_set<std::string> ids;
      for (const auto& id : s->sensor_ids)
        if (!ids.insert(id).second)
          add(out, ViolationCode::duplicate_sensor, w.id,
              "duplicate sensor " + id + " on widget " + w.id);
    }
    if (const auto* st = w.stream(); st && st->stream_url.empty())
      add(out, ViolationCode::empty_stream_url, w.id, "empty stream_url on widget " + w.id);
  }
  return out;
}

json binding_to_json(const Binding& binding) {
  if (const auto* s = std::get_if<SensorBinding>(&binding)) return json{{"sensors", s->sensor_ids}};
  if (const auto* st = std::get_if<StreamBinding>(&binding))
    return json{{"stream_url", st->stream_url}, {"transport", to_string(st->transport)}};
  return nullptr;
}

json dashboard_to_json(const DashboardSpec& spec) {
  json doc = json::object();
  doc["name"] = spec.name;
  if (spec.background_image) doc["background_image"] = *spec.background_image;
  doc["poll_interval_ms"] = spec.poll_interval_ms;
  if (spec.cache_capacity != kDefaultCacheCapacity) doc["cache_capacity"] = spec.cache_capacity;
  if (spec.revision != 0) doc["revision"] = spec.revision;
  json widgets = json::array();
  for (const auto& w : spec.widgets) {
    json jw = {{"id", w.id}, {"kind", to_string(w.kind)}, {"x", w.x},
               {"y", w.y},   {"width", w.width},          {"height", w.height}};
    if (!std::holds_alternative<std::monostate>(w.binding)) jw["binding"] = binding_to_json(w.binding);
    if (w.label) jw["label"] = *w.label;
    if (w.format) jw["format"] = *w.format;
    if (w.attachment)
      jw["attachment"] = {{"media_type", w.attachment->media_type},
                          {"size", w.attachment->size},
                          {"sha256", w.attachment->sha256}};
    widgets.push_back(std::move(jw));
  }
  doc["widgets"] = std::move(widgets);
  return doc;
}

Binding binding_from_json(const json& j, const std::string& widget_id,
                          std::vector<Violation>& out) {
  if (!j.is_object()) {
    add(out, ViolationCode::schema, widget_id, where(widget_id) + ": binding must be an object");
    return {};
  }
  if (j.contains("sensors")) {
    reject_unknown_keys(j, {"sensors"}, widget_id, out);
    const json& list = j["sensors"];
    SensorBinding b;
    if (!list.is_array()) {
      add(out, ViolationCode::schema, widget_id, where(widget_id) + ": 'sensors' must be a list");
      return b;
    }
    for (const auto& id : list) {
      if (!id.is_string()) {
        add(out, ViolationCode::schema, widget_id, where(widget_id) + ": sensor ids must be strings");
        continue;
      }
      b.sensor_ids.push_back(id.get<std::string>());
    }
    return b;
  }
  if (j.contains("stream_url")) {
    reject_unknown_keys(j, {"stream_url", "transport"}, widget_id, out);
    StreamBinding b;
    if (auto url = read_string(j, "stream_url", widget_id, out, true)) b.stream_url = *url;
    if (auto t = read_string(j, "transport", widget_id, out, true)) {
      if (auto parsed = transport_from_string(*t)) b.transport = *parsed;
      else add(out, ViolationCode::schema, widget_id, where(widget_id) + ": unknown transport '" + *t + "'");
    }
    return b;
  }
  add(out, ViolationCode::schema, widget_id,
      where(widget_id) + ": binding needs 'sensors' or 'stream_url'");
  return {};
}

DashboardSpec dashboard_from_json(const json& doc, std::vector<Violation>& out) {
  DashboardSpec spec;
  if (!doc.is_object()) {
    add(out, ViolationCode::schema, "", "dashboard document must be an object");
    return spec;
  }
  reject_unknown_keys(doc,
                      {"name", "background_image", "poll_interval_ms", "cache_capacity",
                       "revision", "widgets"},
                      "", out);
  if (auto name = read_string(doc, "name", "", out, true)) spec.name = *name;
  spec.background_image = read_string(doc, "background_image", "", out, false);
  if (doc.contains("poll_interval_ms")) {
    if (auto v = read_int(doc, "poll_interval_ms", "", out)) spec.poll_interval_ms = *v;
  }
  if (doc.contains("cache_capacity")) {
    if (auto v = read_int(doc, "cache_capacity", "", out)) {
      if (*v < 0) add(out, ViolationCode::schema, "", "cache_capacity must be non-negative");
      else spec.cache_capacity = static_cast<std::size_t>(*v);
    }
  }
  if (doc.contains("revision")) {
    if (auto v = read_int(doc, "revision", "", out); v && *v >= 0)
      spec.revision = static_cast<std::uint64_t>(*v);
    else add(out, ViolationCode::schema, "", "revision must be a non-negative integer");
  }

  auto widgets = doc.find("widgets");
  if (widgets == doc.end() || !widgets->is_array()) {
    add(out, ViolationCode::schema, "", "'widgets' must be a list");
    return spec;
  }
  for (const auto& jw : *widgets) {
    WidgetSpec w;
    if (!jw.is_object()) {
      add(out, ViolationCode::schema, "", "widget entries must be objects");
      continue;
    }
    if (auto id = read_string(jw, "id", "", out, true)) w.id = *id;
    reject_unknown_keys(jw,
                        {"id", "kind", "x", "y", "width", "height", "binding", "label", "format",
                         "attachment"},
                        w.id, out);
    if (auto kind = read_string(jw, "kind", w.id, out, true)) {
      if (auto k = widget_kind_from_string(*kind)) w.kind = *k;
      else add(out, ViolationCode::schema, w.id, where(w.id) + ": unknown kind '" + *kind + "'");
    }
    if (auto v = read_int(jw, "x", w.id, out)) w.x = *v;
    if (auto v = read_int(jw, "y", w.id, out)) w.y = *v;
    if (auto v = read_int(jw, "width", w.id, out)) w.width = *v;
    if (auto v = read_int(jw, "height", w.id, out)) w.height = *v;
    if (auto b = jw.find("binding"); b != jw.end()) w.binding = binding_from_json(*b, w.id, out);
    w.label = read_string(jw, "label", w.id, out, false);
    w.format = read_string(jw, "format", w.id, out, false);
    if (auto a = jw.find("attachment"); a != jw.end()) {
      AttachmentRef ref;
      if (a->is_object()) {
        reject_unknown_keys(*a, {"media_type", "size", "sha256"}, w.id, out);
        if (auto mt = read_string(*a, "media_type", w.id, out, true)) ref.media_type = *mt;
        if (auto sz = read_int(*a, "size", w.id, out); sz && *sz >= 0)
          ref.size = static_cast<std::uint64_t>(*sz);
        if (auto h = read_string(*a, "sha256", w.id, out, true)) ref.sha256 = *h;
      } else {
        add(out, ViolationCode::schema, w.id, where(w.id) + ": attachment must be an object");
      }
      w.attachment = std::move(ref);
    }
    spec.widgets.push_back(std::move(w));
  }
  return spec;
}

DashboardSpec parse_dashboard_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, column] = line_and_column(text, e.byte);
    throw SyntaxError("malformed dashboard document at line " + std::to_string(line) +
                          ", column " + std::to_string(column) + ": " + e.what(),
                      line, column);
  }
  std::vector<Violation> violations;
  DashboardSpec spec = dashboard_from_json(doc, violations);
  if (violations.empty()) violations = validate_dashboard(spec);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return spec;
}

std::string serialize_dashboard(const DashboardSpec& spec) { return dashboard_to_json(spec).dump(); }

}  // namespace bora::config
