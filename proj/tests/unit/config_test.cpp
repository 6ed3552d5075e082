#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bora/config/bundle.hpp"
#include "bora/config/dashboard.hpp"
#include "bora/config/patch.hpp"

namespace bora::config {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFig2Doc = R"({
  "name": "fig2",
  "poll_interval_ms": 2000,
  "widgets": [
    {"id": "container_1", "kind": "timeseries", "x": 10, "y": 20, "width": 300, "height": 120,
     "binding": {"sensors": ["s.temp1", "s.temp2"]}},
    {"id": "container_2", "kind": "image", "x": 320, "y": 20, "width": 200, "height": 200},
    {"id": "container_3", "kind": "video", "x": 10, "y": 240, "width": 640, "height": 480,
     "binding": {"stream_url": "/stream/cam/playlist", "transport": "segmented"}}
  ]
})";

DashboardSpec fig2_spec() { return parse_dashboard_spec(kFig2Doc); }

TEST(ParseDashboard, MinimalLabel) {
  auto spec = parse_dashboard_spec(
      R"({"name":"m","widgets":[{"id":"l","kind":"label","x":0,"y":0,"width":1,"height":1}]})");
  ASSERT_EQ(spec.widgets.size(), 1u);
  EXPECT_EQ(spec.revision, 0u);
  EXPECT_EQ(spec.poll_interval_ms, 2000);
  EXPECT_EQ(spec.cache_capacity, 4096u);
}

TEST(ParseDashboard, Fig2SensorBinding) {
  auto spec = fig2_spec();
  EXPECT_EQ(spec.poll_interval_ms, 2000);
  const auto* w = spec.find("container_1");
  ASSERT_NE(w, nullptr);
  ASSERT_NE(w->sensors(), nullptr);
  EXPECT_EQ(w->sensors()->sensor_ids, (std::vector<std::string>{"s.temp1", "s.temp2"}));
}

TEST(ParseDashboard, DuplicateWidgetId) {
  try {
    parse_dashboard_spec(R"({"name":"d","widgets":[
      {"id":"w1","kind":"label","x":0,"y":0,"width":1,"height":1},
      {"id":"w1","kind":"label","x":5,"y":0,"width":1,"height":1}]})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "duplicate widget id: w1");
    ASSERT_EQ(e.violations.size(), 1u);
    EXPECT_EQ(e.violations[0].widget_id, "w1");
  }
}

TEST(ParseDashboard, SyntaxErrorCarriesPosition) {
  try {
    parse_dashboard_spec("{\n  \"name\": \"x\",\n  \"widgets\": [ oops ]\n}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line, 3u);
    EXPECT_GT(e.column, 1u);
  }
}

TEST(ParseDashboard, OutOfRangeNumericNamesWidget) {
  try {
    parse_dashboard_spec(
        R"({"name":"d","widgets":[{"id":"neg","kind":"label","x":-4,"y":0,"width":1,"height":1}]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations.at(0).widget_id, "neg");
    EXPECT_EQ(e.violations.at(0).code, ViolationCode::negative_position);
  }
}

TEST(ParseDashboard, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_THROW(parse_dashboard_spec(R"({"name":"d","widgets":[],"colour":1})"), ValidationError);
  EXPECT_THROW(parse_dashboard_spec(
                   R"({"name":"d","widgets":[{"id":"a","kind":"label","x":1.5,"y":0,"width":1,"height":1}]})"),
               ValidationError);
  EXPECT_THROW(parse_dashboard_spec(R"({"name":"d","poll_interval_ms":50,"widgets":[]})"), ValidationError);
}

TEST(ValidateDashboard, ValidSpecHasNoViolations) { EXPECT_TRUE(validate_dashboard(fig2_spec()).empty()); }

TEST(ValidateDashboard, ZeroWidth) {
  auto spec = fig2_spec();
  spec.widgets[0].width = 0;
  auto v = validate_dashboard(spec);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::nonpositive_size);
  EXPECT_EQ(v[0].widget_id, "container_1");
}

TEST(ValidateDashboard, ReportsEveryViolation) {
  auto spec = fig2_spec();
  spec.widgets[0].width = 0;
  spec.widgets[1].height = -1;
  spec.widgets[2].binding = std::monostate{};
  spec.poll_interval_ms = 10;
  EXPECT_EQ(validate_dashboard(spec).size(), 4u);
}

// Every (kind, binding) cell: the legal ones must validate clean, the illegal
// ones must be reported with the widget's id.
TEST(ValidateDashboard, KindBindingMatrix) {
  const std::vector<Binding> bindings = {std::monostate{}, SensorBinding{{"s1"}},
                                         StreamBinding{"/stream/x/playlist", Transport::push}};
  // legal[kind][binding]: none, sensors, stream
  const std::map<WidgetKind, std::array<bool, 3>> legal = {
      {WidgetKind::value, {false, true, false}},      {WidgetKind::timeseries, {true, true, false}},
      {WidgetKind::input, {false, true, false}},      {WidgetKind::image, {true, false, false}},
      {WidgetKind::video, {false, false, true}},      {WidgetKind::label, {true, false, false}},
  };
  int illegal_cells = 0;
  for (const auto& [kind, row] : legal) {
    for (std::size_t b = 0; b < bindings.size(); ++b) {
      DashboardSpec spec;
      spec.name = "matrix";
      WidgetSpec w;
      w.id = "cell";
      w.kind = kind;
      w.width = w.height = 10;
      w.binding = bindings[b];
      spec.widgets.push_back(w);
      auto v = validate_dashboard(spec);
      if (row[b]) {
        EXPECT_TRUE(v.empty()) << to_string(kind) << " x binding " << b;
      } else {
        ++illegal_cells;
        ASSERT_EQ(v.size(), 1u) << to_string(kind) << " x binding " << b;
        EXPECT_EQ(v[0].widget_id, "cell");
      }
    }
  }
  EXPECT_EQ(illegal_cells, 11);
}

TEST(ValidateDashboard, InputWithoutBinding) {
  DashboardSpec spec;
  WidgetSpec w;
  w.id = "in";
  w.kind = WidgetKind::input;
  w.width = w.height = 5;
  spec.widgets.push_back(w);
  auto v = validate_dashboard(spec);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::missing_sensor_binding);
}

// Random specs: serialize/parse is the identity, and whatever parse accepts
// validates clean.
TEST(SerializeDashboard, RoundTripProperty) {
  std::mt19937_64 rng(7);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  for (int iter = 0; iter < 300; ++iter) {
    DashboardSpec spec;
    spec.name = "spec" + std::to_string(iter);
    spec.poll_interval_ms = 100 + pick(10000);
    if (pick(2)) spec.background_image = "bg" + std::to_string(pick(5)) + ".png";
    if (pick(3) == 0) spec.cache_capacity = 1 + pick(9000);
    spec.revision = static_cast<std::uint64_t>(pick(4));
    int n = pick(6);
    for (int i = 0; i < n; ++i) {
      WidgetSpec w;
      w.id = "w" + std::to_string(i);
      w.x = pick(2000);
      w.y = pick(2000);
      w.width = 1 + pick(500);
      w.height = 1 + pick(500);
      switch (pick(4)) {
        case 0: w.kind = WidgetKind::label; w.label = "hello \"x\""; break;
        case 1:
          w.kind = WidgetKind::value;
          w.binding = SensorBinding{{"a" + std::to_string(i), "b"}};
          w.format = "%.2f K";
          break;
        case 2:
          w.kind = WidgetKind::video;
          w.binding = StreamBinding{"/stream/c/playlist", static_cast<Transport>(pick(3))};
          break;
        default:
          w.kind = WidgetKind::image;
          if (pick(2)) w.attachment = AttachmentRef{"image/png", 12, std::string(64, 'a')};
      }
      spec.widgets.push_back(w);
    }
    ASSERT_TRUE(validate_dashboard(spec).empty());
    std::string text = serialize_dashboard(spec);
    DashboardSpec back = parse_dashboard_spec(text);
    ASSERT_EQ(back, spec) << text;
    EXPECT_EQ(serialize_dashboard(back), text);
  }
}

TEST(SerializeDashboard, CanonicalForm) {
  auto text = serialize_dashboard(fig2_spec());
  EXPECT_EQ(text.find(' '), std::string::npos);
  EXPECT_EQ(text.find('\n'), std::string::npos);
  EXPECT_LT(text.find("\"name\""), text.find("\"poll_interval_ms\""));
  EXPECT_LT(text.find("\"poll_interval_ms\""), text.find("\"widgets\""));
}

TEST(ApplySettingsPatch, SetPollInterval) {
  auto spec = fig2_spec();
  spec.poll_interval_ms = 5000;
  auto next = apply_settings_patch(spec, ControlPatch::set_poll_interval(2000));
  EXPECT_EQ(next.poll_interval_ms, 2000);
  EXPECT_EQ(next.revision, spec.revision + 1);
  EXPECT_EQ(spec.poll_interval_ms, 5000);
}

TEST(ApplySettingsPatch, BindThenAttachVideo) {
  auto spec = fig2_spec();
  auto a = apply_settings_patch(spec, ControlPatch::bind_sensors("container_1", {"s.p1", "s.p2", "s.p3"}));
  auto b = apply_settings_patch(
      a, ControlPatch::attach_video("container_3", {"/ws/stream/cam", Transport::push}));
  EXPECT_EQ(b.revision, spec.revision + 2);
  EXPECT_EQ(b.find("container_1")->sensors()->sensor_ids.size(), 3u);
  EXPECT_EQ(b.find("container_3")->stream()->stream_url, "/ws/stream/cam");
  EXPECT_EQ(b.find("container_3")->stream()->transport, Transport::push);
}

TEST(ApplySettingsPatch, UnknownWidgetLeavesSpecUnchanged) {
  const auto spec = fig2_spec();
  const auto copy = spec;
  EXPECT_THROW(apply_settings_patch(spec, ControlPatch::bind_sensors("nope", {"s"})), UnknownWidget);
  EXPECT_EQ(spec, copy);
}

TEST(ApplySettingsPatch, IllegalCombinations) {
  auto spec = fig2_spec();
  EXPECT_THROW(apply_settings_patch(spec, ControlPatch::bind_sensors("container_3", {"s"})), IllegalPatch);
  EXPECT_THROW(apply_settings_patch(spec, ControlPatch::attach_image("container_1", "image/png", {1})),
               IllegalPatch);
  EXPECT_THROW(apply_settings_patch(spec, ControlPatch::attach_image("container_2", "image/png", {})),
               IllegalPatch);
  EXPECT_THROW(apply_settings_patch(spec, ControlPatch::set_device_param("cam.exposure", 1.0)),
               IllegalPatch);
  EXPECT_THROW(apply_settings_patch(spec, ControlPatch::set_poll_interval(99)), ValidationError);
}

TEST(ApplySettingsPatch, AttachImageRecordsReference) {
  auto next = apply_settings_patch(fig2_spec(), ControlPatch::attach_image("container_2", "image/png", {1, 2, 3}));
  const auto& ref = *next.find("container_2")->attachment;
  EXPECT_EQ(ref.size, 3u);
  EXPECT_EQ(ref.sha256, "039058c6f2c0cb492c533b0a4d14ef77cc0f78abccced5287d84a1a2011cfb81");
}

TEST(ControlPatchWire, RoundTripsEveryOp) {
  std::vector<ControlPatch> patches = {
      ControlPatch::set_poll_interval(2000),
      ControlPatch::bind_sensors("container_1", {"a", "b"}),
      ControlPatch::attach_image("container_2", "image/png", {0, 255, 7, 9}),
      ControlPatch::attach_video("container_3", {"/stream/cam/playlist", Transport::segmented}),
      ControlPatch::set_device_param("cam.exposure", 42.5),
      ControlPatch::mark_recording("cam", 1000, 2000),
      ControlPatch::move_widget("container_1", {300, 50, 10, std::nullopt}),
  };
  for (const auto& p : patches) EXPECT_EQ(parse_control_patch(serialize_control_patch(p)), p);
}

TEST(ControlPatchWire, PayloadMustMatchOp) {
  EXPECT_THROW(parse_control_patch(R"({"op":"set_poll_interval","payload":"fast"})"), IllegalPatch);
  EXPECT_THROW(parse_control_patch(R"({"op":"bind_sensors","target":"w","payload":[1]})"), IllegalPatch);
  EXPECT_THROW(parse_control_patch(R"({"op":"teleport","payload":1})"), IllegalPatch);
  EXPECT_THROW(parse_control_patch(R"({"op":"attach_image","target":"w","payload":{"media_type":"image/png","data":""}})"),
               IllegalPatch);
}

class BundleTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bora_bundle_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "assets");
    write_file(dir_ / "assets" / "bg.png", std::string("\x89PNG fake", 9));
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(BundleTest, WithBackground) {
  auto spec = fig2_spec();
  spec.background_image = "bg.png";
  auto m = export_frontend_bundle(spec, dir_ / "out", dir_ / "assets");
  ASSERT_EQ(m.files.size(), 2u);
  EXPECT_EQ(m.files[1].path, "bg.png");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "bg.png"));
  EXPECT_EQ(parse_dashboard_spec(read_file(dir_ / "out" / kBundleSpecFile)), spec);
}

TEST_F(BundleTest, WithoutBackground) {
  EXPECT_EQ(export_frontend_bundle(fig2_spec(), dir_ / "out").files.size(), 1u);
}

TEST_F(BundleTest, ReexportIsDeterministic) {
  auto spec = fig2_spec();
  spec.background_image = "bg.png";
  auto a = export_frontend_bundle(spec, dir_ / "a", dir_ / "assets");
  auto b = export_frontend_bundle(spec, dir_ / "b", dir_ / "assets");
  EXPECT_EQ(a.files, b.files);
}

TEST_F(BundleTest, MissingBackgroundIsIoError) {
  auto spec = fig2_spec();
  spec.background_image = "missing.png";
  EXPECT_THROW(export_frontend_bundle(spec, dir_ / "out", dir_ / "assets"), IoError);
}

}  // namespace
}  // namespace bora::config
