#include "bora/config/bundle.hpp"

#include <fstream>
#include <sstream>

#include "bora/util/digest.hpp"

namespace bora::config {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

BundleManifest export_frontend_bundle(const DashboardSpec& spec, const fs::path& out_dir,
                                      const fs::path& asset_root) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  BundleManifest manifest;
  auto emit = [&](const std::string& name, const std::string& contents) {
    write_file(out_dir / name, contents);
    manifest.files.push_back({name, contents.size(), util::sha256_hex(contents)});
  };

  emit(kBundleSpecFile, serialize_dashboard(spec));
  if (spec.background_image) {
    fs::path source(*spec.background_image);
    if (source.is_relative() && !asset_root.empty()) source = asset_root / source;
    emit(source.filename().string(), read_file(source));
  }
  return manifest;
}

}  // namespace bora::config
