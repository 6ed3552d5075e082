#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bora/config/dashboard.hpp"

namespace bora::config {

struct IoError : Error {
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

struct ManifestEntry {
  std::string path;  // relative to the bundle directory
  std::uint64_t size = 0;
  std::string sha256;
  bool operator==(const ManifestEntry&) const = default;
};

struct BundleManifest {
  std::vector<ManifestEntry> files;
};

inline constexpr const char* kBundleSpecFile = "dashboard.json";

/// Writes the canonical dashboard document (and a copy of the background
/// image, resolved against `asset_root` when relative) into `out_dir`.
BundleManifest export_frontend_bundle(const DashboardSpec& spec, const std::filesystem::path& out_dir,
                                      const std::filesystem::path& asset_root = {});

// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace bora::config
