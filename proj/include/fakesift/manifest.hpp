#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "fakesift/types.hpp"

namespace fakesift {

/// One dataset entry. Paths are stored relative to the manifest file.
struct ManifestEntry {
  Label label = Label::real;
  std::string video;      // optional
  std::string landmarks;  // optional
  long fps_num = 30;
  long fps_den = 1;
};

/// JSON on disk: {"<video_id>": {"label":"REAL"|"FAKE", "video":..., "landmarks":..., ...}}.
/// Only "label" is required.
struct DatasetManifest {
  std::map<std::string, ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
};

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace fakesift
