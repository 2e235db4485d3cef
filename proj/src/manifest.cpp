#include "fakesift/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "fakesift/error.hpp"

namespace fakesift {

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, entry] : manifest.entries) {
    nlohmann::json e{{"label", label_name(entry.label)}};
    if (!entry.video.empty()) e["video"] = entry.video;
    if (!entry.landmarks.empty()) e["landmarks"] = entry.landmarks;
    e["fps_num"] = entry.fps_num;
    e["fps_den"] = entry.fps_den;
    j[id] = std::move(e);
  }
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_manifest, path.string() + ": " + e.what());
  }
  if (!j.is_object()) fail(Errc::bad_manifest, path.string() + ": manifest must be an object");

  DatasetManifest manifest;
  for (const auto& [id, e] : j.items()) {
    ManifestEntry entry;
    try {
      entry.label = parse_label(e.at("label").get<std::string>());
      if (e.contains("video")) entry.video = e["video"].get<std::string>();
      if (e.contains("landmarks")) entry.landmarks = e["landmarks"].get<std::string>();
      if (e.contains("fps_num")) entry.fps_num = e["fps_num"].get<long>();
      if (e.contains("fps_den")) entry.fps_den = e["fps_den"].get<long>();
    } catch (const nlohmann::json::exception& err) {
      fail(Errc::bad_manifest, path.string() + ": entry '" + id + "': " + err.what());
    }
    manifest.entries.emplace(id, std::move(entry));
  }
  return manifest;
}

}  // namespace fakesift
