#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace fakesift {

/// Interleaved 8-bit image, row-major. channels is 1 (gray) or 3 (RGB).
struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;
};

/// Bounded PNG reader: 8-bit grayscale or RGB, non-interlaced only.
/// Anything else (palette, 16-bit, alpha, Adam7) is a decode error.
PngImage read_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const PngImage& image);

}  // namespace fakesift
