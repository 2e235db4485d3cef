#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "fakesift/types.hpp"

namespace fakesift {

/// Parsed YUV4MPEG2 stream header. Supported subset: required W/H/F
/// tokens, optional C colorspace token (defaults to C420 when absent);
/// Ip/A/X tokens are accepted and ignored, interlaced content is not.
struct Y4mHeader {
  int width = 0;
  int height = 0;
  long fps_num = 0;
  long fps_den = 1;
  std::string colorspace = "C420";
};

/// Reads the header line from a stream positioned at the start of a
/// YUV4MPEG2 file. Leaves the stream at the first byte after the newline.
Y4mHeader parse_y4m_header(std::istream& in);

/// BT.601 luma: round(0.299 r + 0.587 g + 0.114 b), clamped to [0, 255].
std::uint8_t rgb_to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b);

enum class SourceKind { y4m, png_dir, raw_gray };

/// Dimensions and frame rate for headerless raw gray8 files.
/// On disk: JSON {"width":int,"height":int,"fps_num":int,"fps_den":int}.
struct RawGrayHeader {
  int width = 0;
  int height = 0;
  long fps_num = 0;
  long fps_den = 1;
};

RawGrayHeader load_raw_sidecar(const std::filesystem::path& path);

struct SourceDescriptor {
  SourceKind kind = SourceKind::y4m;
  std::filesystem::path path;
  std::optional<RawGrayHeader> sidecar;  // required for raw_gray, forbidden otherwise
};

/// Decodes a frame source into grayscale frames.
///   y4m      - Y plane kept, chroma skipped (C420 family, C444, Cmono).
///   png_dir  - every *.png in lexicographic filename order; RGB pixels
///              pass through rgb_to_gray. Frame rate defaults to 30:1.
///   raw_gray - concatenated W*H planes, geometry from the sidecar.
FrameSequence read_frames(const SourceDescriptor& src);

/// Shorthand for read_frames({y4m, path}).
FrameSequence read_y4m(const std::filesystem::path& path);

}  // namespace fakesift
