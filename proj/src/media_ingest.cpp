#include "fakesift/media_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakesift/png_io.hpp"

namespace fakesift {

namespace {

constexpr const char* kStreamMagic = "YUV4MPEG2";
constexpr const char* kFrameMagic = "FRAME";

long parse_long(const std::string& text, const std::string& token) {
  long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(Errc::malformed_token, "cannot parse number in token '" + token + "'");
  }
  return value;
}

// Plane sizes skipped after each Y plane, per colorspace tag.
std::size_t chroma_bytes(const std::string& colorspace, int width, int height) {
  if (colorspace.rfind("C420", 0) == 0) {  // C420, C420jpeg, C420paldv, C420mpeg2
    if (width % 2 != 0 || height % 2 != 0) {
      fail(Errc::dimension_mismatch, "C420 requires even dimensions, got " +
                                         std::to_string(width) + "x" + std::to_string(height));
    }
    return 2 * static_cast<std::size_t>(width / 2) * static_cast<std::size_t>(height / 2);
  }
  if (colorspace == "C444") return 2 * static_cast<std::size_t>(width) * height;
  if (colorspace == "Cmono") return 0;
  fail(Errc::unsupported_format, "colorspace '" + colorspace + "' not supported");
}

FrameSequence read_y4m_stream(std::istream& in) {
  const Y4mHeader header = parse_y4m_header(in);
  const std::size_t y_bytes = static_cast<std::size_t>(header.width) * header.height;
  const std::size_t skip_bytes = chroma_bytes(header.colorspace, header.width, header.height);

  FrameSequence seq;
  seq.width = header.width;
  seq.height = header.height;
  seq.fps_num = header.fps_num;
  seq.fps_den = header.fps_den;

  std::string marker;
  while (std::getline(in, marker)) {
    if (marker != kFrameMagic && marker.rfind("FRAME ", 0) != 0) {
      fail(Errc::malformed_token, "expected FRAME marker, got '" + marker + "'");
    }
    Gray8 frame(header.height, header.width);
    in.read(reinterpret_cast<char*>(frame.data()), static_cast<std::streamsize>(y_bytes));
    if (static_cast<std::size_t>(in.gcount()) != y_bytes) {
      fail(Errc::truncated_frame, "Y plane of frame " + std::to_string(seq.frames.size()) +
                                      " shorter than " + std::to_string(y_bytes) + " bytes");
    }
    if (skip_bytes > 0) {
      in.ignore(static_cast<std::streamsize>(skip_bytes));
      if (static_cast<std::size_t>(in.gcount()) != skip_bytes) {
        fail(Errc::truncated_frame, "chroma planes of frame " +
                                        std::to_string(seq.frames.size()) + " truncated");
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  if (seq.frames.empty()) fail(Errc::empty_source, "y4m stream holds no frames");
  return seq;
}

FrameSequence read_png_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      files.push_back(entry.path());
    }
  }
  if (ec) fail(Errc::io_error, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  if (files.empty()) fail(Errc::empty_source, "no .png files in " + dir.string());

  FrameSequence seq;
  seq.fps_num = 30;  // png directories carry no timing; assume 30 fps
  seq.fps_den = 1;
  for (const auto& file : files) {
    const PngImage img = read_png(file);
    if (seq.frames.empty()) {
      seq.width = img.width;
      seq.height = img.height;
    } else if (img.width != seq.width || img.height != seq.height) {
      fail(Errc::dimension_mismatch,
           file.filename().string() + " is " + std::to_string(img.width) + "x" +
               std::to_string(img.height) + ", expected " + std::to_string(seq.width) + "x" +
               std::to_string(seq.height));
    }
    Gray8 frame(img.height, img.width);
    if (img.channels == 1) {
      std::copy(img.pixels.begin(), img.pixels.end(), frame.data());
    } else {
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          const std::size_t at = 3 * (static_cast<std::size_t>(y) * img.width + x);
          frame(y, x) = rgb_to_gray(img.pixels[at], img.pixels[at + 1], img.pixels[at + 2]);
        }
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

FrameSequence read_raw_gray(const std::filesystem::path& path, const RawGrayHeader& hdr) {
  if (hdr.width < 1 || hdr.height < 1 || hdr.fps_num < 1 || hdr.fps_den < 1) {
    fail(Errc::invalid_descriptor, "raw_gray sidecar has non-positive geometry");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());

  const std::size_t plane = static_cast<std::size_t>(hdr.width) * hdr.height;
  const auto file_size = std::filesystem::file_size(path);
  if (file_size == 0) fail(Errc::empty_source, path.string() + " is empty");
  if (file_size % plane != 0) {
    fail(Errc::truncated_frame, path.string() + " size " + std::to_string(file_size) +
                                    " is not a multiple of " + std::to_string(plane));
  }

  FrameSequence seq;
  seq.width = hdr.width;
  seq.height = hdr.height;
  seq.fps_num = hdr.fps_num;
  seq.fps_den = hdr.fps_den;
  const std::size_t n_frames = file_size / plane;
  for (std::size_t i = 0; i < n_frames; ++i) {
    Gray8 frame(hdr.height, hdr.width);
    in.read(reinterpret_cast<char*>(frame.data()), static_cast<std::streamsize>(plane));
    if (static_cast<std::size_t>(in.gcount()) != plane) {
      fail(Errc::truncated_frame, "short read in " + path.string());
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

}  // namespace

Y4mHeader parse_y4m_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::missing_magic, "empty stream");

  std::istringstream tokens(line);
  std::string magic;
  tokens >> magic;
  if (magic != kStreamMagic) {
    fail(Errc::missing_magic, "stream does not start with YUV4MPEG2");
  }

  Y4mHeader header;
  bool saw_w = false, saw_h = false, saw_f = false;
  std::string token;
  while (tokens >> token) {
    switch (token[0]) {
      case 'W': {
        const long w = parse_long(token.substr(1), token);
        if (w < 1) fail(Errc::malformed_token, "width must be >= 1 in '" + token + "'");
        header.width = static_cast<int>(w);
        saw_w = true;
        break;
      }
      case 'H': {
        const long h = parse_long(token.substr(1), token);
        if (h < 1) fail(Errc::malformed_token, "height must be >= 1 in '" + token + "'");
        header.height = static_cast<int>(h);
        saw_h = true;
        break;
      }
      case 'F': {
        const auto colon = token.find(':');
        if (colon == std::string::npos || colon == 1 || colon + 1 >= token.size()) {
          fail(Errc::malformed_token, "frame rate token '" + token + "' is not F<num>:<den>");
        }
        header.fps_num = parse_long(token.substr(1, colon - 1), token);
        header.fps_den = parse_long(token.substr(colon + 1), token);
        if (header.fps_num < 1 || header.fps_den < 1) {
          fail(Errc::malformed_token, "frame rate must be positive in '" + token + "'");
        }
        saw_f = true;
        break;
      }
      case 'C':
        header.colorspace = token;
        break;
      default:
        break;  // Ip, A, X... accepted and ignored
    }
  }
  if (!saw_w) fail(Errc::missing_required_token, "no W token in y4m header");
  if (!saw_h) fail(Errc::missing_required_token, "no H token in y4m header");
  if (!saw_f) fail(Errc::missing_required_token, "no F token in y4m header");
  return header;
}

std::uint8_t rgb_to_gray(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const long rounded = std::lround(y);
  return static_cast<std::uint8_t>(std::clamp(rounded, 0L, 255L));
}

RawGrayHeader load_raw_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open sidecar " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_descriptor, "sidecar " + path.string() + ": " + e.what());
  }
  RawGrayHeader hdr;
  try {
    hdr.width = j.at("width").get<int>();
    hdr.height = j.at("height").get<int>();
    hdr.fps_num = j.at("fps_num").get<long>();
    hdr.fps_den = j.at("fps_den").get<long>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_descriptor, "sidecar " + path.string() + ": " + e.what());
  }
  return hdr;
}

FrameSequence read_frames(const SourceDescriptor& src) {
  if (src.kind == SourceKind::raw_gray && !src.sidecar) {
    fail(Errc::invalid_descriptor, "raw_gray source needs a sidecar header");
  }
  if (src.kind != SourceKind::raw_gray && src.sidecar) {
    fail(Errc::invalid_descriptor, "sidecar only applies to raw_gray sources");
  }
  switch (src.kind) {
    case SourceKind::y4m: {
      std::ifstream in(src.path, std::ios::binary);
      if (!in) fail(Errc::io_error, "cannot open " + src.path.string());
      return read_y4m_stream(in);
    }
    case SourceKind::png_dir:
      return read_png_dir(src.path);
    case SourceKind::raw_gray:
      return read_raw_gray(src.path, *src.sidecar);
  }
  fail(Errc::invalid_descriptor, "unknown source kind");
}

FrameSequence read_y4m(const std::filesystem::path& path) {
  return read_frames({SourceKind::y4m, path, std::nullopt});
}

}  // namespace fakesift
