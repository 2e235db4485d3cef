#include "fakesift/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "fakesift/error.hpp"

namespace fakesift {

namespace {

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

void append_chunk(std::vector<std::uint8_t>& file, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
  write_be32(file, static_cast<std::uint32_t>(len));
  const std::size_t type_at = file.size();
  file.insert(file.end(), type, type + 4);
  if (len > 0) file.insert(file.end(), data, data + len);
  const auto crc = crc32(0, file.data() + type_at, static_cast<uInt>(4 + len));
  write_be32(file, static_cast<std::uint32_t>(crc));
}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
    fail(Errc::decode_error, path.string() + ": not a PNG file");
  }

  PngImage image;
  std::vector<std::uint8_t> idat;
  bool saw_ihdr = false;
  bool saw_iend = false;
  std::size_t at = 8;
  while (at + 12 <= bytes.size() && !saw_iend) {
    const std::uint32_t len = read_be32(&bytes[at]);
    if (at + 12 + len > bytes.size()) fail(Errc::decode_error, path.string() + ": truncated chunk");
    const char* type = reinterpret_cast<const char*>(&bytes[at + 4]);
    const std::uint8_t* data = &bytes[at + 8];
    const std::uint32_t want_crc = read_be32(&bytes[at + 8 + len]);
    const auto got_crc = crc32(0, &bytes[at + 4], static_cast<uInt>(4 + len));
    if (want_crc != static_cast<std::uint32_t>(got_crc)) {
      fail(Errc::decode_error, path.string() + ": chunk CRC mismatch");
    }

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) fail(Errc::decode_error, path.string() + ": bad IHDR length");
      image.width = static_cast<int>(read_be32(data));
      image.height = static_cast<int>(read_be32(data + 4));
      const int bit_depth = data[8];
      const int color_type = data[9];
      const int interlace = data[12];
      if (image.width < 1 || image.height < 1) {
        fail(Errc::decode_error, path.string() + ": bad dimensions");
      }
      if (bit_depth != 8 || (color_type != 0 && color_type != 2) || interlace != 0) {
        fail(Errc::unsupported_format,
             path.string() + ": only 8-bit gray/RGB non-interlaced PNGs are supported");
      }
      image.channels = color_type == 2 ? 3 : 1;
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
    }  // ancillary chunks are skipped
    at += 12 + len;
  }
  if (!saw_ihdr || !saw_iend || idat.empty()) {
    fail(Errc::decode_error, path.string() + ": missing IHDR/IDAT/IEND");
  }

  const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
  const std::size_t raw_size = static_cast<std::size_t>(image.height) * (stride + 1);
  std::vector<std::uint8_t> raw(raw_size);
  uLongf dest_len = raw_size;
  const int rc = uncompress(raw.data(), &dest_len, idat.data(), static_cast<uLong>(idat.size()));
  if (rc != Z_OK || dest_len != raw_size) {
    fail(Errc::decode_error, path.string() + ": inflate failed");
  }

  image.pixels.assign(static_cast<std::size_t>(image.height) * stride, 0);
  const int bpp = image.channels;
  for (int y = 0; y < image.height; ++y) {
    const std::uint8_t filter = raw[static_cast<std::size_t>(y) * (stride + 1)];
    const std::uint8_t* src = &raw[static_cast<std::size_t>(y) * (stride + 1) + 1];
    std::uint8_t* dst = &image.pixels[static_cast<std::size_t>(y) * stride];
    const std::uint8_t* up = y > 0 ? dst - stride : nullptr;
    for (std::size_t x = 0; x < stride; ++x) {
      const int a = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
      const int b = up ? up[x] : 0;
      const int c = (up && x >= static_cast<std::size_t>(bpp)) ? up[x - bpp] : 0;
      int value = src[x];
      switch (filter) {
        case 0: break;
        case 1: value += a; break;
        case 2: value += b; break;
        case 3: value += (a + b) / 2; break;
        case 4: value += paeth(a, b, c); break;
        default:
          fail(Errc::decode_error, path.string() + ": unknown scanline filter");
      }
      dst[x] = static_cast<std::uint8_t>(value & 0xFF);
    }
  }
  return image;
}

void write_png(const std::filesystem::path& path, const PngImage& image) {
  if (image.width < 1 || image.height < 1 || (image.channels != 1 && image.channels != 3)) {
    fail(Errc::bad_config, "write_png needs positive dimensions and 1 or 3 channels");
  }
  const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
  if (image.pixels.size() != static_cast<std::size_t>(image.height) * stride) {
    fail(Errc::dimension_mismatch, "pixel buffer does not match dimensions");
  }

  // Filter type 0 on every scanline keeps the writer trivial.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(image.height) * (stride + 1));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = &image.pixels[static_cast<std::size_t>(y) * stride];
    raw.insert(raw.end(), row, row + stride);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    fail(Errc::io_error, "deflate failed");
  }
  compressed.resize(bound);

  std::vector<std::uint8_t> file(kSignature, kSignature + 8);
  std::uint8_t ihdr[13] = {};
  ihdr[0] = static_cast<std::uint8_t>(image.width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(image.width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(image.width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(image.width);
  ihdr[4] = static_cast<std::uint8_t>(image.height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(image.height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(image.height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(image.height);
  ihdr[8] = 8;                                       // bit depth
  ihdr[9] = image.channels == 3 ? 2 : 0;             // color type
  ihdr[10] = 0;                                      // compression
  ihdr[11] = 0;                                      // filter
  ihdr[12] = 0;                                      // interlace
  append_chunk(file, "IHDR", ihdr, sizeof(ihdr));
  append_chunk(file, "IDAT", compressed.data(), compressed.size());
  append_chunk(file, "IEND", nullptr, 0);

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(file.data()), static_cast<std::streamsize>(file.size()));
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

}  // namespace fakesift
