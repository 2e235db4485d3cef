#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "fakesift/error.hpp"

namespace fakesift {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// 8-bit luminance frame, row-major so that frame(y, x) addresses pixel
/// (x, y) and the underlying buffer matches raster scan order.
using Gray8 = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Label { real = 0, fake = 1 };

inline const char* label_name(Label l) { return l == Label::fake ? "FAKE" : "REAL"; }

inline Label parse_label(const std::string& s) {
  if (s == "REAL") return Label::real;
  if (s == "FAKE") return Label::fake;
  fail(Errc::bad_manifest, "label must be REAL or FAKE, got '" + s + "'");
}

/// Ordered grayscale frames with a rational frame rate.
struct FrameSequence {
  int width = 0;
  int height = 0;
  long fps_num = 0;
  long fps_den = 1;
  std::vector<Gray8> frames;

  double fps() const { return static_cast<double>(fps_num) / static_cast<double>(fps_den); }
  std::size_t frame_count() const { return frames.size(); }
};

inline bool operator==(const FrameSequence& a, const FrameSequence& b) {
  if (a.width != b.width || a.height != b.height || a.fps_num != b.fps_num ||
      a.fps_den != b.fps_den || a.frames.size() != b.frames.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const Gray8& fa = a.frames[i];
    const Gray8& fb = b.frames[i];
    if (fa.rows() != fb.rows() || fa.cols() != fb.cols()) return false;
    if ((fa.array() != fb.array()).any()) return false;
  }
  return true;
}

}  // namespace fakesift
