#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "fakesift/types.hpp"

namespace fakesift {

inline constexpr int kLandmarkCount = 68;
// 68-point annotation layout: the eye contours live at fixed offsets.
inline constexpr int kRightEyeOffset = 36;
inline constexpr int kLeftEyeOffset = 42;

using LandmarkPoints = Eigen::Matrix<double, kLandmarkCount, 2>;  // row = (x, y)
using EyePoints = Eigen::Matrix<double, 6, 2>;

struct LandmarkFrame {
  long frame_index = 0;
  LandmarkPoints points;
};

/// Reads a landmark stream from JSON-lines: one object per line,
/// {"frame": int, "points": [[x, y] x 68]}, frame indices strictly
/// increasing. Parse failures report the 1-based line number.
std::vector<LandmarkFrame> parse_landmarks(const std::filesystem::path& path);

/// (|p2-p6| + |p3-p5|) / (2 |p1-p4|) over the six eye contour points
/// p1..p6 (rows 0..5). Near zero when the eye is closed; invariant under
/// similarity transforms of the points.
double eye_aspect_ratio(const EyePoints& eye);

struct EarTrace {
  double fps = 30.0;
  Vector values;  // per-frame mean of left/right EAR

  double duration_s() const { return static_cast<double>(values.size()) / fps; }
};

EarTrace ear_trace(const std::vector<LandmarkFrame>& frames, double fps);

/// Closed-eye interval, inclusive on both ends.
struct BlinkEvent {
  long start_frame = 0;
  long end_frame = 0;

  long duration_frames() const { return end_frame - start_frame + 1; }
};

struct BlinkDetectParams {
  double threshold = 0.2;
  int min_consec = 3;
};

/// A blink is a maximal run of frames with EAR below threshold lasting at
/// least min_consec frames. Events come out disjoint and ordered.
std::vector<BlinkEvent> detect_blinks(const EarTrace& trace,
                                      const BlinkDetectParams& params = {});

struct BlinkFeatures {
  double blinks_per_10s = 0.0;
  double mean_blink_duration_s = 0.0;   // 0 when no blinks
  double mean_inter_blink_gap_s = 0.0;  // trace duration when < 2 blinks
  double mean_ear = 0.0;

  Eigen::Vector4d vector() const {
    return {blinks_per_10s, mean_blink_duration_s, mean_inter_blink_gap_s, mean_ear};
  }
};

/// Per-video statistics; the inter-blink gap counts open frames between
/// consecutive events, converted to seconds.
BlinkFeatures blink_features(const EarTrace& trace, const std::vector<BlinkEvent>& events);

/// JSON report written by the blinks command; records the detection
/// parameters that produced it.
struct BlinkReport {
  std::string video_id;
  double fps = 30.0;
  BlinkDetectParams params;
  std::vector<BlinkEvent> blinks;
  BlinkFeatures features;
};

void save_blink_report(const BlinkReport& report, const std::filesystem::path& path);
BlinkReport load_blink_report(const std::filesystem::path& path);

}  // namespace fakesift
