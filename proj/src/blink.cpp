#include "fakesift/blink.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "fakesift/error.hpp"

namespace fakesift {

std::vector<LandmarkFrame> parse_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());

  std::vector<LandmarkFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::malformed_line, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }

    LandmarkFrame frame;
    try {
      frame.frame_index = j.at("frame").get<long>();
      const auto& points = j.at("points");
      if (!points.is_array() || points.size() != kLandmarkCount) {
        fail(Errc::bad_point_count,
             path.string() + ":" + std::to_string(line_no) + ": expected " +
                 std::to_string(kLandmarkCount) + " points, got " +
                 std::to_string(points.is_array() ? points.size() : 0));
      }
      for (int p = 0; p < kLandmarkCount; ++p) {
        const auto& pt = points[static_cast<std::size_t>(p)];
        if (!pt.is_array() || pt.size() != 2) {
          fail(Errc::malformed_line,
               path.string() + ":" + std::to_string(line_no) + ": point " + std::to_string(p) +
                   " is not an [x, y] pair");
        }
        frame.points(p, 0) = pt[0].get<double>();
        frame.points(p, 1) = pt[1].get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::malformed_line, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }

    if (!frames.empty() && frame.frame_index <= frames.back().frame_index) {
      fail(Errc::non_monotone_frame_index,
           path.string() + ":" + std::to_string(line_no) + ": frame " +
               std::to_string(frame.frame_index) + " after " +
               std::to_string(frames.back().frame_index));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

double eye_aspect_ratio(const EyePoints& eye) {
  const double horizontal = (eye.row(0) - eye.row(3)).norm();  // p1 - p4
  if (horizontal <= 0.0) fail(Errc::degenerate_eye, "eye has zero horizontal span");
  const double v1 = (eye.row(1) - eye.row(5)).norm();  // p2 - p6
  const double v2 = (eye.row(2) - eye.row(4)).norm();  // p3 - p5
  return (v1 + v2) / (2.0 * horizontal);
}

EarTrace ear_trace(const std::vector<LandmarkFrame>& frames, double fps) {
  if (frames.empty()) fail(Errc::empty_source, "landmark stream holds no frames");
  if (!(fps > 0.0)) fail(Errc::bad_config, "fps must be positive");

  EarTrace trace;
  trace.fps = fps;
  trace.values.resize(static_cast<Eigen::Index>(frames.size()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& pts = frames[i].points;
    double ear[2];
    for (int side = 0; side < 2; ++side) {
      const int offset = side == 0 ? kRightEyeOffset : kLeftEyeOffset;
      const EyePoints eye = pts.middleRows<6>(offset);
      if ((eye.row(0) - eye.row(3)).norm() <= 0.0) {
        fail(Errc::degenerate_eye, "frame " + std::to_string(frames[i].frame_index) + ": " +
                                       (side == 0 ? "right" : "left") +
                                       " eye has zero horizontal span");
      }
      ear[side] = eye_aspect_ratio(eye);
    }
    trace.values[static_cast<Eigen::Index>(i)] = 0.5 * (ear[0] + ear[1]);
  }
  return trace;
}

std::vector<BlinkEvent> detect_blinks(const EarTrace& trace, const BlinkDetectParams& params) {
  if (!(params.threshold > 0.0)) fail(Errc::bad_config, "threshold must be positive");
  if (params.min_consec < 1) fail(Errc::bad_config, "min_consec must be >= 1");

  std::vector<BlinkEvent> events;
  const auto n = trace.values.size();
  Eigen::Index run_start = -1;
  for (Eigen::Index i = 0; i <= n; ++i) {
    const bool closed = i < n && trace.values[i] < params.threshold;
    if (closed && run_start < 0) {
      run_start = i;
    } else if (!closed && run_start >= 0) {
      if (i - run_start >= params.min_consec) {
        events.push_back({static_cast<long>(run_start), static_cast<long>(i - 1)});
      }
      run_start = -1;
    }
  }
  return events;
}

BlinkFeatures blink_features(const EarTrace& trace, const std::vector<BlinkEvent>& events) {
  const double duration_s = trace.duration_s();
  if (!(duration_s > 0.0)) fail(Errc::empty_source, "trace has zero duration");

  BlinkFeatures features;
  features.blinks_per_10s = static_cast<double>(events.size()) * 10.0 / duration_s;
  features.mean_ear = trace.values.mean();

  if (!events.empty()) {
    double total_frames = 0.0;
    for (const auto& e : events) total_frames += static_cast<double>(e.duration_frames());
    features.mean_blink_duration_s = total_frames / static_cast<double>(events.size()) / trace.fps;
  }

  if (events.size() >= 2) {
    // Open frames between consecutive events, in seconds.
    double total_gap_frames = 0.0;
    for (std::size_t i = 1; i < events.size(); ++i) {
      total_gap_frames += static_cast<double>(events[i].start_frame - events[i - 1].end_frame - 1);
    }
    features.mean_inter_blink_gap_s =
        total_gap_frames / static_cast<double>(events.size() - 1) / trace.fps;
  } else {
    features.mean_inter_blink_gap_s = duration_s;
  }
  return features;
}

void save_blink_report(const BlinkReport& report, const std::filesystem::path& path) {
  nlohmann::json blinks = nlohmann::json::array();
  for (const auto& b : report.blinks) {
    blinks.push_back({{"start", b.start_frame}, {"end", b.end_frame}});
  }
  const nlohmann::json j{
      {"video_id", report.video_id},
      {"fps", report.fps},
      {"params",
       {{"threshold", report.params.threshold}, {"min_consec", report.params.min_consec}}},
      {"blinks", std::move(blinks)},
      {"features",
       {{"blinks_per_10s", report.features.blinks_per_10s},
        {"mean_blink_duration_s", report.features.mean_blink_duration_s},
        {"mean_inter_blink_gap_s", report.features.mean_inter_blink_gap_s},
        {"mean_ear", report.features.mean_ear}}}};
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

BlinkReport load_blink_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }
  BlinkReport report;
  try {
    report.video_id = j.at("video_id").get<std::string>();
    report.fps = j.at("fps").get<double>();
    report.params.threshold = j.at("params").at("threshold").get<double>();
    report.params.min_consec = j.at("params").at("min_consec").get<int>();
    for (const auto& b : j.at("blinks")) {
      report.blinks.push_back({b.at("start").get<long>(), b.at("end").get<long>()});
    }
    const auto& f = j.at("features");
    report.features.blinks_per_10s = f.at("blinks_per_10s").get<double>();
    report.features.mean_blink_duration_s = f.at("mean_blink_duration_s").get<double>();
    report.features.mean_inter_blink_gap_s = f.at("mean_inter_blink_gap_s").get<double>();
    report.features.mean_ear = f.at("mean_ear").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }
  return report;
}

}  // namespace fakesift
