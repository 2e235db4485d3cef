#pragma once

#include <stdexcept>
#include <string>

namespace fakesift {

enum class Errc {
  // frame ingestion
  missing_magic,
  missing_required_token,
  malformed_token,
  unsupported_format,
  truncated_frame,
  empty_source,
  dimension_mismatch,
  invalid_descriptor,
  decode_error,
  // histograms
  empty_frame,
  zero_mass,
  // landmarks / blinks
  bad_point_count,
  non_monotone_frame_index,
  malformed_line,
  degenerate_eye,
  // knn
  empty_training_set,
  k_too_large,
  invalid_k,
  // temporal net
  shape_mismatch,
  version_mismatch,
  empty_dataset,
  // evaluation
  missing_labels,
  empty_input,
  too_few_videos,
  malformed_report,
  malformed_csv,
  unknown_video_id,
  bad_manifest,
  // generic
  io_error,
  bad_config,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::missing_magic: return "MissingMagic";
    case Errc::missing_required_token: return "MissingRequiredToken";
    case Errc::malformed_token: return "MalformedToken";
    case Errc::unsupported_format: return "UnsupportedFormat";
    case Errc::truncated_frame: return "TruncatedFrame";
    case Errc::empty_source: return "EmptySource";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::invalid_descriptor: return "InvalidDescriptor";
    case Errc::decode_error: return "DecodeError";
    case Errc::empty_frame: return "EmptyFrame";
    case Errc::zero_mass: return "ZeroMass";
    case Errc::bad_point_count: return "BadPointCount";
    case Errc::non_monotone_frame_index: return "NonMonotoneFrameIndex";
    case Errc::malformed_line: return "MalformedLine";
    case Errc::degenerate_eye: return "DegenerateEye";
    case Errc::empty_training_set: return "EmptyTrainingSet";
    case Errc::k_too_large: return "KTooLarge";
    case Errc::invalid_k: return "InvalidK";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::version_mismatch: return "VersionMismatch";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::missing_labels: return "MissingLabels";
    case Errc::empty_input: return "EmptyInput";
    case Errc::too_few_videos: return "TooFewVideos";
    case Errc::malformed_report: return "MalformedReport";
    case Errc::malformed_csv: return "MalformedCsv";
    case Errc::unknown_video_id: return "UnknownVideoId";
    case Errc::bad_manifest: return "BadManifest";
    case Errc::io_error: return "IoError";
    case Errc::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

/// Library-wide exception. code() identifies the failure class, what()
/// carries the code name plus a context message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fakesift
