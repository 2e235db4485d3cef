#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fakesift/types.hpp"

namespace fakesift {

inline constexpr int kHistogramBins = 256;
inline constexpr int kSequenceLength = 300;  // histograms per video
inline constexpr int kChunkLength = 10;      // rows per temporal chunk

/// Raw luminance histogram: bins[v] = number of samples equal to v.
/// Sum of bins equals the pixel count of the frame.
Vector frame_histogram(const Gray8& frame);

/// L1 normalization to a probability vector (bins sum to 1).
Vector normalize_histogram(const Vector& raw);

/// T x 256 matrix of normalized per-frame histograms for one video.
struct HistogramSequence {
  std::string video_id;
  Matrix rows;
};

/// Resamples a video of N frames onto exactly target_len histogram rows:
/// frame index floor(i*N/target_len) when N >= target_len, otherwise all
/// N frames followed by copies of the last row. Every row is normalized.
HistogramSequence build_histogram_sequence(const FrameSequence& video,
                                           const std::string& video_id,
                                           int target_len = kSequenceLength);

/// Splits the rows into consecutive chunk_len x 256 blocks, in order.
/// Concatenating the chunks reproduces the sequence exactly.
std::vector<Matrix> chunk_sequence(const HistogramSequence& seq,
                                   int chunk_len = kChunkLength);

// On-disk forms. JSON: {"video_id": str, "rows": [[256 floats] x T]}.
// Binary: magic "FHS1", u32 T, u32 bins, then T*bins little-endian f64
// in row order; the video id is the filename stem.
void save_histogram_json(const HistogramSequence& seq, const std::filesystem::path& path);
HistogramSequence load_histogram_json(const std::filesystem::path& path);
void save_histogram_fhs1(const HistogramSequence& seq, const std::filesystem::path& path);
HistogramSequence load_histogram_fhs1(const std::filesystem::path& path);

}  // namespace fakesift
