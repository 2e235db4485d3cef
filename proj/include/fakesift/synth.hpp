#pragma once

#include <cstdint>
#include <filesystem>

#include "fakesift/blink.hpp"
#include "fakesift/manifest.hpp"
#include "fakesift/types.hpp"

namespace fakesift {

/// Procedural test video: a seeded smooth value-noise luminance field
/// animated over time. When fake is set, the field gets a tonal shift
/// (v -> 255*(v/255)^gamma) plus an additive checkerboard of +/-checker_amp
/// in a centered region covering a quarter of the frame. gamma = 1 and
/// checker_amp = 0 reproduce the real twin bit for bit.
struct SynthVideoSpec {
  int width = 64;
  int height = 64;
  int n_frames = 300;
  long fps_num = 30;
  long fps_den = 1;
  std::uint64_t base_seed = 0;
  bool fake = false;
  double gamma = 0.9;     // applied only when fake
  int checker_amp = 6;    // 0..32, applied only when fake
  int checker_period = 2; // pixels
};

FrameSequence gen_video(const SynthVideoSpec& spec);

/// Monochrome-in-Y C420 writer (chroma planes constant 128). Frame sizes
/// must be even. read_frames inverts it exactly.
void write_y4m(const FrameSequence& seq, const std::filesystem::path& path);

/// Synthetic eye-aspect-ratio trace: open_ear baseline dipping to
/// closed_ear during blinks, Gaussian jitter (sigma 0.01) everywhere.
/// Blink count is Poisson with mean rate blink_rate_per_10s; onsets are
/// placed uniformly, redrawing any that would overlap or touch an already
/// placed blink. Blink lengths are uniform in [blink_len_min, blink_len_max].
struct SynthTraceSpec {
  double duration_s = 30.0;
  double fps = 30.0;
  double blink_rate_per_10s = 4.8;
  double open_ear = 0.30;
  double closed_ear = 0.08;
  int blink_len_min = 3;
  int blink_len_max = 9;
  std::uint64_t seed = 0;
};

EarTrace gen_ear_trace(const SynthTraceSpec& spec);

/// Renders a trace as a 68-point landmark stream whose eye geometry
/// reproduces the EAR values analytically (vertical pair separation =
/// EAR * horizontal span), so ear_trace(parse_landmarks(file)) recovers
/// the trace.
void write_landmarks_jsonl(const EarTrace& trace, const std::filesystem::path& path);

/// Labeled dataset on disk: videos/<id>.y4m, landmarks/<id>.jsonl and a
/// manifest. Real entries use real_trace and a neutral video spec; fake
/// entries use fake_trace and the fake video parameters. Per-id seeds are
/// derived from (seed, id), so generation order cannot change any byte.
struct DatasetSpec {
  int n_real = 100;
  int n_fake = 100;
  SynthVideoSpec video;          // template; fake/base_seed filled per id
  SynthTraceSpec real_trace;     // defaults to 4.8 blinks per 10 s
  SynthTraceSpec fake_trace;     // defaults to 2.2 blinks per 10 s
  std::uint64_t seed = 0;

  DatasetSpec() { fake_trace.blink_rate_per_10s = 2.2; }
};

DatasetManifest gen_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir,
                            int threads = 1);

}  // namespace fakesift
