#include "fakesift/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fakesift/error.hpp"
#include "fakesift/parallel.hpp"
#include "fakesift/rng.hpp"

namespace fakesift {

namespace {

// Value-noise lattice resolution.
constexpr int kSpatialCell = 16;   // pixels per lattice cell
constexpr int kTemporalCell = 8;   // frames per lattice cell
constexpr int kLumaMin = 32;       // keep headroom so fake shifts cannot clamp
constexpr int kLumaSpan = 191;

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::int64_t it) {
  std::uint64_t h = seed;
  h = mix_seed(h ^ static_cast<std::uint64_t>(ix));
  h = mix_seed(h ^ static_cast<std::uint64_t>(iy));
  h = mix_seed(h ^ static_cast<std::uint64_t>(it));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Trilinear value noise in [0, 1), smooth in x, y and frame index.
double value_noise(std::uint64_t seed, int x, int y, int t) {
  const double fx = static_cast<double>(x) / kSpatialCell;
  const double fy = static_cast<double>(y) / kSpatialCell;
  const double ft = static_cast<double>(t) / kTemporalCell;
  const auto ix = static_cast<std::int64_t>(std::floor(fx));
  const auto iy = static_cast<std::int64_t>(std::floor(fy));
  const auto it = static_cast<std::int64_t>(std::floor(ft));
  const double wx = smoothstep(fx - static_cast<double>(ix));
  const double wy = smoothstep(fy - static_cast<double>(iy));
  const double wt = smoothstep(ft - static_cast<double>(it));

  double corners[2][2][2];
  for (int dt = 0; dt < 2; ++dt) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        corners[dt][dy][dx] = lattice_value(seed, ix + dx, iy + dy, it + dt);
      }
    }
  }
  auto lerp = [](double a, double b, double w) { return a + (b - a) * w; };
  const double t0 = lerp(lerp(corners[0][0][0], corners[0][0][1], wx),
                         lerp(corners[0][1][0], corners[0][1][1], wx), wy);
  const double t1 = lerp(lerp(corners[1][0][0], corners[1][0][1], wx),
                         lerp(corners[1][1][0], corners[1][1][1], wx), wy);
  return lerp(t0, t1, wt);
}

std::string zero_padded_id(int index) {
  std::ostringstream out;
  out << std::setw(6) << std::setfill('0') << index;
  return out.str();
}

}  // namespace

FrameSequence gen_video(const SynthVideoSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.n_frames < 1 || spec.fps_num < 1 ||
      spec.fps_den < 1) {
    fail(Errc::bad_config, "video spec needs positive geometry and frame rate");
  }
  if (!(spec.gamma > 0.0)) fail(Errc::bad_config, "gamma must be positive");
  if (spec.checker_amp < 0 || spec.checker_amp > 32) {
    fail(Errc::bad_config, "checker_amp must be in [0, 32]");
  }
  if (spec.checker_period < 1) fail(Errc::bad_config, "checker_period must be >= 1");

  const bool apply_gamma = spec.fake && spec.gamma != 1.0;
  const bool apply_checker = spec.fake && spec.checker_amp > 0;

  // Tone curve as a lookup table; identity parameters never touch pixels,
  // which is what makes a neutral fake the bit-exact twin of its real.
  std::array<std::uint8_t, 256> tone{};
  if (apply_gamma) {
    for (int v = 0; v < 256; ++v) {
      const double shifted = 255.0 * std::pow(static_cast<double>(v) / 255.0, spec.gamma);
      tone[static_cast<std::size_t>(v)] =
          static_cast<std::uint8_t>(std::clamp<long>(std::lround(shifted), 0, 255));
    }
  }

  // Centered region covering a quarter of the frame area.
  const int rx0 = spec.width / 4;
  const int rx1 = rx0 + spec.width / 2;
  const int ry0 = spec.height / 4;
  const int ry1 = ry0 + spec.height / 2;

  FrameSequence seq;
  seq.width = spec.width;
  seq.height = spec.height;
  seq.fps_num = spec.fps_num;
  seq.fps_den = spec.fps_den;
  seq.frames.reserve(static_cast<std::size_t>(spec.n_frames));

  for (int t = 0; t < spec.n_frames; ++t) {
    Gray8 frame(spec.height, spec.width);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const double noise = value_noise(spec.base_seed, x, y, t);
        int v = kLumaMin + static_cast<int>(std::lround(noise * kLumaSpan));
        if (apply_gamma) v = tone[static_cast<std::size_t>(v)];
        if (apply_checker && x >= rx0 && x < rx1 && y >= ry0 && y < ry1) {
          const int parity = ((x - rx0) / spec.checker_period + (y - ry0) / spec.checker_period) % 2;
          v += parity == 0 ? spec.checker_amp : -spec.checker_amp;
        }
        frame(y, x) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      }
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

void write_y4m(const FrameSequence& seq, const std::filesystem::path& path) {
  if (seq.frames.empty()) fail(Errc::empty_source, "refusing to write a frameless y4m");
  if (seq.width % 2 != 0 || seq.height % 2 != 0) {
    fail(Errc::dimension_mismatch, "C420 output needs even dimensions");
  }
  for (const auto& frame : seq.frames) {
    if (frame.rows() != seq.height || frame.cols() != seq.width) {
      fail(Errc::dimension_mismatch, "frame size differs from sequence header");
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << "YUV4MPEG2 W" << seq.width << " H" << seq.height << " F" << seq.fps_num << ':'
      << seq.fps_den << " Ip A1:1 C420\n";

  const std::size_t chroma_plane =
      static_cast<std::size_t>(seq.width / 2) * static_cast<std::size_t>(seq.height / 2);
  const std::vector<char> chroma(2 * chroma_plane, static_cast<char>(128));
  for (const auto& frame : seq.frames) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size()));
    out.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
  }
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

EarTrace gen_ear_trace(const SynthTraceSpec& spec) {
  if (!(spec.duration_s > 0.0) || !(spec.fps > 0.0)) {
    fail(Errc::bad_config, "trace needs positive duration and fps");
  }
  if (spec.blink_rate_per_10s < 0.0) fail(Errc::bad_config, "blink rate must be >= 0");
  if (spec.blink_len_min < 1 || spec.blink_len_max < spec.blink_len_min) {
    fail(Errc::bad_config, "blink length range is invalid");
  }

  const auto n_frames = static_cast<long>(std::lround(spec.duration_s * spec.fps));
  if (n_frames < 1) fail(Errc::bad_config, "trace shorter than one frame");

  SeededRng rng(spec.seed);
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(n_frames), 0);

  // Poisson count at the target rate, then uniform placement with
  // rejection: a candidate touching (or within two frames of) an accepted
  // blink is redrawn so detected runs can never merge.
  const int target = rng.poisson(spec.blink_rate_per_10s / 10.0 * spec.duration_s);
  constexpr int kGuard = 2;
  for (int b = 0; b < target; ++b) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const int len = rng.uniform_int(spec.blink_len_min, spec.blink_len_max);
      if (len > n_frames) break;
      const long onset = static_cast<long>(rng.below(static_cast<std::uint64_t>(n_frames - len + 1)));
      const long lo = std::max<long>(0, onset - kGuard);
      const long hi = std::min<long>(n_frames - 1, onset + len - 1 + kGuard);
      bool free = true;
      for (long f = lo; f <= hi && free; ++f) free = !closed[static_cast<std::size_t>(f)];
      if (!free) continue;
      for (long f = onset; f < onset + len; ++f) closed[static_cast<std::size_t>(f)] = 1;
      break;
    }
  }

  EarTrace trace;
  trace.fps = spec.fps;
  trace.values.resize(n_frames);
  for (long f = 0; f < n_frames; ++f) {
    const double base = closed[static_cast<std::size_t>(f)] ? spec.closed_ear : spec.open_ear;
    trace.values[f] = std::max(0.0, base + rng.gaussian(0.0, 0.01));
  }
  return trace;
}

namespace {

// Static face template; only the eye rows vary with the trace.
LandmarkPoints face_template() {
  LandmarkPoints pts = LandmarkPoints::Zero();
  constexpr double pi = 3.141592653589793;
  for (int i = 0; i < 17; ++i) {  // jaw arc
    const double a = pi * (1.0 - static_cast<double>(i) / 16.0);
    pts(i, 0) = 100.0 + 60.0 * std::cos(a);
    pts(i, 1) = 120.0 + 55.0 * std::sin(a);
  }
  for (int i = 0; i < 5; ++i) {  // brows
    pts(17 + i, 0) = 55.0 + 10.0 * i;
    pts(17 + i, 1) = 80.0;
    pts(22 + i, 0) = 105.0 + 10.0 * i;
    pts(22 + i, 1) = 80.0;
  }
  for (int i = 0; i < 4; ++i) {  // nose bridge
    pts(27 + i, 0) = 100.0;
    pts(27 + i, 1) = 95.0 + 8.0 * i;
  }
  for (int i = 0; i < 5; ++i) {  // nostril line
    pts(31 + i, 0) = 92.0 + 4.0 * i;
    pts(31 + i, 1) = 125.0;
  }
  for (int i = 0; i < 20; ++i) {  // mouth oval
    const double a = 2.0 * pi * static_cast<double>(i) / 20.0;
    pts(48 + i, 0) = 100.0 + 18.0 * std::cos(a);
    pts(48 + i, 1) = 145.0 + 7.0 * std::sin(a);
  }
  return pts;
}

void place_eye(LandmarkPoints& pts, int offset, double center_x, double center_y, double ear) {
  const double span = 20.0;
  const double sep = ear * span;  // vertical pair separation reproducing the EAR
  const double x0 = center_x - span / 2.0;
  pts(offset + 0, 0) = x0;                pts(offset + 0, 1) = center_y;            // p1
  pts(offset + 1, 0) = x0 + 6.0;          pts(offset + 1, 1) = center_y - sep / 2;  // p2
  pts(offset + 2, 0) = x0 + 14.0;         pts(offset + 2, 1) = center_y - sep / 2;  // p3
  pts(offset + 3, 0) = x0 + span;         pts(offset + 3, 1) = center_y;            // p4
  pts(offset + 4, 0) = x0 + 14.0;         pts(offset + 4, 1) = center_y + sep / 2;  // p5
  pts(offset + 5, 0) = x0 + 6.0;          pts(offset + 5, 1) = center_y + sep / 2;  // p6
}

}  // namespace

void write_landmarks_jsonl(const EarTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");

  const LandmarkPoints base = face_template();
  for (Eigen::Index f = 0; f < trace.values.size(); ++f) {
    LandmarkPoints pts = base;
    place_eye(pts, kRightEyeOffset, 70.0, 100.0, trace.values[f]);
    place_eye(pts, kLeftEyeOffset, 130.0, 100.0, trace.values[f]);

    nlohmann::json points = nlohmann::json::array();
    for (int p = 0; p < kLandmarkCount; ++p) {
      points.push_back({pts(p, 0), pts(p, 1)});
    }
    const nlohmann::json line{{"frame", f}, {"points", std::move(points)}};
    out << line.dump() << '\n';
  }
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

DatasetManifest gen_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir,
                            int threads) {
  if (spec.n_real < 1 || spec.n_fake < 1) {
    fail(Errc::bad_config, "need at least one real and one fake entry");
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "videos", ec);
  std::filesystem::create_directories(out_dir / "landmarks", ec);
  if (ec) fail(Errc::io_error, "cannot create " + out_dir.string() + ": " + ec.message());

  // Each id is a pure function of (spec.seed, id), so parallel generation
  // cannot change any output byte.
  const int total = spec.n_real + spec.n_fake;
  parallel_for(static_cast<std::size_t>(total), threads, [&](std::size_t job) {
    const int i = static_cast<int>(job);
    const bool is_fake = i >= spec.n_real;
    const std::string id = zero_padded_id(i);

    SynthVideoSpec video = spec.video;
    video.fake = is_fake;
    video.base_seed = derive_seed(spec.seed, 2 * static_cast<std::uint64_t>(i));
    write_y4m(gen_video(video), out_dir / "videos" / (id + ".y4m"));

    SynthTraceSpec trace_spec = is_fake ? spec.fake_trace : spec.real_trace;
    trace_spec.seed = derive_seed(spec.seed, 2 * static_cast<std::uint64_t>(i) + 1);
    write_landmarks_jsonl(gen_ear_trace(trace_spec), out_dir / "landmarks" / (id + ".jsonl"));
  });

  DatasetManifest manifest;
  for (int i = 0; i < total; ++i) {
    const bool is_fake = i >= spec.n_real;
    const std::string id = zero_padded_id(i);
    ManifestEntry entry;
    entry.label = is_fake ? Label::fake : Label::real;
    entry.video = "videos/" + id + ".y4m";
    entry.landmarks = "landmarks/" + id + ".jsonl";
    entry.fps_num = spec.video.fps_num;
    entry.fps_den = spec.video.fps_den;
    manifest.entries.emplace(id, std::move(entry));
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace fakesift
