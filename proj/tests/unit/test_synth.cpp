#include "fakesift/synth.hpp"

#include <cmath>

#include "doctest.h"
#include "fakesift/histogram.hpp"
#include "fakesift/media_ingest.hpp"
#include "fakesift/rng.hpp"
#include "fakesift/temporal_net.hpp"
#include "test_util.hpp"

using namespace fakesift;

namespace {

SynthVideoSpec small_video(std::uint64_t seed, bool fake) {
  SynthVideoSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.n_frames = 12;
  spec.base_seed = seed;
  spec.fake = fake;
  return spec;
}

Vector mean_normalized_histogram(const FrameSequence& seq) {
  Vector total = Vector::Zero(kHistogramBins);
  for (const auto& frame : seq.frames) {
    total += normalize_histogram(frame_histogram(frame));
  }
  return total / static_cast<double>(seq.frames.size());
}

double histogram_mean_level(const Vector& normalized) {
  double mean = 0.0;
  for (int v = 0; v < kHistogramBins; ++v) mean += v * normalized[v];
  return mean;
}

}  // namespace

TEST_CASE("neutral fake parameters reproduce the real twin bit for bit") {
  SynthVideoSpec real = small_video(42, false);
  SynthVideoSpec neutral = small_video(42, true);
  neutral.gamma = 1.0;
  neutral.checker_amp = 0;
  CHECK(gen_video(real) == gen_video(neutral));
}

TEST_CASE("gen_video is a pure function of its spec") {
  const SynthVideoSpec spec = small_video(7, true);
  CHECK(gen_video(spec) == gen_video(spec));
  SynthVideoSpec other = spec;
  other.base_seed = 8;
  CHECK_FALSE(gen_video(spec) == gen_video(other));
}

TEST_CASE("gamma below one brightens the histogram against the twin") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    SynthVideoSpec fake = small_video(seed, true);
    fake.gamma = 0.9;
    fake.checker_amp = 0;
    const double real_mean =
        histogram_mean_level(mean_normalized_histogram(gen_video(small_video(seed, false))));
    const double fake_mean = histogram_mean_level(mean_normalized_histogram(gen_video(fake)));
    CHECK(fake_mean > real_mean);
  }
}

TEST_CASE("stronger tampering never gets less detectable") {
  const std::uint64_t seed = 99;
  const Vector real_hist = mean_normalized_histogram(gen_video(small_video(seed, false)));

  double last_distance = 0.0;
  for (double gamma : {1.0, 0.95, 0.9, 0.85}) {
    SynthVideoSpec fake = small_video(seed, true);
    fake.gamma = gamma;
    fake.checker_amp = 0;
    const double d =
        (mean_normalized_histogram(gen_video(fake)) - real_hist).lpNorm<1>();
    CHECK(d >= last_distance - 1e-12);
    last_distance = d;
  }

  last_distance = 0.0;
  for (int amp : {0, 2, 4, 8}) {
    SynthVideoSpec fake = small_video(seed, true);
    fake.gamma = 1.0;
    fake.checker_amp = amp;
    const double d =
        (mean_normalized_histogram(gen_video(fake)) - real_hist).lpNorm<1>();
    CHECK(d >= last_distance - 1e-12);
    last_distance = d;
  }
}

TEST_CASE("y4m writer round-trips through the reader") {
  const FrameSequence seq = gen_video(small_video(5, true));
  testutil::TempDir dir;
  write_y4m(seq, dir / "v.y4m");
  const FrameSequence back = read_y4m(dir / "v.y4m");
  CHECK(back == seq);
}

TEST_CASE("y4m writer emits the expected header and file size") {
  SynthVideoSpec spec = small_video(1, false);
  spec.fps_num = 24;
  const FrameSequence seq = gen_video(spec);
  testutil::TempDir dir;
  write_y4m(seq, dir / "v.y4m");

  const std::string bytes = testutil::read_file(dir / "v.y4m");
  const std::string header = "YUV4MPEG2 W32 H32 F24:1 Ip A1:1 C420\n";
  CHECK(bytes.rfind(header, 0) == 0);
  // header + N * (len("FRAME\n") + 1.5 * W * H)
  const std::size_t expected =
      header.size() + 12u * (6u + 32u * 32u + 2u * 16u * 16u);
  CHECK(bytes.size() == expected);

  FrameSequence odd = seq;
  odd.width = 31;
  CHECK(testutil::thrown_code([&] { write_y4m(odd, dir / "odd.y4m"); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("zero blink rate produces a dip-free trace") {
  SynthTraceSpec spec;
  spec.blink_rate_per_10s = 0.0;
  spec.seed = 3;
  const EarTrace trace = gen_ear_trace(spec);
  CHECK(trace.values.size() == 900);
  CHECK(detect_blinks(trace).empty());
  CHECK((trace.values.array() > 0.2).all());
}

TEST_CASE("generated blink rates land near their targets") {
  // Tighter statistical checks (100 traces, both rates) run in the
  // acceptance suite; this is a smoke check on one configuration.
  double measured = 0.0;
  const int n_traces = 20;
  for (int i = 0; i < n_traces; ++i) {
    SynthTraceSpec spec;
    spec.blink_rate_per_10s = 4.8;
    spec.seed = derive_seed(1000, static_cast<std::uint64_t>(i));
    const EarTrace trace = gen_ear_trace(spec);
    const auto events = detect_blinks(trace);
    measured += blink_features(trace, events).blinks_per_10s;
  }
  measured /= n_traces;
  CHECK(measured > 4.8 * 0.8);
  CHECK(measured < 4.8 * 1.2);
}

TEST_CASE("gen_ear_trace is deterministic") {
  SynthTraceSpec spec;
  spec.seed = 77;
  const EarTrace a = gen_ear_trace(spec);
  const EarTrace b = gen_ear_trace(spec);
  CHECK(testutil::exact_equal(a.values, b.values));
}

TEST_CASE("landmark rendering reproduces the trace through the parser") {
  SynthTraceSpec spec;
  spec.duration_s = 5.0;
  spec.seed = 11;
  const EarTrace trace = gen_ear_trace(spec);

  testutil::TempDir dir;
  write_landmarks_jsonl(trace, dir / "t.jsonl");
  const EarTrace recovered = ear_trace(parse_landmarks(dir / "t.jsonl"), spec.fps);
  REQUIRE(recovered.values.size() == trace.values.size());
  for (Eigen::Index f = 0; f < trace.values.size(); ++f) {
    CHECK(std::abs(recovered.values[f] - trace.values[f]) < 1e-6);
  }
}

TEST_CASE("training loss falls over 20 epochs on a small generated set") {
  std::vector<fakesift::LabeledSequence> data;
  for (int i = 0; i < 10; ++i) {
    SynthVideoSpec spec = small_video(derive_seed(606, static_cast<std::uint64_t>(i)), i >= 5);
    spec.gamma = 0.85;
    spec.checker_amp = 8;
    data.push_back({build_histogram_sequence(gen_video(spec), std::to_string(i)), i >= 5 ? 1 : 0});
  }
  ModelConfig config;
  config.lstm_units = 8;
  config.dense1_units = 16;
  config.dense2_units = 8;
  config.seed = 2;
  TrainOptions options;
  options.epochs = 20;
  options.batch_size = 5;
  options.threads = 2;
  const TrainResult result = train(data, {}, config, options);
  CHECK(result.history.front().train_loss > result.history.back().train_loss);
}

TEST_CASE("gen_dataset writes a coherent, reproducible tree") {
  DatasetSpec spec;
  spec.n_real = 3;
  spec.n_fake = 2;
  spec.video = small_video(0, false);
  spec.real_trace.duration_s = 2.0;
  spec.fake_trace.duration_s = 2.0;
  spec.seed = 2718;

  testutil::TempDir dir;
  const DatasetManifest manifest = gen_dataset(spec, dir / "a");
  CHECK(manifest.size() == 5);

  int real_count = 0;
  for (const auto& [id, entry] : manifest.entries) {
    if (entry.label == Label::real) ++real_count;
    CHECK(std::filesystem::exists(dir / "a" / entry.video));
    CHECK(std::filesystem::exists(dir / "a" / entry.landmarks));
  }
  CHECK(real_count == 3);

  const DatasetManifest reloaded = load_manifest(dir / "a" / "manifest.json");
  CHECK(reloaded.size() == 5);
  CHECK(reloaded.entries.begin()->first == "000000");

  // Same spec, second tree: byte-identical files.
  gen_dataset(spec, dir / "b");
  CHECK(testutil::read_file(dir / "a" / "manifest.json") ==
        testutil::read_file(dir / "b" / "manifest.json"));
  CHECK(testutil::read_file(dir / "a" / "videos" / "000004.y4m") ==
        testutil::read_file(dir / "b" / "videos" / "000004.y4m"));
  CHECK(testutil::read_file(dir / "a" / "landmarks" / "000001.jsonl") ==
        testutil::read_file(dir / "b" / "landmarks" / "000001.jsonl"));

  DatasetSpec bad = spec;
  bad.n_real = 0;
  CHECK(testutil::thrown_code([&] { gen_dataset(bad, dir / "c"); }) == Errc::bad_config);
}
