#include "fakesift/histogram.hpp"

#include <algorithm>
#include <vector>

#include "doctest.h"
#include "fakesift/rng.hpp"
#include "test_util.hpp"

using namespace fakesift;

namespace {

Gray8 make_frame(int h, int w, SeededRng& rng) {
  Gray8 frame(h, w);
  for (Eigen::Index i = 0; i < frame.size(); ++i) {
    frame.data()[i] = static_cast<std::uint8_t>(rng.below(256));
  }
  return frame;
}

// Independent oracle: per-value scan instead of a single counting pass.
Vector naive_histogram(const Gray8& frame) {
  Vector bins = Vector::Zero(kHistogramBins);
  for (int v = 0; v < kHistogramBins; ++v) {
    long count = 0;
    for (Eigen::Index i = 0; i < frame.size(); ++i) {
      if (frame.data()[i] == v) ++count;
    }
    bins[v] = static_cast<double>(count);
  }
  return bins;
}

}  // namespace

TEST_CASE("frame_histogram counts directly") {
  Gray8 frame(2, 2);
  frame << 0, 0, 255, 255;
  const Vector bins = frame_histogram(frame);
  CHECK(bins[0] == 2.0);
  CHECK(bins[255] == 2.0);
  CHECK(bins.sum() == 4.0);
}

TEST_CASE("frame_histogram one-hot on a uniform frame") {
  const Gray8 frame = Gray8::Constant(4, 4, 7);
  const Vector bins = frame_histogram(frame);
  CHECK(bins[7] == 16.0);
  CHECK(bins.sum() == 16.0);
}

TEST_CASE("frame_histogram matches the naive counting oracle") {
  SeededRng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const Gray8 frame = make_frame(8, 8, rng);
    CHECK(testutil::exact_equal(frame_histogram(frame), naive_histogram(frame)));
  }
}

TEST_CASE("frame_histogram rejects empty frames") {
  const Gray8 empty(0, 0);
  CHECK(testutil::thrown_code([&] { frame_histogram(empty); }) == Errc::empty_frame);
}

TEST_CASE("histogram conservation and permutation invariance") {
  SeededRng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(16));
    const int h = 1 + static_cast<int>(rng.below(16));
    Gray8 frame = make_frame(h, w, rng);
    const Vector bins = frame_histogram(frame);
    CHECK(bins.sum() == static_cast<double>(w * h));  // exact integer arithmetic
    CHECK((bins.array() >= 0.0).all());

    std::vector<std::uint8_t> shuffled(frame.data(), frame.data() + frame.size());
    rng.shuffle(shuffled);
    Gray8 permuted(h, w);
    std::copy(shuffled.begin(), shuffled.end(), permuted.data());
    CHECK(testutil::exact_equal(frame_histogram(permuted), bins));
  }
}

TEST_CASE("normalize_histogram basics") {
  Vector two = Vector::Zero(kHistogramBins);
  two[0] = 2.0;
  two[255] = 2.0;
  const Vector n = normalize_histogram(two);
  CHECK(n[0] == 0.5);
  CHECK(n[255] == 0.5);

  Vector hot = Vector::Zero(kHistogramBins);
  hot[7] = 16.0;
  CHECK(normalize_histogram(hot)[7] == 1.0);

  CHECK(testutil::thrown_code([&] { normalize_histogram(Vector::Zero(kHistogramBins)); }) ==
        Errc::zero_mass);
}

TEST_CASE("normalized rows sum to one within 1e-9") {
  SeededRng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Gray8 frame = make_frame(9, 13, rng);
    const Vector n = normalize_histogram(frame_histogram(frame));
    CHECK(std::abs(n.sum() - 1.0) < 1e-9);
    CHECK((n.array() >= 0.0).all());
  }
}

namespace {

FrameSequence ramp_video(int n_frames) {
  FrameSequence seq;
  seq.width = 4;
  seq.height = 4;
  seq.fps_num = 30;
  seq.fps_den = 1;
  for (int f = 0; f < n_frames; ++f) {
    seq.frames.push_back(Gray8::Constant(4, 4, static_cast<std::uint8_t>(f % 256)));
  }
  return seq;
}

}  // namespace

TEST_CASE("build_histogram_sequence: N == target is identity sampling") {
  const FrameSequence video = ramp_video(300);
  const HistogramSequence seq = build_histogram_sequence(video, "v");
  REQUIRE(seq.rows.rows() == 300);
  for (int i : {0, 17, 299}) {
    const Vector expect = normalize_histogram(frame_histogram(video.frames[i]));
    CHECK(testutil::exact_equal(seq.rows.row(i).transpose(), expect));
  }
}

TEST_CASE("build_histogram_sequence: N=600 picks every second frame") {
  const FrameSequence video = ramp_video(600);
  const HistogramSequence seq = build_histogram_sequence(video, "v");
  for (int i : {0, 1, 150, 299}) {
    const Vector expect = normalize_histogram(frame_histogram(video.frames[2 * i]));
    CHECK(testutil::exact_equal(seq.rows.row(i).transpose(), expect));
  }
}

TEST_CASE("build_histogram_sequence: N=100 pads with the last row") {
  const FrameSequence video = ramp_video(100);
  const HistogramSequence seq = build_histogram_sequence(video, "v");
  for (int i = 0; i < 100; ++i) {
    const Vector expect = normalize_histogram(frame_histogram(video.frames[i]));
    CHECK(testutil::exact_equal(seq.rows.row(i).transpose(), expect));
  }
  for (int i = 100; i < 300; ++i) {
    CHECK(testutil::exact_equal(seq.rows.row(i), seq.rows.row(99)));
  }
}

TEST_CASE("build_histogram_sequence rejects empty videos") {
  FrameSequence empty;
  empty.width = 4;
  empty.height = 4;
  empty.fps_num = 30;
  CHECK(testutil::thrown_code([&] { build_histogram_sequence(empty, "v"); }) ==
        Errc::empty_source);
}

TEST_CASE("chunk_sequence partitions losslessly") {
  SeededRng rng(23);
  HistogramSequence seq;
  seq.video_id = "v";
  seq.rows.resize(kSequenceLength, kHistogramBins);
  for (Eigen::Index i = 0; i < seq.rows.size(); ++i) seq.rows.data()[i] = rng.uniform01();

  const std::vector<Matrix> chunks = chunk_sequence(seq);
  REQUIRE(chunks.size() == 30);
  for (const Matrix& c : chunks) {
    CHECK(c.rows() == 10);
    CHECK(c.cols() == kHistogramBins);
  }

  Matrix glued(kSequenceLength, kHistogramBins);
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    glued.middleRows(static_cast<Eigen::Index>(k) * 10, 10) = chunks[k];
  }
  CHECK(testutil::exact_equal(glued, seq.rows));

  CHECK(testutil::exact_equal(chunks[3].row(0), seq.rows.row(30)));  // chunk 3 starts at row 30

  HistogramSequence ragged;
  ragged.rows.resize(7, kHistogramBins);
  CHECK(testutil::thrown_code([&] { chunk_sequence(ragged, 10); }) == Errc::shape_mismatch);
}

TEST_CASE("histogram files round-trip in both formats") {
  SeededRng rng(31);
  HistogramSequence seq;
  seq.video_id = "clip42";
  seq.rows.resize(kSequenceLength, kHistogramBins);
  for (Eigen::Index i = 0; i < seq.rows.size(); ++i) seq.rows.data()[i] = rng.uniform01();

  testutil::TempDir dir;
  save_histogram_json(seq, dir / "clip42.json");
  const HistogramSequence from_json = load_histogram_json(dir / "clip42.json");
  CHECK(from_json.video_id == seq.video_id);
  CHECK(testutil::exact_equal(from_json.rows, seq.rows));  // doubles survive JSON round-trip exactly

  save_histogram_fhs1(seq, dir / "clip42.fhs1");
  const HistogramSequence from_bin = load_histogram_fhs1(dir / "clip42.fhs1");
  CHECK(from_bin.video_id == "clip42");
  CHECK(testutil::exact_equal(from_bin.rows, seq.rows));

  testutil::write_file(dir / "bogus.fhs1", "NOPE");
  CHECK(testutil::thrown_code([&] { load_histogram_fhs1(dir / "bogus.fhs1"); }) ==
        Errc::missing_magic);
}
