#include "fakesift/histogram.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fakesift/error.hpp"

namespace fakesift {

namespace {

void put_u32_le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                         static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(bytes, 4);
}

std::uint32_t get_u32_le(std::istream& in, const std::string& what) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (in.gcount() != 4) fail(Errc::decode_error, "truncated " + what);
  return std::uint32_t(bytes[0]) | (std::uint32_t(bytes[1]) << 8) |
         (std::uint32_t(bytes[2]) << 16) | (std::uint32_t(bytes[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(bits >> (8 * i));
  out.write(bytes, 8);
}

double get_f64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (in.gcount() != 8) fail(Errc::decode_error, "truncated histogram payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(bytes[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

Vector frame_histogram(const Gray8& frame) {
  if (frame.size() == 0) fail(Errc::empty_frame, "cannot histogram an empty frame");
  Vector bins = Vector::Zero(kHistogramBins);
  const std::uint8_t* p = frame.data();
  const std::uint8_t* end = p + frame.size();
  for (; p != end; ++p) bins[*p] += 1.0;
  return bins;
}

Vector normalize_histogram(const Vector& raw) {
  const double mass = raw.sum();
  if (!(mass > 0.0)) fail(Errc::zero_mass, "histogram has no mass");
  return raw / mass;
}

HistogramSequence build_histogram_sequence(const FrameSequence& video,
                                           const std::string& video_id, int target_len) {
  const std::int64_t n = static_cast<std::int64_t>(video.frame_count());
  if (n == 0) fail(Errc::empty_source, "video has no frames");
  if (target_len < 1) fail(Errc::bad_config, "target_len must be >= 1");

  HistogramSequence seq;
  seq.video_id = video_id;
  seq.rows.resize(target_len, kHistogramBins);
  if (n >= target_len) {
    for (std::int64_t i = 0; i < target_len; ++i) {
      const auto frame_at = static_cast<std::size_t>(i * n / target_len);
      seq.rows.row(i) = normalize_histogram(frame_histogram(video.frames[frame_at])).transpose();
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      seq.rows.row(i) =
          normalize_histogram(frame_histogram(video.frames[static_cast<std::size_t>(i)]))
              .transpose();
    }
    for (std::int64_t i = n; i < target_len; ++i) seq.rows.row(i) = seq.rows.row(n - 1);
  }
  return seq;
}

std::vector<Matrix> chunk_sequence(const HistogramSequence& seq, int chunk_len) {
  if (chunk_len < 1 || seq.rows.rows() % chunk_len != 0) {
    fail(Errc::shape_mismatch, "sequence length " + std::to_string(seq.rows.rows()) +
                                   " is not divisible by chunk length " +
                                   std::to_string(chunk_len));
  }
  std::vector<Matrix> chunks;
  const auto n_chunks = seq.rows.rows() / chunk_len;
  chunks.reserve(static_cast<std::size_t>(n_chunks));
  for (Eigen::Index k = 0; k < n_chunks; ++k) {
    chunks.emplace_back(seq.rows.middleRows(k * chunk_len, chunk_len));
  }
  return chunks;
}

void save_histogram_json(const HistogramSequence& seq, const std::filesystem::path& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < seq.rows.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < seq.rows.cols(); ++j) row.push_back(seq.rows(i, j));
    rows.push_back(std::move(row));
  }
  nlohmann::json j{{"video_id", seq.video_id}, {"rows", std::move(rows)}};
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump() << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

HistogramSequence load_histogram_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::decode_error, path.string() + ": " + e.what());
  }
  HistogramSequence seq;
  try {
    seq.video_id = j.at("video_id").get<std::string>();
    const auto& rows = j.at("rows");
    if (!rows.is_array() || rows.empty()) fail(Errc::decode_error, "rows must be a non-empty array");
    seq.rows.resize(static_cast<Eigen::Index>(rows.size()), kHistogramBins);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (!row.is_array() || row.size() != kHistogramBins) {
        fail(Errc::shape_mismatch, "row " + std::to_string(i) + " does not hold " +
                                       std::to_string(kHistogramBins) + " bins");
      }
      for (std::size_t b = 0; b < row.size(); ++b) {
        seq.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) =
            row[b].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::decode_error, path.string() + ": " + e.what());
  }
  return seq;
}

void save_histogram_fhs1(const HistogramSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write("FHS1", 4);
  put_u32_le(out, static_cast<std::uint32_t>(seq.rows.rows()));
  put_u32_le(out, static_cast<std::uint32_t>(seq.rows.cols()));
  for (Eigen::Index i = 0; i < seq.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < seq.rows.cols(); ++j) put_f64_le(out, seq.rows(i, j));
  }
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

HistogramSequence load_histogram_fhs1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "FHS1", 4) != 0) {
    fail(Errc::missing_magic, path.string() + " is not an FHS1 file");
  }
  const std::uint32_t t = get_u32_le(in, "FHS1 header");
  const std::uint32_t bins = get_u32_le(in, "FHS1 header");
  if (t == 0 || bins == 0) fail(Errc::decode_error, path.string() + ": empty geometry");

  HistogramSequence seq;
  seq.video_id = path.stem().string();
  seq.rows.resize(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(bins));
  for (std::uint32_t i = 0; i < t; ++i) {
    for (std::uint32_t j = 0; j < bins; ++j) {
      seq.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = get_f64_le(in);
    }
  }
  return seq;
}

}  // namespace fakesift
