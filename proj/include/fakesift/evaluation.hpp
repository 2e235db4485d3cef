#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fakesift/manifest.hpp"
#include "fakesift/types.hpp"

namespace fakesift {

struct Prediction {
  std::string video_id;
  double p_fake = 0.5;
  std::optional<int> label;  // 1 = fake
};

/// Clipping applied before every logarithm in log_loss.
inline constexpr double kLogLossClip = 1e-15;

/// Mean of -[y ln p + (1-y) ln(1-p)] with p clamped to
/// [kLogLossClip, 1 - kLogLossClip]. All predictions need labels.
double log_loss(const std::vector<Prediction>& preds);

/// Fraction where (p_fake >= threshold) matches the label; p exactly at
/// the threshold counts as a FAKE call.
double accuracy(const std::vector<Prediction>& preds, double threshold = 0.5);

struct Confusion {
  long tp = 0;  // predicted fake, is fake
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

struct EvalReport {
  std::string model_tag;
  long n = 0;
  double accuracy = 0.0;
  double log_loss = 0.0;
  Confusion confusion;
};

EvalReport evaluate(const std::vector<Prediction>& preds, const std::string& model_tag,
                    double threshold = 0.5);

// Strict JSON round-trip; unknown fields and confusion sums that do not
// add up to n are rejected on read.
void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

// Submission-shaped CSV: header "video_id,p_fake", one row per video,
// probabilities serialized with round-trip precision.
void write_predictions_csv(const std::vector<Prediction>& preds,
                           const std::filesystem::path& path);
std::vector<Prediction> read_predictions_csv(const std::filesystem::path& path);

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Stratified split: per-label seeded shuffle, then contiguous slices
/// sized by largest remainder (global deficits break ties), keeping every
/// label within one video of its exact ratio. Throws if a split is empty.
SplitResult split_dataset(const DatasetManifest& manifest,
                          std::array<double, 3> ratios = {0.70, 0.15, 0.15},
                          std::uint64_t seed = 0);

void save_split(const SplitResult& split, const std::filesystem::path& path);
SplitResult load_split(const std::filesystem::path& path);

}  // namespace fakesift
