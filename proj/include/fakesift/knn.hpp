#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fakesift/types.hpp"

namespace fakesift {

/// K-nearest-neighbors over z-score standardized features. Dimensions
/// with zero variance in the training data are excluded from distances.
struct KnnModel {
  int k = 5;
  Vector means;
  Vector stds;
  std::vector<std::uint8_t> active;  // 1 = dimension participates in distance
  Matrix points;                     // n x d, standardized rows
  std::vector<Label> labels;         // one per row
};

struct KnnPrediction {
  Label label = Label::real;
  double p_fake = 0.0;
};

/// k must be odd (no vote ties) and at most the number of training rows.
KnnModel knn_fit(const Matrix& features, const std::vector<Label>& labels, int k = 5);

/// Majority vote over the k nearest rows by Euclidean distance; ties in
/// distance go to the lower training-row index. p_fake = fake votes / k.
KnnPrediction knn_predict(const KnnModel& model, const Vector& raw_query);

// JSON: {"k":int,"means":[...],"stds":[...],"points":[{"x":[...],"label":"REAL"|"FAKE"}]}
void save_knn_model(const KnnModel& model, const std::filesystem::path& path);
KnnModel load_knn_model(const std::filesystem::path& path);

}  // namespace fakesift
