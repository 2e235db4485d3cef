#include "fakesift/knn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fakesift/error.hpp"

namespace fakesift {

namespace {

// Standardize one raw vector with the model's statistics; inactive
// (zero-variance) dimensions are pinned to 0 so they drop out of distances.
Vector standardize(const KnnModel& model, const Vector& raw) {
  Vector z = Vector::Zero(raw.size());
  for (Eigen::Index d = 0; d < raw.size(); ++d) {
    if (model.active[static_cast<std::size_t>(d)]) {
      z[d] = (raw[d] - model.means[d]) / model.stds[d];
    }
  }
  return z;
}

}  // namespace

KnnModel knn_fit(const Matrix& features, const std::vector<Label>& labels, int k) {
  const Eigen::Index n = features.rows();
  if (n == 0) fail(Errc::empty_training_set, "no training points");
  if (static_cast<std::size_t>(n) != labels.size()) {
    fail(Errc::shape_mismatch, "feature rows and labels disagree");
  }
  if (k < 1 || k % 2 == 0) fail(Errc::invalid_k, "k must be odd and positive, got " + std::to_string(k));
  if (k > n) {
    fail(Errc::k_too_large,
         "k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " training points");
  }

  KnnModel model;
  model.k = k;
  model.labels = labels;
  model.means = features.colwise().mean();
  model.stds = Vector::Zero(features.cols());
  model.active.assign(static_cast<std::size_t>(features.cols()), 0);
  for (Eigen::Index d = 0; d < features.cols(); ++d) {
    const double var = (features.col(d).array() - model.means[d]).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      model.stds[d] = sd;
      model.active[static_cast<std::size_t>(d)] = 1;
    } else {
      model.stds[d] = 0.0;  // constant dimension, excluded from distance
    }
  }

  model.points.resize(n, features.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    model.points.row(i) = standardize(model, features.row(i).transpose()).transpose();
  }
  return model;
}

KnnPrediction knn_predict(const KnnModel& model, const Vector& raw_query) {
  if (model.points.rows() == 0) fail(Errc::empty_training_set, "model is not fitted");
  if (raw_query.size() != model.points.cols()) {
    fail(Errc::shape_mismatch, "query has " + std::to_string(raw_query.size()) +
                                   " dimensions, model expects " +
                                   std::to_string(model.points.cols()));
  }

  const Vector q = standardize(model, raw_query);
  std::vector<std::pair<double, Eigen::Index>> by_distance;
  by_distance.reserve(static_cast<std::size_t>(model.points.rows()));
  for (Eigen::Index i = 0; i < model.points.rows(); ++i) {
    by_distance.emplace_back((model.points.row(i).transpose() - q).squaredNorm(), i);
  }
  // Ties resolve to the lower training-row index for reproducibility.
  std::sort(by_distance.begin(), by_distance.end());

  int fake_votes = 0;
  for (int j = 0; j < model.k; ++j) {
    if (model.labels[static_cast<std::size_t>(by_distance[static_cast<std::size_t>(j)].second)] ==
        Label::fake) {
      ++fake_votes;
    }
  }
  KnnPrediction pred;
  pred.p_fake = static_cast<double>(fake_votes) / model.k;
  pred.label = 2 * fake_votes > model.k ? Label::fake : Label::real;
  return pred;
}

void save_knn_model(const KnnModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["k"] = model.k;
  j["means"] = std::vector<double>(model.means.data(), model.means.data() + model.means.size());
  j["stds"] = std::vector<double>(model.stds.data(), model.stds.data() + model.stds.size());
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.points.rows(); ++i) {
    nlohmann::ordered_json row;
    row["x"] = std::vector<double>(model.points.row(i).begin(), model.points.row(i).end());
    row["label"] = label_name(model.labels[static_cast<std::size_t>(i)]);
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);

  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

KnnModel load_knn_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }

  KnnModel model;
  try {
    model.k = j.at("k").get<int>();
    const auto means = j.at("means").get<std::vector<double>>();
    const auto stds = j.at("stds").get<std::vector<double>>();
    if (means.size() != stds.size()) fail(Errc::shape_mismatch, "means/stds length mismatch");
    model.means = Eigen::Map<const Vector>(means.data(), static_cast<Eigen::Index>(means.size()));
    model.stds = Eigen::Map<const Vector>(stds.data(), static_cast<Eigen::Index>(stds.size()));
    model.active.resize(means.size());
    for (std::size_t d = 0; d < means.size(); ++d) model.active[d] = stds[d] > 0.0 ? 1 : 0;

    const auto& points = j.at("points");
    model.points.resize(static_cast<Eigen::Index>(points.size()),
                        static_cast<Eigen::Index>(means.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto x = points[i].at("x").get<std::vector<double>>();
      if (x.size() != means.size()) fail(Errc::shape_mismatch, "point dimension mismatch");
      for (std::size_t d = 0; d < x.size(); ++d) {
        model.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = x[d];
      }
      model.labels.push_back(parse_label(points[i].at("label").get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }
  if (model.k < 1 || model.k > model.points.rows()) {
    fail(Errc::k_too_large, path.string() + ": stored k is inconsistent");
  }
  return model;
}

}  // namespace fakesift
