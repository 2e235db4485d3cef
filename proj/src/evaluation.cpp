#include "fakesift/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fakesift/rng.hpp"

namespace fakesift {

namespace {

int require_label(const Prediction& p) {
  if (!p.label) fail(Errc::missing_labels, "prediction for '" + p.video_id + "' has no label");
  const int y = *p.label;
  if (y != 0 && y != 1) fail(Errc::missing_labels, "label must be 0 or 1");
  return y;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) fail(Errc::io_error, "cannot format double");
  return std::string(buf, ptr);
}

}  // namespace

double log_loss(const std::vector<Prediction>& preds) {
  if (preds.empty()) fail(Errc::empty_input, "no predictions");
  double total = 0.0;
  for (const auto& p : preds) {
    const int y = require_label(p);
    const double clipped = std::clamp(p.p_fake, kLogLossClip, 1.0 - kLogLossClip);
    total += y == 1 ? -std::log(clipped) : -std::log(1.0 - clipped);
  }
  return total / static_cast<double>(preds.size());
}

double accuracy(const std::vector<Prediction>& preds, double threshold) {
  if (preds.empty()) fail(Errc::empty_input, "no predictions");
  long correct = 0;
  for (const auto& p : preds) {
    const int y = require_label(p);
    const bool called_fake = p.p_fake >= threshold;
    if (called_fake == (y == 1)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

EvalReport evaluate(const std::vector<Prediction>& preds, const std::string& model_tag,
                    double threshold) {
  EvalReport report;
  report.model_tag = model_tag;
  report.n = static_cast<long>(preds.size());
  report.accuracy = accuracy(preds, threshold);
  report.log_loss = fakesift::log_loss(preds);
  for (const auto& p : preds) {
    const bool is_fake = require_label(p) == 1;
    const bool called_fake = p.p_fake >= threshold;
    if (called_fake && is_fake) ++report.confusion.tp;
    else if (called_fake && !is_fake) ++report.confusion.fp;
    else if (!called_fake && !is_fake) ++report.confusion.tn;
    else ++report.confusion.fn;
  }
  return report;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["model_tag"] = report.model_tag;
  j["n"] = report.n;
  j["accuracy"] = report.accuracy;
  j["log_loss"] = report.log_loss;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"fp", report.confusion.fp},
                    {"tn", report.confusion.tn},
                    {"fn", report.confusion.fn}};
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

EvalReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }

  static const char* kKnown[] = {"model_tag", "n", "accuracy", "log_loss", "confusion"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return key == k; }) == std::end(kKnown)) {
      fail(Errc::malformed_report, path.string() + ": unknown field '" + key + "'");
    }
  }

  EvalReport report;
  try {
    report.model_tag = j.at("model_tag").get<std::string>();
    report.n = j.at("n").get<long>();
    report.accuracy = j.at("accuracy").get<double>();
    report.log_loss = j.at("log_loss").get<double>();
    const auto& c = j.at("confusion");
    for (const auto& [key, value] : c.items()) {
      if (key != "tp" && key != "fp" && key != "tn" && key != "fn") {
        fail(Errc::malformed_report, path.string() + ": unknown confusion field '" + key + "'");
      }
    }
    report.confusion.tp = c.at("tp").get<long>();
    report.confusion.fp = c.at("fp").get<long>();
    report.confusion.tn = c.at("tn").get<long>();
    report.confusion.fn = c.at("fn").get<long>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }
  const long sum = report.confusion.tp + report.confusion.fp + report.confusion.tn +
                   report.confusion.fn;
  if (sum != report.n) {
    fail(Errc::malformed_report,
         path.string() + ": confusion sums to " + std::to_string(sum) + ", n is " +
             std::to_string(report.n));
  }
  return report;
}

void write_predictions_csv(const std::vector<Prediction>& preds,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << "video_id,p_fake\n";
  for (const auto& p : preds) out << p.video_id << ',' << format_double(p.p_fake) << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

std::vector<Prediction> read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "video_id,p_fake") {
    fail(Errc::malformed_csv, path.string() + ": expected header 'video_id,p_fake'");
  }
  std::vector<Prediction> preds;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0) {
      fail(Errc::malformed_csv, path.string() + ":" + std::to_string(line_no) + ": missing comma");
    }
    Prediction p;
    p.video_id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    char* end = nullptr;
    p.p_fake = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      fail(Errc::malformed_csv,
           path.string() + ":" + std::to_string(line_no) + ": bad probability '" + value + "'");
    }
    if (!(p.p_fake >= 0.0 && p.p_fake <= 1.0)) {
      fail(Errc::malformed_csv,
           path.string() + ":" + std::to_string(line_no) + ": probability out of [0,1]");
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

SplitResult split_dataset(const DatasetManifest& manifest, std::array<double, 3> ratios,
                          std::uint64_t seed) {
  const double ratio_sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(ratio_sum - 1.0) > 1e-9) fail(Errc::bad_config, "split ratios must sum to 1");
  const std::size_t n = manifest.size();
  if (n == 0) fail(Errc::empty_dataset, "manifest holds no videos");

  // Global quota by largest remainder.
  long quota[3];
  double frac[3];
  long assigned_total = 0;
  for (int s = 0; s < 3; ++s) {
    const double ideal = ratios[s] * static_cast<double>(n);
    quota[s] = static_cast<long>(std::floor(ideal));
    frac[s] = ideal - static_cast<double>(quota[s]);
    assigned_total += quota[s];
  }
  for (long r = static_cast<long>(n) - assigned_total; r > 0; --r) {
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (frac[s] > frac[best]) best = s;
    }
    ++quota[best];
    frac[best] = -1.0;
  }

  // Group ids per label; map iteration gives a fixed label order.
  std::map<Label, std::vector<std::string>> by_label;
  for (const auto& [id, entry] : manifest.entries) by_label[entry.label].push_back(id);

  SplitResult result;
  std::vector<std::string>* outputs[3] = {&result.train, &result.val, &result.test};
  long assigned[3] = {0, 0, 0};
  for (auto& [label, ids] : by_label) {
    SeededRng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(ids);

    // Largest remainder per label; ties fall to the split with the largest
    // unmet global quota so totals land on the quota (this is what makes
    // 20 videos over two balanced labels come out 14/3/3).
    long counts[3];
    double fracs[3];
    long label_assigned = 0;
    for (int s = 0; s < 3; ++s) {
      const double ideal = ratios[s] * static_cast<double>(ids.size());
      counts[s] = static_cast<long>(std::floor(ideal));
      fracs[s] = ideal - static_cast<double>(counts[s]);
      label_assigned += counts[s];
    }
    for (long r = static_cast<long>(ids.size()) - label_assigned; r > 0; --r) {
      int best = -1;
      for (int s = 0; s < 3; ++s) {
        if (fracs[s] < 0.0) continue;
        if (best < 0) { best = s; continue; }
        const long deficit_s = quota[s] - (assigned[s] + counts[s]);
        const long deficit_b = quota[best] - (assigned[best] + counts[best]);
        if (fracs[s] > fracs[best] ||
            (fracs[s] == fracs[best] && deficit_s > deficit_b)) {
          best = s;
        }
      }
      ++counts[best];
      fracs[best] = -1.0;
    }

    std::size_t at = 0;
    for (int s = 0; s < 3; ++s) {
      for (long c = 0; c < counts[s]; ++c) outputs[s]->push_back(ids[at++]);
      assigned[s] += counts[s];
    }
  }

  if (result.train.empty() || result.val.empty() || result.test.empty()) {
    fail(Errc::too_few_videos, "a split came out empty; dataset has only " + std::to_string(n) +
                                   " videos for ratios " + format_double(ratios[0]) + "/" +
                                   format_double(ratios[1]) + "/" + format_double(ratios[2]));
  }
  return result;
}

void save_split(const SplitResult& split, const std::filesystem::path& path) {
  const nlohmann::ordered_json j{
      {"train", split.train}, {"val", split.val}, {"test", split.test}};
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

SplitResult load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    SplitResult split;
    split.train = j.at("train").get<std::vector<std::string>>();
    split.val = j.at("val").get<std::vector<std::string>>();
    split.test = j.at("test").get<std::vector<std::string>>();
    return split;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_report, path.string() + ": " + e.what());
  }
}

}  // namespace fakesift
