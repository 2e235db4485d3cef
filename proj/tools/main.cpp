// fakesift: synthetic-data driven deepfake screening pipelines.
//
// Subcommands: synth, extract, blinks, train, predict, evaluate.
// Every command records its resolved configuration next to its outputs;
// feeding that file back through --config reproduces the run byte for
// byte (explicit flags always win over config values).

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "fakesift/blink.hpp"
#include "fakesift/evaluation.hpp"
#include "fakesift/histogram.hpp"
#include "fakesift/knn.hpp"
#include "fakesift/manifest.hpp"
#include "fakesift/media_ingest.hpp"
#include "fakesift/parallel.hpp"
#include "fakesift/synth.hpp"
#include "fakesift/temporal_net.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Values from --config fill in flags the user did not pass.
class ConfigMerger {
 public:
  ConfigMerger(const CLI::App& app, const std::string& config_path) : app_(app) {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + config_path);
    try {
      in >> cfg_;
    } catch (const json::exception& e) {
      throw CLI::ValidationError("--config", std::string("bad JSON: ") + e.what());
    }
  }

  template <class T>
  void merge(const std::string& key, T& target) const {
    if (!cfg_.contains(key)) return;
    if (app_.count("--" + key) > 0) return;  // explicit flag wins
    try {
      target = cfg_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw CLI::ValidationError("--config", "key '" + key + "': " + e.what());
    }
  }

 private:
  const CLI::App& app_;
  json cfg_;
};

void write_run_config(const fs::path& path, const ordered_json& resolved) {
  std::ofstream out(path);
  if (!out) fakesift::fail(fakesift::Errc::io_error, "cannot write " + path.string());
  out << resolved.dump(2) << '\n';
}

fakesift::SourceDescriptor descriptor_for(const fs::path& video) {
  using fakesift::SourceKind;
  if (fs::is_directory(video)) return {SourceKind::png_dir, video, std::nullopt};
  const std::string ext = video.extension().string();
  if (ext == ".y4m") return {SourceKind::y4m, video, std::nullopt};
  if (ext == ".gray" || ext == ".raw") {
    return {SourceKind::raw_gray, video,
            fakesift::load_raw_sidecar(video.string() + ".json")};
  }
  fakesift::fail(fakesift::Errc::unsupported_format,
                 video.string() + ": unknown source type (expect .y4m, .gray or a PNG directory)");
}

// Per-video worker errors, reported together at the end of a command.
struct ErrorSummary {
  std::mutex mutex;
  std::vector<std::string> messages;

  void add(const std::string& id, const std::string& what) {
    std::lock_guard<std::mutex> lock(mutex);
    messages.push_back(id + ": " + what);
  }

  int report(const char* verb) {
    if (messages.empty()) return kExitOk;
    std::sort(messages.begin(), messages.end());
    std::cerr << messages.size() << " video(s) failed to " << verb << ":\n";
    for (const auto& m : messages) std::cerr << "  " << m << '\n';
    return kExitRuntime;
  }
};

double manifest_fps(const fakesift::ManifestEntry& entry) {
  return static_cast<double>(entry.fps_num) / static_cast<double>(entry.fps_den);
}

fakesift::HistogramSequence load_features_for(const fs::path& dir, const std::string& id) {
  const fs::path bin = dir / (id + ".fhs1");
  if (fs::exists(bin)) return fakesift::load_histogram_fhs1(bin);
  const fs::path txt = dir / (id + ".json");
  if (fs::exists(txt)) return fakesift::load_histogram_json(txt);
  fakesift::fail(fakesift::Errc::io_error,
                 "no histogram file for '" + id + "' under " + dir.string());
}

fakesift::BlinkFeatures blink_features_for(const fs::path& manifest_dir,
                                           const fakesift::ManifestEntry& entry,
                                           const fakesift::BlinkDetectParams& params,
                                           double fps_override) {
  if (entry.landmarks.empty()) {
    fakesift::fail(fakesift::Errc::bad_manifest, "entry has no landmarks path");
  }
  const auto frames = fakesift::parse_landmarks(manifest_dir / entry.landmarks);
  const double fps = fps_override > 0.0 ? fps_override : manifest_fps(entry);
  const fakesift::EarTrace trace = fakesift::ear_trace(frames, fps);
  return fakesift::blink_features(trace, fakesift::detect_blinks(trace, params));
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  int real = 0;
  int fake = 0;
  std::string out;
  std::uint64_t seed = 0;
  int threads = default_threads();
  int width = 64;
  int height = 64;
  int frames = 300;
  long fps_num = 30;
  long fps_den = 1;
  double gamma = 0.9;
  int checker_amp = 6;
  int checker_period = 2;
  double duration = 30.0;
  double real_rate = 4.8;
  double fake_rate = 2.2;
  std::string config;
};

int run_synth(SynthArgs& args, const CLI::App& app) {
  const ConfigMerger cfg(app, args.config);
  cfg.merge("real", args.real);
  cfg.merge("fake", args.fake);
  cfg.merge("out", args.out);
  cfg.merge("seed", args.seed);
  cfg.merge("threads", args.threads);
  cfg.merge("width", args.width);
  cfg.merge("height", args.height);
  cfg.merge("frames", args.frames);
  cfg.merge("fps-num", args.fps_num);
  cfg.merge("fps-den", args.fps_den);
  cfg.merge("gamma", args.gamma);
  cfg.merge("checker-amp", args.checker_amp);
  cfg.merge("checker-period", args.checker_period);
  cfg.merge("duration", args.duration);
  cfg.merge("real-rate", args.real_rate);
  cfg.merge("fake-rate", args.fake_rate);

  if (args.real < 1 || args.fake < 1) {
    throw CLI::ValidationError("--real/--fake", "need at least one video per label");
  }
  if (args.out.empty()) throw CLI::ValidationError("--out", "output directory is required");

  fakesift::DatasetSpec spec;
  spec.n_real = args.real;
  spec.n_fake = args.fake;
  spec.seed = args.seed;
  spec.video.width = args.width;
  spec.video.height = args.height;
  spec.video.n_frames = args.frames;
  spec.video.fps_num = args.fps_num;
  spec.video.fps_den = args.fps_den;
  spec.video.gamma = args.gamma;
  spec.video.checker_amp = args.checker_amp;
  spec.video.checker_period = args.checker_period;
  spec.real_trace.duration_s = args.duration;
  spec.real_trace.blink_rate_per_10s = args.real_rate;
  spec.real_trace.fps = static_cast<double>(args.fps_num) / static_cast<double>(args.fps_den);
  spec.fake_trace = spec.real_trace;
  spec.fake_trace.blink_rate_per_10s = args.fake_rate;

  const fs::path out_dir(args.out);
  fakesift::gen_dataset(spec, out_dir, args.threads);

  write_run_config(out_dir / "run_config.json",
                   ordered_json{{"real", args.real},
                                {"fake", args.fake},
                                {"out", args.out},
                                {"seed", args.seed},
                                {"width", args.width},
                                {"height", args.height},
                                {"frames", args.frames},
                                {"fps-num", args.fps_num},
                                {"fps-den", args.fps_den},
                                {"gamma", args.gamma},
                                {"checker-amp", args.checker_amp},
                                {"checker-period", args.checker_period},
                                {"duration", args.duration},
                                {"real-rate", args.real_rate},
                                {"fake-rate", args.fake_rate}});
  std::cout << (out_dir / "manifest.json").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string manifest;
  std::string out;
  std::string format = "bin";
  int threads = default_threads();
  std::string config;
};

int run_extract(ExtractArgs& args, const CLI::App& app) {
  const ConfigMerger cfg(app, args.config);
  cfg.merge("manifest", args.manifest);
  cfg.merge("out", args.out);
  cfg.merge("format", args.format);
  cfg.merge("threads", args.threads);

  if (args.manifest.empty()) throw CLI::ValidationError("--manifest", "required");
  if (args.out.empty()) throw CLI::ValidationError("--out", "required");
  if (args.format != "bin" && args.format != "json") {
    throw CLI::ValidationError("--format", "must be 'bin' or 'json'");
  }

  const fakesift::DatasetManifest manifest = fakesift::load_manifest(args.manifest);
  const fs::path manifest_dir = fs::path(args.manifest).parent_path();
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  std::vector<std::pair<std::string, fakesift::ManifestEntry>> jobs(manifest.entries.begin(),
                                                                    manifest.entries.end());
  ErrorSummary errors;
  fakesift::parallel_for(jobs.size(), args.threads, [&](std::size_t i) {
    const auto& [id, entry] = jobs[i];
    try {
      if (entry.video.empty()) {
        fakesift::fail(fakesift::Errc::bad_manifest, "entry has no video path");
      }
      const fakesift::FrameSequence video =
          fakesift::read_frames(descriptor_for(manifest_dir / entry.video));
      const fakesift::HistogramSequence seq = fakesift::build_histogram_sequence(video, id);
      if (args.format == "bin") {
        fakesift::save_histogram_fhs1(seq, out_dir / (id + ".fhs1"));
      } else {
        fakesift::save_histogram_json(seq, out_dir / (id + ".json"));
      }
    } catch (const std::exception& e) {
      errors.add(id, e.what());
    }
  });

  write_run_config(out_dir / "run_config.json",
                   ordered_json{{"manifest", args.manifest},
                                {"out", args.out},
                                {"format", args.format}});
  std::cout << "histograms for " << (jobs.size() - errors.messages.size()) << "/" << jobs.size()
            << " videos -> " << out_dir.string() << '\n';
  return errors.report("extract");
}

// ---------------------------------------------------------------------------
// blinks

struct BlinksArgs {
  std::string manifest;
  std::string out;
  double threshold = 0.2;
  int min_consec = 3;
  double fps = 0.0;  // 0 = per-entry manifest rate
  int threads = default_threads();
  std::string config;
};

int run_blinks(BlinksArgs& args, const CLI::App& app) {
  const ConfigMerger cfg(app, args.config);
  cfg.merge("manifest", args.manifest);
  cfg.merge("out", args.out);
  cfg.merge("threshold", args.threshold);
  cfg.merge("min-consec", args.min_consec);
  cfg.merge("fps", args.fps);
  cfg.merge("threads", args.threads);

  if (args.manifest.empty()) throw CLI::ValidationError("--manifest", "required");
  if (args.out.empty()) throw CLI::ValidationError("--out", "required");
  if (args.min_consec < 1) throw CLI::ValidationError("--min-consec", "must be >= 1");
  if (!(args.threshold > 0.0)) throw CLI::ValidationError("--threshold", "must be > 0");

  const fakesift::DatasetManifest manifest = fakesift::load_manifest(args.manifest);
  const fs::path manifest_dir = fs::path(args.manifest).parent_path();
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  const fakesift::BlinkDetectParams params{args.threshold, args.min_consec};
  std::vector<std::pair<std::string, fakesift::ManifestEntry>> jobs(manifest.entries.begin(),
                                                                    manifest.entries.end());
  ErrorSummary errors;
  fakesift::parallel_for(jobs.size(), args.threads, [&](std::size_t i) {
    const auto& [id, entry] = jobs[i];
    try {
      if (entry.landmarks.empty()) {
        fakesift::fail(fakesift::Errc::bad_manifest, "entry has no landmarks path");
      }
      const auto frames = fakesift::parse_landmarks(manifest_dir / entry.landmarks);
      const double fps = args.fps > 0.0 ? args.fps : manifest_fps(entry);
      const fakesift::EarTrace trace = fakesift::ear_trace(frames, fps);

      fakesift::BlinkReport report;
      report.video_id = id;
      report.fps = fps;
      report.params = params;
      report.blinks = fakesift::detect_blinks(trace, params);
      report.features = fakesift::blink_features(trace, report.blinks);
      fakesift::save_blink_report(report, out_dir / (id + ".blink.json"));
    } catch (const std::exception& e) {
      errors.add(id, e.what());
    }
  });

  write_run_config(out_dir / "run_config.json",
                   ordered_json{{"manifest", args.manifest},
                                {"out", args.out},
                                {"threshold", args.threshold},
                                {"min-consec", args.min_consec},
                                {"fps", args.fps}});
  std::cout << "blink reports for " << (jobs.size() - errors.messages.size()) << "/"
            << jobs.size() << " videos -> " << out_dir.string() << '\n';
  return errors.report("analyze");
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string model;
  std::string manifest;
  std::string features;
  std::string out;
  std::uint64_t seed = 0;
  int epochs = 50;
  int batch_size = 10;
  double learning_rate = 1e-3;
  double max_grad_norm = 5.0;
  int lstm_units = 64;
  int dense1_units = 128;
  int dense2_units = 64;
  int k = 5;
  double threshold = 0.2;
  int min_consec = 3;
  double fps = 0.0;
  int threads = default_threads();
  std::string config;
};

std::vector<fakesift::LabeledSequence> load_labeled_sequences(
    const fs::path& features, const fakesift::DatasetManifest& manifest,
    const std::vector<std::string>& ids) {
  std::vector<fakesift::LabeledSequence> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    fakesift::LabeledSequence item;
    item.seq = load_features_for(features, id);
    item.label = manifest.entries.at(id).label == fakesift::Label::fake ? 1 : 0;
    out.push_back(std::move(item));
  }
  return out;
}

int run_train(TrainArgs& args, const CLI::App& app) {
  const ConfigMerger cfg(app, args.config);
  cfg.merge("model", args.model);
  cfg.merge("manifest", args.manifest);
  cfg.merge("features", args.features);
  cfg.merge("out", args.out);
  cfg.merge("seed", args.seed);
  cfg.merge("epochs", args.epochs);
  cfg.merge("batch-size", args.batch_size);
  cfg.merge("learning-rate", args.learning_rate);
  cfg.merge("max-grad-norm", args.max_grad_norm);
  cfg.merge("lstm-units", args.lstm_units);
  cfg.merge("dense1-units", args.dense1_units);
  cfg.merge("dense2-units", args.dense2_units);
  cfg.merge("k", args.k);
  cfg.merge("threshold", args.threshold);
  cfg.merge("min-consec", args.min_consec);
  cfg.merge("fps", args.fps);
  cfg.merge("threads", args.threads);

  if (args.model != "hist-lstm" && args.model != "blink-knn") {
    throw CLI::ValidationError("--model", "must be 'hist-lstm' or 'blink-knn'");
  }
  if (args.manifest.empty()) throw CLI::ValidationError("--manifest", "required");
  if (args.out.empty()) throw CLI::ValidationError("--out", "required");
  if (args.model == "hist-lstm" && args.features.empty()) {
    throw CLI::ValidationError("--features", "hist-lstm needs a histogram directory");
  }

  const fakesift::DatasetManifest manifest = fakesift::load_manifest(args.manifest);
  const fs::path manifest_dir = fs::path(args.manifest).parent_path();
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  const fakesift::SplitResult split =
      fakesift::split_dataset(manifest, {0.70, 0.15, 0.15}, args.seed);
  fakesift::save_split(split, out_dir / "split.json");

  if (args.model == "hist-lstm") {
    const auto train_set = load_labeled_sequences(args.features, manifest, split.train);
    const auto val_set = load_labeled_sequences(args.features, manifest, split.val);

    fakesift::ModelConfig config;
    config.lstm_units = args.lstm_units;
    config.dense1_units = args.dense1_units;
    config.dense2_units = args.dense2_units;
    config.seed = args.seed;

    fakesift::TrainOptions options;
    options.epochs = args.epochs;
    options.batch_size = args.batch_size;
    options.learning_rate = args.learning_rate;
    options.max_grad_norm = args.max_grad_norm;
    options.threads = args.threads;

    const fakesift::TrainResult result =
        fakesift::train(train_set, val_set, config, options);
    fakesift::save_model(result.params, config, out_dir / "model.json");

    std::ofstream metrics(out_dir / "metrics.csv");
    metrics << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (const auto& m : result.history) {
      metrics << m.epoch << ',' << format_double(m.train_loss) << ','
              << format_double(m.train_accuracy) << ',' << format_double(m.val_loss) << ','
              << format_double(m.val_accuracy) << '\n';
    }

    const auto& last = result.history.back();
    std::cout << "hist-lstm: epoch " << last.epoch << " train_loss "
              << format_double(last.train_loss) << " val_acc "
              << format_double(last.val_accuracy) << '\n';
  } else {
    const fakesift::BlinkDetectParams params{args.threshold, args.min_consec};
    auto features_of = [&](const std::vector<std::string>& ids) {
      fakesift::Matrix x(static_cast<Eigen::Index>(ids.size()), 4);
      std::vector<fakesift::Label> y;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& entry = manifest.entries.at(ids[i]);
        x.row(static_cast<Eigen::Index>(i)) =
            blink_features_for(manifest_dir, entry, params, args.fps).vector().transpose();
        y.push_back(entry.label);
      }
      return std::make_pair(std::move(x), std::move(y));
    };

    const auto [train_x, train_y] = features_of(split.train);
    const fakesift::KnnModel model = fakesift::knn_fit(train_x, train_y, args.k);
    fakesift::save_knn_model(model, out_dir / "model.json");

    const auto [val_x, val_y] = features_of(split.val);
    std::vector<fakesift::Prediction> val_preds;
    for (Eigen::Index i = 0; i < val_x.rows(); ++i) {
      const auto pred = fakesift::knn_predict(model, val_x.row(i).transpose());
      val_preds.push_back({split.val[static_cast<std::size_t>(i)], pred.p_fake,
                           val_y[static_cast<std::size_t>(i)] == fakesift::Label::fake ? 1 : 0});
    }
    std::cout << "blink-knn: val_acc " << format_double(fakesift::accuracy(val_preds))
              << " val_log_loss " << format_double(fakesift::log_loss(val_preds)) << '\n';
  }

  write_run_config(out_dir / "run_config.json",
                   ordered_json{{"model", args.model},
                                {"manifest", args.manifest},
                                {"features", args.features},
                                {"out", args.out},
                                {"seed", args.seed},
                                {"epochs", args.epochs},
                                {"batch-size", args.batch_size},
                                {"learning-rate", args.learning_rate},
                                {"max-grad-norm", args.max_grad_norm},
                                {"lstm-units", args.lstm_units},
                                {"dense1-units", args.dense1_units},
                                {"dense2-units", args.dense2_units},
                                {"k", args.k},
                                {"threshold", args.threshold},
                                {"min-consec", args.min_consec},
                                {"fps", args.fps}});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string model_file;
  std::string manifest;
  std::string features;
  std::string out;
  std::string split_file;
  std::string split = "all";
  double threshold = 0.2;
  int min_consec = 3;
  double fps = 0.0;
  int threads = default_threads();
  std::string config;
};

int run_predict(PredictArgs& args, const CLI::App& app) {
  const ConfigMerger cfg(app, args.config);
  cfg.merge("model-file", args.model_file);
  cfg.merge("manifest", args.manifest);
  cfg.merge("features", args.features);
  cfg.merge("out", args.out);
  cfg.merge("split-file", args.split_file);
  cfg.merge("split", args.split);
  cfg.merge("threshold", args.threshold);
  cfg.merge("min-consec", args.min_consec);
  cfg.merge("fps", args.fps);
  cfg.merge("threads", args.threads);

  if (args.model_file.empty()) throw CLI::ValidationError("--model-file", "required");
  if (args.manifest.empty()) throw CLI::ValidationError("--manifest", "required");
  if (args.out.empty()) throw CLI::ValidationError("--out", "required");
  if (args.split != "all" && args.split_file.empty()) {
    throw CLI::ValidationError("--split", "needs --split-file");
  }

  const fakesift::DatasetManifest manifest = fakesift::load_manifest(args.manifest);
  const fs::path manifest_dir = fs::path(args.manifest).parent_path();

  std::vector<std::string> ids;
  if (args.split == "all") {
    for (const auto& [id, entry] : manifest.entries) ids.push_back(id);
  } else {
    const fakesift::SplitResult split = fakesift::load_split(args.split_file);
    if (args.split == "train") ids = split.train;
    else if (args.split == "val") ids = split.val;
    else if (args.split == "test") ids = split.test;
    else throw CLI::ValidationError("--split", "must be all|train|val|test");
    std::sort(ids.begin(), ids.end());
  }

  // The model file announces its own kind: "fsv1" marks the recurrent
  // histogram model, the KNN schema has no format tag.
  json probe;
  {
    std::ifstream in(args.model_file);
    if (!in) fakesift::fail(fakesift::Errc::io_error, "cannot open " + args.model_file);
    try {
      in >> probe;
    } catch (const json::exception& e) {
      fakesift::fail(fakesift::Errc::decode_error, args.model_file + ": " + e.what());
    }
  }

  std::vector<fakesift::Prediction> preds(ids.size());
  if (probe.contains("format")) {
    if (args.features.empty()) {
      throw CLI::ValidationError("--features", "hist-lstm needs a histogram directory");
    }
    const auto [config, params] = fakesift::load_model(args.model_file);
    fakesift::parallel_for(ids.size(), args.threads, [&](std::size_t i) {
      const fakesift::HistogramSequence seq = load_features_for(args.features, ids[i]);
      preds[i] = {ids[i], fakesift::predict_video(params, config, seq), std::nullopt};
    });
  } else {
    const fakesift::KnnModel model = fakesift::load_knn_model(args.model_file);
    const fakesift::BlinkDetectParams params{args.threshold, args.min_consec};
    fakesift::parallel_for(ids.size(), args.threads, [&](std::size_t i) {
      const auto& entry = manifest.entries.at(ids[i]);
      const auto features = blink_features_for(manifest_dir, entry, params, args.fps);
      preds[i] = {ids[i], fakesift::knn_predict(model, features.vector()).p_fake, std::nullopt};
    });
  }

  fakesift::write_predictions_csv(preds, args.out);
  write_run_config(args.out + ".run.json",
                   ordered_json{{"model-file", args.model_file},
                                {"manifest", args.manifest},
                                {"features", args.features},
                                {"out", args.out},
                                {"split-file", args.split_file},
                                {"split", args.split},
                                {"threshold", args.threshold},
                                {"min-consec", args.min_consec},
                                {"fps", args.fps}});
  std::cout << preds.size() << " predictions -> " << args.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string predictions;
  std::string manifest;
  std::string out;
  std::string scores_out;
  std::string model_tag = "model";
  double threshold = 0.5;
  std::string config;
};

int run_evaluate(EvaluateArgs& args, const CLI::App& app) {
  const ConfigMerger cfg(app, args.config);
  cfg.merge("predictions", args.predictions);
  cfg.merge("manifest", args.manifest);
  cfg.merge("out", args.out);
  cfg.merge("scores-out", args.scores_out);
  cfg.merge("model-tag", args.model_tag);
  cfg.merge("threshold", args.threshold);

  if (args.predictions.empty()) throw CLI::ValidationError("--predictions", "required");
  if (args.manifest.empty()) throw CLI::ValidationError("--manifest", "required");
  if (args.out.empty()) throw CLI::ValidationError("--out", "required");
  if (args.scores_out.empty()) args.scores_out = args.out + ".scores.dat";

  const fakesift::DatasetManifest manifest = fakesift::load_manifest(args.manifest);
  std::vector<fakesift::Prediction> preds = fakesift::read_predictions_csv(args.predictions);
  for (auto& p : preds) {
    const auto it = manifest.entries.find(p.video_id);
    if (it == manifest.entries.end()) {
      fakesift::fail(fakesift::Errc::unknown_video_id,
                     "prediction for '" + p.video_id + "' has no manifest entry");
    }
    p.label = it->second.label == fakesift::Label::fake ? 1 : 0;
  }

  const fakesift::EvalReport report = fakesift::evaluate(preds, args.model_tag, args.threshold);
  fakesift::write_report(report, args.out);

  // Score histogram, 20 bins over [0, 1]; ready for `gnuplot ... using 1:2`.
  constexpr int kBins = 20;
  long total[kBins] = {};
  long real[kBins] = {};
  long fake[kBins] = {};
  for (const auto& p : preds) {
    int bin = static_cast<int>(p.p_fake * kBins);
    if (bin == kBins) bin = kBins - 1;
    ++total[bin];
    ++(*p.label == 1 ? fake : real)[bin];
  }
  std::ofstream scores(args.scores_out);
  if (!scores) fakesift::fail(fakesift::Errc::io_error, "cannot write " + args.scores_out);
  scores << "# p_fake score histogram\n# bin_center total real fake\n";
  for (int b = 0; b < kBins; ++b) {
    scores << format_double((b + 0.5) / kBins) << ' ' << total[b] << ' ' << real[b] << ' '
           << fake[b] << '\n';
  }

  write_run_config(args.out + ".run.json",
                   ordered_json{{"predictions", args.predictions},
                                {"manifest", args.manifest},
                                {"out", args.out},
                                {"scores-out", args.scores_out},
                                {"model-tag", args.model_tag},
                                {"threshold", args.threshold}});
  std::cout << "n " << report.n << " accuracy " << format_double(report.accuracy)
            << " log_loss " << format_double(report.log_loss) << " -> " << args.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepfake screening toolkit: synthetic data, histogram and blink pipelines"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  synth->add_option("--real", synth_args.real, "number of real videos");
  synth->add_option("--fake", synth_args.fake, "number of fake videos");
  synth->add_option("--out", synth_args.out, "output directory");
  synth->add_option("--seed", synth_args.seed, "master seed");
  synth->add_option("--threads", synth_args.threads, "worker threads");
  synth->add_option("--width", synth_args.width, "frame width");
  synth->add_option("--height", synth_args.height, "frame height");
  synth->add_option("--frames", synth_args.frames, "frames per video");
  synth->add_option("--fps-num", synth_args.fps_num, "frame rate numerator");
  synth->add_option("--fps-den", synth_args.fps_den, "frame rate denominator");
  synth->add_option("--gamma", synth_args.gamma, "fake tonal shift exponent");
  synth->add_option("--checker-amp", synth_args.checker_amp, "fake checkerboard amplitude");
  synth->add_option("--checker-period", synth_args.checker_period, "checkerboard period, px");
  synth->add_option("--duration", synth_args.duration, "landmark trace seconds");
  synth->add_option("--real-rate", synth_args.real_rate, "real blinks per 10 s");
  synth->add_option("--fake-rate", synth_args.fake_rate, "fake blinks per 10 s");
  synth->add_option("--config", synth_args.config, "JSON config mirroring these flags");

  ExtractArgs extract_args;
  CLI::App* extract = app.add_subcommand("extract", "histogram sequences from videos");
  extract->add_option("--manifest", extract_args.manifest, "dataset manifest");
  extract->add_option("--out", extract_args.out, "output directory");
  extract->add_option("--format", extract_args.format, "bin (FHS1) or json");
  extract->add_option("--threads", extract_args.threads, "worker threads");
  extract->add_option("--config", extract_args.config, "JSON config mirroring these flags");

  BlinksArgs blinks_args;
  CLI::App* blinks = app.add_subcommand("blinks", "blink reports from landmark streams");
  blinks->add_option("--manifest", blinks_args.manifest, "dataset manifest");
  blinks->add_option("--out", blinks_args.out, "output directory");
  blinks->add_option("--threshold", blinks_args.threshold, "closed-eye EAR threshold");
  blinks->add_option("--min-consec", blinks_args.min_consec, "minimum closed frames per blink");
  blinks->add_option("--fps", blinks_args.fps, "override manifest frame rate");
  blinks->add_option("--threads", blinks_args.threads, "worker threads");
  blinks->add_option("--config", blinks_args.config, "JSON config mirroring these flags");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "fit a classifier on a 70/15/15 split");
  train->add_option("--model", train_args.model, "hist-lstm or blink-knn");
  train->add_option("--manifest", train_args.manifest, "dataset manifest");
  train->add_option("--features", train_args.features, "histogram directory (hist-lstm)");
  train->add_option("--out", train_args.out, "output directory");
  train->add_option("--seed", train_args.seed, "split/init/shuffle seed");
  train->add_option("--epochs", train_args.epochs, "training epochs");
  train->add_option("--batch-size", train_args.batch_size, "videos per optimizer step");
  train->add_option("--learning-rate", train_args.learning_rate, "Adam step size");
  train->add_option("--max-grad-norm", train_args.max_grad_norm,
                    "gradient clip by global norm, 0 disables");
  train->add_option("--lstm-units", train_args.lstm_units, "recurrent width");
  train->add_option("--dense1-units", train_args.dense1_units, "first dense width");
  train->add_option("--dense2-units", train_args.dense2_units, "second dense width");
  train->add_option("--k", train_args.k, "neighbor count (blink-knn)");
  train->add_option("--threshold", train_args.threshold, "EAR threshold (blink-knn)");
  train->add_option("--min-consec", train_args.min_consec, "blink run length (blink-knn)");
  train->add_option("--fps", train_args.fps, "override manifest frame rate (blink-knn)");
  train->add_option("--threads", train_args.threads, "worker threads");
  train->add_option("--config", train_args.config, "JSON config mirroring these flags");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "score videos with a trained model");
  predict->add_option("--model-file", predict_args.model_file, "model JSON from train");
  predict->add_option("--manifest", predict_args.manifest, "dataset manifest");
  predict->add_option("--features", predict_args.features, "histogram directory (hist-lstm)");
  predict->add_option("--out", predict_args.out, "predictions CSV path");
  predict->add_option("--split-file", predict_args.split_file, "split JSON from train");
  predict->add_option("--split", predict_args.split, "all|train|val|test");
  predict->add_option("--threshold", predict_args.threshold, "EAR threshold (blink-knn)");
  predict->add_option("--min-consec", predict_args.min_consec, "blink run length (blink-knn)");
  predict->add_option("--fps", predict_args.fps, "override manifest frame rate (blink-knn)");
  predict->add_option("--threads", predict_args.threads, "worker threads");
  predict->add_option("--config", predict_args.config, "JSON config mirroring these flags");

  EvaluateArgs evaluate_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions against labels");
  evaluate->add_option("--predictions", evaluate_args.predictions, "predictions CSV");
  evaluate->add_option("--manifest", evaluate_args.manifest, "dataset manifest with labels");
  evaluate->add_option("--out", evaluate_args.out, "report JSON path");
  evaluate->add_option("--scores-out", evaluate_args.scores_out, "score histogram data file");
  evaluate->add_option("--model-tag", evaluate_args.model_tag, "tag recorded in the report");
  evaluate->add_option("--threshold", evaluate_args.threshold, "decision threshold");
  evaluate->add_option("--config", evaluate_args.config, "JSON config mirroring these flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args, *synth);
    if (extract->parsed()) return run_extract(extract_args, *extract);
    if (blinks->parsed()) return run_blinks(blinks_args, *blinks);
    if (train->parsed()) return run_train(train_args, *train);
    if (predict->parsed()) return run_predict(predict_args, *predict);
    if (evaluate->parsed()) return run_evaluate(evaluate_args, *evaluate);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const fakesift::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
