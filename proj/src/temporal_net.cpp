#include "fakesift/temporal_net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "fakesift/parallel.hpp"
#include "fakesift/rng.hpp"

namespace fakesift {

namespace {

void check_config(const ModelConfig& c) {
  if (c.input_dim < 1 || c.lstm_units < 1 || c.dense1_units < 1 || c.dense2_units < 1 ||
      c.chunk_len < 1 || c.chunks_per_video < 1) {
    fail(Errc::bad_config, "all model dimensions must be >= 1");
  }
}

double glorot_limit(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void fill_glorot(Matrix& w, Eigen::Index fan_in, Eigen::Index fan_out, SeededRng& rng) {
  const double limit = glorot_limit(fan_in, fan_out);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
  }
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

template <class F>
void zip_tensors(ModelParams& a, const ModelParams& b, F&& f) {
  f(a.lstm_kernel, b.lstm_kernel);
  f(a.lstm_recurrent, b.lstm_recurrent);
  f(a.lstm_bias, b.lstm_bias);
  f(a.dense1_w, b.dense1_w);
  f(a.dense1_b, b.dense1_b);
  f(a.dense2_w, b.dense2_w);
  f(a.dense2_b, b.dense2_b);
  f(a.output_w, b.output_w);
  f(a.output_b, b.output_b);
}

void add_inplace(ModelParams& a, const ModelParams& b) {
  zip_tensors(a, b, [](auto& x, const auto& y) { x += y; });
}

// One recurrent step plus cache bookkeeping; both forward drivers funnel
// through here so chunked and unchunked passes run identical operations.
void step_row(const ModelParams& params, const ModelConfig& config, LstmState& state,
              const Eigen::Ref<const Vector>& x, ForwardCache& cache, Eigen::Index t) {
  const Eigen::Index units = config.lstm_units;
  Vector z = params.lstm_bias;
  z.noalias() += params.lstm_kernel * x;
  z.noalias() += params.lstm_recurrent * state.h;

  Vector gi(units), gf(units), gg(units), go(units);
  for (Eigen::Index u = 0; u < units; ++u) {
    gi[u] = sigmoid(z[u]);
    gf[u] = sigmoid(z[units + u]);
    gg[u] = std::tanh(z[2 * units + u]);
    go[u] = sigmoid(z[3 * units + u]);
  }

  state.c = gf.cwiseProduct(state.c) + gi.cwiseProduct(gg);
  Vector c_tanh(units);
  for (Eigen::Index u = 0; u < units; ++u) c_tanh[u] = std::tanh(state.c[u]);
  state.h = go.cwiseProduct(c_tanh);

  cache.inputs.row(t) = x.transpose();
  cache.gate_i.row(t) = gi.transpose();
  cache.gate_f.row(t) = gf.transpose();
  cache.gate_g.row(t) = gg.transpose();
  cache.gate_o.row(t) = go.transpose();
  cache.cells.row(t) = state.c.transpose();
  cache.hidden.row(t) = state.h.transpose();
}

void run_dense_head(const ModelParams& params, ForwardCache& cache) {
  const Vector h_last = cache.hidden.row(cache.hidden.rows() - 1).transpose();
  cache.z1 = params.dense1_b;
  cache.z1.noalias() += params.dense1_w * h_last;
  cache.a1 = cache.z1.cwiseMax(0.0);
  cache.z2 = params.dense2_b;
  cache.z2.noalias() += params.dense2_w * cache.a1;
  cache.a2 = cache.z2.cwiseMax(0.0);
  cache.logit = params.output_w.dot(cache.a2) + params.output_b[0];
  cache.p_fake = sigmoid(cache.logit);
}

ForwardCache make_cache(const ModelConfig& config) {
  const Eigen::Index t = config.sequence_len();
  const Eigen::Index u = config.lstm_units;
  ForwardCache cache;
  cache.inputs.resize(t, config.input_dim);
  cache.gate_i.resize(t, u);
  cache.gate_f.resize(t, u);
  cache.gate_g.resize(t, u);
  cache.gate_o.resize(t, u);
  cache.cells.resize(t, u);
  cache.hidden.resize(t, u);
  return cache;
}

}  // namespace

bool operator==(const ModelConfig& a, const ModelConfig& b) {
  return a.input_dim == b.input_dim && a.lstm_units == b.lstm_units &&
         a.dense1_units == b.dense1_units && a.dense2_units == b.dense2_units &&
         a.chunk_len == b.chunk_len && a.chunks_per_video == b.chunks_per_video &&
         a.seed == b.seed;
}

ModelParams zeros_like(const ModelConfig& config) {
  check_config(config);
  ModelParams p;
  p.lstm_kernel = Matrix::Zero(4 * config.lstm_units, config.input_dim);
  p.lstm_recurrent = Matrix::Zero(4 * config.lstm_units, config.lstm_units);
  p.lstm_bias = Vector::Zero(4 * config.lstm_units);
  p.dense1_w = Matrix::Zero(config.dense1_units, config.lstm_units);
  p.dense1_b = Vector::Zero(config.dense1_units);
  p.dense2_w = Matrix::Zero(config.dense2_units, config.dense1_units);
  p.dense2_b = Vector::Zero(config.dense2_units);
  p.output_w = Vector::Zero(config.dense2_units);
  p.output_b = Vector::Zero(1);
  return p;
}

ModelParams init_params(const ModelConfig& config) {
  ModelParams p = zeros_like(config);
  SeededRng rng(derive_seed(config.seed, 0x1A17u));

  fill_glorot(p.lstm_kernel, config.input_dim, 4 * config.lstm_units, rng);
  fill_glorot(p.lstm_recurrent, config.lstm_units, 4 * config.lstm_units, rng);
  // Forget-gate bias starts at 1 so gradients flow through long sequences.
  p.lstm_bias.segment(config.lstm_units, config.lstm_units).setOnes();
  fill_glorot(p.dense1_w, config.lstm_units, config.dense1_units, rng);
  fill_glorot(p.dense2_w, config.dense1_units, config.dense2_units, rng);
  const double limit = glorot_limit(config.dense2_units, 1);
  for (Eigen::Index d = 0; d < p.output_w.size(); ++d) p.output_w[d] = rng.uniform(-limit, limit);
  return p;
}

LstmState zero_state(const ModelConfig& config) {
  return {Vector::Zero(config.lstm_units), Vector::Zero(config.lstm_units)};
}

Vector lstm_step(const ModelParams& params, const ModelConfig& config, LstmState& state,
                 const Vector& x) {
  if (x.size() != config.input_dim || state.h.size() != config.lstm_units) {
    fail(Errc::shape_mismatch, "lstm_step input/state sizes do not match config");
  }
  ModelConfig one_row = config;
  one_row.chunk_len = 1;
  one_row.chunks_per_video = 1;
  ForwardCache scratch = make_cache(one_row);
  step_row(params, config, state, x, scratch, 0);
  return state.h;
}

ForwardCache forward_video(const ModelParams& params, const ModelConfig& config,
                           const HistogramSequence& seq) {
  if (seq.rows.rows() != config.sequence_len() || seq.rows.cols() != config.input_dim) {
    fail(Errc::shape_mismatch, "sequence is " + std::to_string(seq.rows.rows()) + "x" +
                                   std::to_string(seq.rows.cols()) + ", config wants " +
                                   std::to_string(config.sequence_len()) + "x" +
                                   std::to_string(config.input_dim));
  }
  ForwardCache cache = make_cache(config);
  LstmState state = zero_state(config);
  for (Eigen::Index t = 0; t < seq.rows.rows(); ++t) {
    step_row(params, config, state, seq.rows.row(t).transpose(), cache, t);
  }
  run_dense_head(params, cache);
  return cache;
}

ForwardCache forward_chunks(const ModelParams& params, const ModelConfig& config,
                            std::span<const Matrix> chunks) {
  if (static_cast<int>(chunks.size()) != config.chunks_per_video) {
    fail(Errc::shape_mismatch, "expected " + std::to_string(config.chunks_per_video) +
                                   " chunks, got " + std::to_string(chunks.size()));
  }
  ForwardCache cache = make_cache(config);
  LstmState state = zero_state(config);  // reset once per video, then carried
  Eigen::Index t = 0;
  for (const Matrix& chunk : chunks) {
    if (chunk.rows() != config.chunk_len || chunk.cols() != config.input_dim) {
      fail(Errc::shape_mismatch, "chunk has wrong shape");
    }
    for (Eigen::Index r = 0; r < chunk.rows(); ++r, ++t) {
      step_row(params, config, state, chunk.row(r).transpose(), cache, t);
    }
  }
  run_dense_head(params, cache);
  return cache;
}

double bce_loss(double p_fake, int label) {
  if (!(p_fake > 0.0 && p_fake < 1.0)) fail(Errc::bad_config, "probability must be in (0,1)");
  if (label != 0 && label != 1) fail(Errc::bad_config, "label must be 0 or 1");
  return label == 1 ? -std::log(p_fake) : -std::log(1.0 - p_fake);
}

ModelParams backward_video(const ModelParams& params, const ModelConfig& config,
                           const ForwardCache& cache, int label) {
  const Eigen::Index units = config.lstm_units;
  const Eigen::Index steps = cache.hidden.rows();
  ModelParams grad = zeros_like(config);

  // Dense head. d(loss)/d(logit) for sigmoid + BCE collapses to p - y.
  const double dlogit = cache.p_fake - static_cast<double>(label);
  grad.output_w = dlogit * cache.a2;
  grad.output_b[0] = dlogit;

  Vector da2 = dlogit * params.output_w;
  Vector dz2 = (cache.z2.array() > 0.0).select(da2, 0.0);
  grad.dense2_w.noalias() = dz2 * cache.a1.transpose();
  grad.dense2_b = dz2;

  Vector da1 = params.dense2_w.transpose() * dz2;
  Vector dz1 = (cache.z1.array() > 0.0).select(da1, 0.0);
  const Vector h_last = cache.hidden.row(steps - 1).transpose();
  grad.dense1_w.noalias() = dz1 * h_last.transpose();
  grad.dense1_b = dz1;

  // Backpropagation through time.
  Vector dh = params.dense1_w.transpose() * dz1;
  Vector dc = Vector::Zero(units);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Vector gi = cache.gate_i.row(t).transpose();
    const Vector gf = cache.gate_f.row(t).transpose();
    const Vector gg = cache.gate_g.row(t).transpose();
    const Vector go = cache.gate_o.row(t).transpose();
    const Vector c_t = cache.cells.row(t).transpose();
    const Vector c_tanh = c_t.array().tanh();
    const Vector c_prev =
        t > 0 ? Vector(cache.cells.row(t - 1).transpose()) : Vector(Vector::Zero(units));
    const Vector h_prev =
        t > 0 ? Vector(cache.hidden.row(t - 1).transpose()) : Vector(Vector::Zero(units));

    const Vector d_go = dh.cwiseProduct(c_tanh);
    dc += dh.cwiseProduct(go).cwiseProduct((1.0 - c_tanh.array().square()).matrix());

    const Vector d_gi = dc.cwiseProduct(gg);
    const Vector d_gg = dc.cwiseProduct(gi);
    const Vector d_gf = dc.cwiseProduct(c_prev);

    Vector dz(4 * units);
    dz.segment(0, units) = d_gi.cwiseProduct(gi).cwiseProduct((1.0 - gi.array()).matrix());
    dz.segment(units, units) = d_gf.cwiseProduct(gf).cwiseProduct((1.0 - gf.array()).matrix());
    dz.segment(2 * units, units) = d_gg.cwiseProduct((1.0 - gg.array().square()).matrix());
    dz.segment(3 * units, units) = d_go.cwiseProduct(go).cwiseProduct((1.0 - go.array()).matrix());

    grad.lstm_kernel.noalias() += dz * cache.inputs.row(t);
    grad.lstm_recurrent.noalias() += dz * h_prev.transpose();
    grad.lstm_bias += dz;

    dh.noalias() = params.lstm_recurrent.transpose() * dz;
    dc = dc.cwiseProduct(gf);
  }
  return grad;
}

AdamState make_adam(const ModelConfig& config, double learning_rate) {
  AdamState state;
  state.m = zeros_like(config);
  state.v = zeros_like(config);
  state.learning_rate = learning_rate;
  return state;
}

void adam_update(ModelParams& params, const ModelParams& grad, AdamState& state) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v.array() = state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square();
    p.array() -=
        state.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.epsilon);
  };
  update(params.lstm_kernel, grad.lstm_kernel, state.m.lstm_kernel, state.v.lstm_kernel);
  update(params.lstm_recurrent, grad.lstm_recurrent, state.m.lstm_recurrent,
         state.v.lstm_recurrent);
  update(params.lstm_bias, grad.lstm_bias, state.m.lstm_bias, state.v.lstm_bias);
  update(params.dense1_w, grad.dense1_w, state.m.dense1_w, state.v.dense1_w);
  update(params.dense1_b, grad.dense1_b, state.m.dense1_b, state.v.dense1_b);
  update(params.dense2_w, grad.dense2_w, state.m.dense2_w, state.v.dense2_w);
  update(params.dense2_b, grad.dense2_b, state.m.dense2_b, state.v.dense2_b);
  update(params.output_w, grad.output_w, state.m.output_w, state.v.output_w);
  update(params.output_b, grad.output_b, state.m.output_b, state.v.output_b);
}

double predict_video(const ModelParams& params, const ModelConfig& config,
                     const HistogramSequence& seq) {
  return forward_video(params, config, seq).p_fake;
}

namespace {

struct SetMetrics {
  double loss = 0.0;
  double acc = 0.0;
};

SetMetrics metrics_over(const ModelParams& params, const ModelConfig& config,
                        const std::vector<LabeledSequence>& items, int threads) {
  SetMetrics out;
  if (items.empty()) return out;
  std::vector<double> losses(items.size());
  std::vector<int> hits(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    const double p = predict_video(params, config, items[i].seq);
    losses[i] = bce_loss(p, items[i].label);
    hits[i] = (p >= 0.5) == (items[i].label == 1) ? 1 : 0;
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.loss += losses[i];
    out.acc += hits[i];
  }
  out.loss /= static_cast<double>(items.size());
  out.acc /= static_cast<double>(items.size());
  return out;
}

}  // namespace

TrainResult train(const std::vector<LabeledSequence>& train_set,
                  const std::vector<LabeledSequence>& val_set, const ModelConfig& config,
                  const TrainOptions& options) {
  if (train_set.empty()) fail(Errc::empty_dataset, "training set is empty");
  if (options.epochs < 1 || options.batch_size < 1) {
    fail(Errc::bad_config, "epochs and batch_size must be >= 1");
  }
  for (const auto& item : train_set) {
    if (item.label != 0 && item.label != 1) fail(Errc::bad_config, "labels must be 0 or 1");
  }

  TrainResult result;
  result.params = init_params(config);
  AdamState adam = make_adam(config, options.learning_rate);
  SeededRng shuffle_rng(derive_seed(config.seed, 0x5u));

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t batch_size = static_cast<std::size_t>(options.batch_size);
  std::vector<ModelParams> grads(std::min(batch_size, train_set.size()));
  std::vector<double> losses(grads.size());
  std::vector<int> hits(grads.size());

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    long correct = 0;

    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t count = std::min(batch_size, order.size() - start);
      parallel_for(count, options.threads, [&](std::size_t k) {
        const LabeledSequence& item = train_set[order[start + k]];
        const ForwardCache cache = forward_video(result.params, config, item.seq);
        losses[k] = bce_loss(cache.p_fake, item.label);
        hits[k] = (cache.p_fake >= 0.5) == (item.label == 1) ? 1 : 0;
        grads[k] = backward_video(result.params, config, cache, item.label);
      });

      // Reduce in item order so thread count never changes the result.
      ModelParams batch_grad = zeros_like(config);
      for (std::size_t k = 0; k < count; ++k) {
        add_inplace(batch_grad, grads[k]);
        loss_sum += losses[k];
        correct += hits[k];
      }
      batch_grad.for_each_tensor([&](auto& g) { g /= static_cast<double>(count); });
      if (options.max_grad_norm > 0.0) {
        double norm_sq = 0.0;
        batch_grad.for_each_tensor([&](const auto& g) { norm_sq += g.squaredNorm(); });
        const double norm = std::sqrt(norm_sq);
        if (norm > options.max_grad_norm) {
          const double scale = options.max_grad_norm / norm;
          batch_grad.for_each_tensor([&](auto& g) { g *= scale; });
        }
      }
      adam_update(result.params, batch_grad, adam);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(train_set.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    const SetMetrics vm = metrics_over(result.params, config, val_set, options.threads);
    m.val_loss = vm.loss;
    m.val_accuracy = vm.acc;
    result.history.push_back(m);
  }
  return result;
}

namespace {

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back(kBase64Alphabet[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) fail(Errc::decode_error, "base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        vals[j] = 0;
        ++pad;
      } else {
        vals[j] = value_of(c);
        if (vals[j] < 0 || pad > 0) fail(Errc::decode_error, "invalid base64 input");
      }
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  return out;
}

// Row-major little-endian f64 blob for one tensor.
template <class T>
std::vector<std::uint8_t> tensor_bytes(const T& tensor) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(tensor.size()) * 8);
  for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
    for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
      std::uint64_t bits;
      const double v = tensor(r, c);
      std::memcpy(&bits, &v, 8);
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }
  return bytes;
}

template <class T>
void tensor_from_bytes(T& tensor, const std::vector<std::uint8_t>& bytes,
                       const std::string& name) {
  if (bytes.size() != static_cast<std::size_t>(tensor.size()) * 8) {
    fail(Errc::shape_mismatch, "tensor '" + name + "' holds " + std::to_string(bytes.size() / 8) +
                                   " values, expected " + std::to_string(tensor.size()));
  }
  std::size_t at = 0;
  for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
    for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= std::uint64_t(bytes[at++]) << (8 * b);
      double v;
      std::memcpy(&v, &bits, 8);
      tensor(r, c) = v;
    }
  }
}

constexpr const char* kTensorNames[] = {"lstm_kernel", "lstm_recurrent", "lstm_bias",
                                        "dense1_w",    "dense1_b",       "dense2_w",
                                        "dense2_b",    "output_w",       "output_b"};

}  // namespace

void save_model(const ModelParams& params, const ModelConfig& config,
                const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = "fsv1";
  j["config"] = {{"input_dim", config.input_dim},
                 {"lstm_units", config.lstm_units},
                 {"dense1_units", config.dense1_units},
                 {"dense2_units", config.dense2_units},
                 {"chunk_len", config.chunk_len},
                 {"chunks_per_video", config.chunks_per_video},
                 {"seed", config.seed}};
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  int index = 0;
  params.for_each_tensor([&](const auto& tensor) {
    nlohmann::ordered_json t;
    t["name"] = kTensorNames[index++];
    t["shape"] = {tensor.rows(), tensor.cols()};
    t["data"] = base64_encode(tensor_bytes(tensor));
    tensors.push_back(std::move(t));
  });
  j["tensors"] = std::move(tensors);

  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump() << '\n';
  if (!out) fail(Errc::io_error, "short write to " + path.string());
}

std::pair<ModelConfig, ModelParams> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::decode_error, path.string() + ": " + e.what());
  }

  ModelConfig config;
  try {
    const std::string format = j.at("format").get<std::string>();
    if (format != "fsv1") {
      fail(Errc::version_mismatch, path.string() + ": format '" + format + "', expected 'fsv1'");
    }
    const auto& c = j.at("config");
    config.input_dim = c.at("input_dim").get<int>();
    config.lstm_units = c.at("lstm_units").get<int>();
    config.dense1_units = c.at("dense1_units").get<int>();
    config.dense2_units = c.at("dense2_units").get<int>();
    config.chunk_len = c.at("chunk_len").get<int>();
    config.chunks_per_video = c.at("chunks_per_video").get<int>();
    config.seed = c.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::decode_error, path.string() + ": " + e.what());
  }
  check_config(config);

  ModelParams params = zeros_like(config);
  try {
    const auto& tensors = j.at("tensors");
    if (!tensors.is_array() || tensors.size() != std::size(kTensorNames)) {
      fail(Errc::shape_mismatch, path.string() + ": expected " +
                                     std::to_string(std::size(kTensorNames)) + " tensors");
    }
    int index = 0;
    params.for_each_tensor([&](auto& tensor) {
      const auto& t = tensors[static_cast<std::size_t>(index)];
      const std::string name = t.at("name").get<std::string>();
      if (name != kTensorNames[index]) {
        fail(Errc::shape_mismatch, path.string() + ": tensor " + std::to_string(index) +
                                       " is '" + name + "', expected '" + kTensorNames[index] +
                                       "'");
      }
      const auto shape = t.at("shape").get<std::vector<long>>();
      if (shape.size() != 2 || shape[0] != tensor.rows() || shape[1] != tensor.cols()) {
        fail(Errc::shape_mismatch,
             path.string() + ": tensor '" + name + "' shape does not match config");
      }
      tensor_from_bytes(tensor, base64_decode(t.at("data").get<std::string>()), name);
      ++index;
    });
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::decode_error, path.string() + ": " + e.what());
  }
  return {config, params};
}

}  // namespace fakesift
