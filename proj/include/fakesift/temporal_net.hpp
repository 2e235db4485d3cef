#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fakesift/histogram.hpp"
#include "fakesift/types.hpp"

namespace fakesift {

/// Network geometry. The recurrent cell sees chunk_len-row windows of a
/// (chunk_len * chunks_per_video)-row histogram sequence; the hidden
/// state is carried across window boundaries, so chunking never changes
/// what the cell computes.
struct ModelConfig {
  int input_dim = kHistogramBins;
  int lstm_units = 64;
  int dense1_units = 128;
  int dense2_units = 64;
  int chunk_len = kChunkLength;
  int chunks_per_video = kSequenceLength / kChunkLength;
  std::uint64_t seed = 0;

  int sequence_len() const { return chunk_len * chunks_per_video; }
};

bool operator==(const ModelConfig& a, const ModelConfig& b);

/// All trainable tensors. LSTM gate blocks are stacked row-wise in the
/// order [input, forget, candidate, output], so e.g. lstm_bias.segment(U, U)
/// is the forget-gate bias. Also reused as a gradient / moment container.
struct ModelParams {
  Matrix lstm_kernel;     // (4U, I)   input weights
  Matrix lstm_recurrent;  // (4U, U)   hidden-state weights
  Vector lstm_bias;       // (4U)
  Matrix dense1_w;        // (D1, U)
  Vector dense1_b;        // (D1)
  Matrix dense2_w;        // (D2, D1)
  Vector dense2_b;        // (D2)
  Vector output_w;        // (D2)
  Vector output_b;        // (1)

  /// Applies f to every tensor, in serialization order.
  template <class F>
  void for_each_tensor(F&& f) {
    f(lstm_kernel); f(lstm_recurrent); f(lstm_bias);
    f(dense1_w); f(dense1_b); f(dense2_w); f(dense2_b);
    f(output_w); f(output_b);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    f(lstm_kernel); f(lstm_recurrent); f(lstm_bias);
    f(dense1_w); f(dense1_b); f(dense2_w); f(dense2_b);
    f(output_w); f(output_b);
  }
};

/// Zero-shaped parameter set for the given config.
ModelParams zeros_like(const ModelConfig& config);

/// Glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))) from a seeded
/// generator; biases zero except the forget-gate slice, which starts at 1
/// so early training does not forget everything.
ModelParams init_params(const ModelConfig& config);

struct LstmState {
  Vector h;
  Vector c;
};

LstmState zero_state(const ModelConfig& config);

/// One cell step: i,f,o = sigmoid, g = tanh, c' = f.c + i.g, h' = o.tanh(c').
/// Returns h' (same values as state.h after the call).
Vector lstm_step(const ModelParams& params, const ModelConfig& config,
                 LstmState& state, const Vector& x);

/// Everything backward_video needs, captured during the forward pass.
struct ForwardCache {
  Matrix inputs;                    // T x I
  Matrix gate_i, gate_f, gate_g, gate_o;  // T x U, post-activation
  Matrix cells;                     // T x U, c_t
  Matrix hidden;                    // T x U, h_t
  Vector z1, a1, z2, a2;            // dense head pre/post activation
  double logit = 0.0;
  double p_fake = 0.5;
};

/// Full sequence-to-one pass: zero state, all T rows in order, then
/// dense(D1) ReLU -> dense(D2) ReLU -> sigmoid scalar.
ForwardCache forward_video(const ModelParams& params, const ModelConfig& config,
                           const HistogramSequence& seq);

/// Same computation driven chunk by chunk with the state carried across
/// boundaries. Bit-identical to forward_video on the concatenated rows.
ForwardCache forward_chunks(const ModelParams& params, const ModelConfig& config,
                            std::span<const Matrix> chunks);

/// Binary cross-entropy -[y ln p + (1-y) ln(1-p)]; p must be in (0,1).
double bce_loss(double p_fake, int label);

/// Exact gradients via backpropagation through time over all T steps.
ModelParams backward_video(const ModelParams& params, const ModelConfig& config,
                           const ForwardCache& cache, int label);

/// Adam moments; step counts updates already applied.
struct AdamState {
  ModelParams m;
  ModelParams v;
  long step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam(const ModelConfig& config, double learning_rate = 1e-3);

void adam_update(ModelParams& params, const ModelParams& grad, AdamState& state);

struct LabeledSequence {
  HistogramSequence seq;
  int label = 0;  // 0 real, 1 fake
};

struct TrainOptions {
  int epochs = 50;
  int batch_size = 10;
  int threads = 1;
  double learning_rate = 1e-3;
  // Global-norm gradient clip. 300-step BPTT occasionally produces spike
  // gradients that blow up an otherwise converged run; rescaling the batch
  // gradient to this norm keeps the trajectory stable. 0 disables.
  double max_grad_norm = 5.0;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochMetrics> history;
};

/// Mini-batch Adam over shuffled epochs. Per-item gradients of a batch
/// may be computed on several threads but are reduced in item order, so
/// the trajectory depends only on config.seed, never on thread count.
/// Train metrics are accumulated from the pre-update batch passes;
/// validation metrics come from a full pass after each epoch.
TrainResult train(const std::vector<LabeledSequence>& train_set,
                  const std::vector<LabeledSequence>& val_set,
                  const ModelConfig& config, const TrainOptions& options);

/// Inference-only probability for one sequence.
double predict_video(const ModelParams& params, const ModelConfig& config,
                     const HistogramSequence& seq);

// Model file: JSON {"format":"fsv1","config":{...},"tensors":[{"name","shape","data"}...]}
// with base64 little-endian f64 blocks, tensors in for_each_tensor order.
void save_model(const ModelParams& params, const ModelConfig& config,
                const std::filesystem::path& path);
std::pair<ModelConfig, ModelParams> load_model(const std::filesystem::path& path);

}  // namespace fakesift
