#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "impsense/common.hpp"

namespace impsense::nn {

/// Text branch: embedding → conv1d (valid, ReLU) → dropout → max-pool →
/// LSTM (last hidden state) → dense ReLU. Metadata branch: dense ReLU.
/// Head: concat → dense ReLU → dense → softmax.
struct ModelConfig {
  int vocab_size = 0;  // V; the embedding has V + 2 rows (padding, OOV)
  int seq_len = 100;
  int embed_dim = 64;
  int conv_filters = 128;
  int conv_kernel = 6;
  double dropout_p = 0.2;
  int pool_size = 2;
  int lstm_units = 32;
  int text_dense = 16;
  int meta_dense = 16;
  int head_dense = 16;
  int n_classes = kNumClasses;
  int metadata_dim = 0;

  int conv_length() const { return seq_len - conv_kernel + 1; }
  int pooled_length() const { return (conv_length() - pool_size) / pool_size + 1; }
  int concat_dim() const { return text_dense + meta_dense; }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Every trainable array. Biases are 1 × n rows. LSTM gates are ordered
/// input, forget, cell, output; each gate weight is (filters + units) × units
/// acting on [x_t, h_{t-1}].
struct ModelParams {
  MatrixXd embedding;
  MatrixXd conv_w;  // (kernel * embed_dim) × filters, row index k * embed_dim + d
  MatrixXd conv_b;
  std::array<MatrixXd, 4> lstm_w;
  std::array<MatrixXd, 4> lstm_b;
  MatrixXd text_w, text_b;
  MatrixXd meta_w, meta_b;
  MatrixXd head_w, head_b;
  MatrixXd out_w, out_b;

  static ModelParams zeros(const ModelConfig& cfg);
  /// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in the input width
  /// (embed_dim for the embedding); biases 0 except the LSTM forget gate (1).
  static ModelParams initialize(const ModelConfig& cfg, std::uint64_t seed);

  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

  std::size_t parameter_count() const;
  void set_zero();
  bool all_finite() const;
  bool operator==(const ModelParams& other) const;

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& p, F& f) {
    f(std::string_view("embedding"), p.embedding);
    f(std::string_view("conv_w"), p.conv_w);
    f(std::string_view("conv_b"), p.conv_b);
    static constexpr std::array<std::string_view, 4> wname{"lstm_w_input", "lstm_w_forget", "lstm_w_cell",
                                                           "lstm_w_output"};
    static constexpr std::array<std::string_view, 4> bname{"lstm_b_input", "lstm_b_forget", "lstm_b_cell",
                                                           "lstm_b_output"};
    for (std::size_t g = 0; g < 4; ++g) f(wname[g], p.lstm_w[g]);
    for (std::size_t g = 0; g < 4; ++g) f(bname[g], p.lstm_b[g]);
    f(std::string_view("text_w"), p.text_w);
    f(std::string_view("text_b"), p.text_b);
    f(std::string_view("meta_w"), p.meta_w);
    f(std::string_view("meta_b"), p.meta_b);
    f(std::string_view("head_w"), p.head_w);
    f(std::string_view("head_b"), p.head_b);
    f(std::string_view("out_w"), p.out_w);
    f(std::string_view("out_b"), p.out_b);
  }
};

using Gradients = ModelParams;

/// Intermediate activations of one forward pass, consumed by backward().
struct ForwardCache {
  std::vector<int> ids;
  MatrixXd cols;       // T × (kernel * embed_dim)
  MatrixXd conv_pre;   // T × F
  MatrixXd mask;       // T × F dropout multipliers (empty when inactive)
  Eigen::MatrixXi pool_arg;  // P × F row index into the conv output
  MatrixXd pooled;     // P × F
  MatrixXd h, c;       // (P + 1) × H, row 0 is the zero state
  MatrixXd gi, gf, gg, go;  // P × H gate activations
  RowVector<double> text_pre, meta_in, meta_pre, concat, head_pre, head_act;
  RowVector<double> probs;
};

/// Class probabilities. Dropout is active only when `train_mode`; its mask is
/// drawn from `seed`. Throws DataError on shape mismatch and NumericError on a
/// non-finite activation.
VectorXd forward(const ModelParams& params, const ModelConfig& cfg, std::span<const int> tokens,
                 const VectorXd& metadata, bool train_mode, std::uint64_t seed, ForwardCache* cache = nullptr);

/// Cross-entropy of one example with probabilities clamped to [1e-12, 1].
double loss(const VectorXd& probs, int label);

/// Adds scale * d(loss)/d(params) for the cached example into `grads`.
void backward(const ModelParams& params, const ModelConfig& cfg, const ForwardCache& cache, int label, double scale,
              Gradients& grads);

struct Example {
  std::vector<int> tokens;
  VectorXd metadata;
  int label = 0;
};

/// Mean loss over the batch; `grads` is overwritten with its gradient.
/// Example i draws its dropout mask from derive_seed(seed, i).
double batch_gradients(const ModelParams& params, const ModelConfig& cfg, std::span<const Example> batch,
                       bool train_mode, std::uint64_t seed, Gradients& grads);

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;
  int epochs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_history;  // mean training loss per epoch
};

/// Seeded init, per-epoch seeded shuffling, Adam on mean cross-entropy.
TrainResult train(std::span<const Example> data, const ModelConfig& cfg, const TrainConfig& tcfg);

/// Index of the largest entry, ties to the lowest index.
int argmax(const VectorXd& probs);

int predict(const ModelParams& params, const ModelConfig& cfg, std::span<const int> tokens, const VectorXd& metadata);

}  // namespace impsense::nn
