#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lift/featpipe/featpipe.hpp"

namespace lift::seqreg {

/// Transformer regressor shape. Defaults reproduce the full-size model;
/// smaller configs are used for gradient checks and desk-scale experiments.
struct ModelConfig {
  int input_dim = featpipe::kFrameDim;
  int model_dim = 512;
  int layers = 6;
  int heads = 8;
  int ffn_dim = 2048;
  double dropout = 0.1;
  int head_hidden = 256;
  int outputs = 2;
  int max_seq = featpipe::kWindowLength;

  /// Throws BadConfig.
  void validate() const;
  int head_dim() const { return model_dim / heads; }
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

/// Fixed tensor order: embedding, then per layer Q/K/V/O projections,
/// norm 1, feed-forward, norm 2, then the two-layer regression head.
/// Weight matrices are stored (fan_in x fan_out), row-major.
std::vector<TensorSpec> parameter_layout(const ModelConfig& config);

// Buffers mapped into Eigen must sit at a fixed alignment; otherwise the
// vectorized small products peel by address and round differently run to run.
template <class T>
using AlignedVec = std::vector<T, Eigen::aligned_allocator<T>>;

/// Every trainable tensor of the model in one flat buffer.
template <class T>
struct ModelParams {
  ModelConfig config;
  std::vector<TensorSpec> layout;
  AlignedVec<T> values;

  const TensorSpec& spec(std::string_view name) const;
  std::span<T> tensor(std::string_view name);
  std::span<const T> tensor(std::string_view name) const;

  template <class U>
  ModelParams<U> cast() const {
    return {config, layout, AlignedVec<U>(values.begin(), values.end())};
  }
};

/// Glorot-uniform weights, zero biases, unit norm scales. Deterministic in seed.
template <class T>
ModelParams<T> init_model(const ModelConfig& config, std::uint64_t seed);

/// Row-major seq_len x dim sinusoidal table. Throws OddDim.
std::vector<double> positional_encoding(int seq_len, int dim);

/// Per-position (H, V) predictions, (count x length x outputs) row-major.
/// Padded keys receive an additive -inf attention bias; dropout is only
/// sampled when train_mode is set. Throws ShapeMismatch and
/// NonFiniteActivation.
template <class T>
std::vector<T> forward(const ModelParams<T>& params, const featpipe::SequenceBatch& batch, bool train_mode,
                       std::uint64_t seed);

/// Mean squared error over unmasked (position, output) pairs. Throws AllMasked.
template <class T>
double masked_mse_loss(std::span<const T> preds, std::span<const float> targets, std::span<const std::uint8_t> mask,
                       int outputs = 2);

template <class T>
struct LossGradient {
  double loss = 0.0;
  AlignedVec<T> grads;  ///< same layout as ModelParams::values
};

/// Loss and exact reverse-mode gradient. Throws NonFiniteGradient.
template <class T>
LossGradient<T> gradients(const ModelParams<T>& params, const featpipe::SequenceBatch& batch, bool train_mode,
                          std::uint64_t seed);

struct GradCheckEntry {
  std::string tensor;
  double max_abs_error = 0.0;
  /// max_abs_error over the larger of the analytic and numeric gradient
  /// magnitudes of the tensor (floored at 1e-6).
  double relative = 0.0;
};

/// Random (3 x max_seq) batch with a padded tail, for gradient checks.
featpipe::SequenceBatch random_check_batch(const ModelConfig& config, int count, std::uint64_t seed);

/// Central-difference check of every tensor of a double model in eval mode.
std::vector<GradCheckEntry> gradient_check(const ModelConfig& config, std::uint64_t seed, double step = 1e-5);

// -- optimization --------------------------------------------------------------

struct AdamWSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

template <class T>
struct OptimState {
  AlignedVec<T> m;
  AlignedVec<T> v;
  std::int64_t step = 0;
};

/// One decoupled-weight-decay Adam update. Throws ShapeMismatch.
template <class T>
void adamw_step(std::span<T> params, std::span<const T> grads, OptimState<T>& state, double lr,
                const AdamWSettings& settings = {});

/// Learning-rate plateau schedule plus early stopping on validation loss.
/// Improvement means strictly below the best loss seen so far.
class EpochController {
public:
  EpochController(double lr, int plateau_patience = 5, double plateau_factor = 0.5, double min_lr = 1e-6,
                  int stop_patience = 15);

  struct Decision {
    bool improved = false;
    bool lr_reduced = false;
    bool stop = false;
  };

  Decision observe(double val_loss);
  double lr() const noexcept { return lr_; }
  double best_loss() const noexcept { return best_; }
  int stale_epochs() const noexcept { return stale_; }

private:
  double lr_;
  int plateau_patience_;
  double plateau_factor_;
  double min_lr_;
  int stop_patience_;
  double best_;
  int stale_ = 0;
  int plateau_stale_ = 0;
};

struct TrainHyper {
  double lr = 1e-4;
  int batch_size = 16;
  int max_epochs = 100;
  int plateau_patience = 5;
  double plateau_factor = 0.5;
  double min_lr = 1e-6;
  int early_stop_patience = 15;
  AdamWSettings adamw;
  /// 0 means unlimited.
  std::int64_t max_steps = 0;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

template <class T>
struct TrainResult {
  ModelParams<T> best;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  std::int64_t steps = 0;
};

/// Masked-MSE validation loss in eval mode, evaluated in chunks.
template <class T>
double evaluate_loss(const ModelParams<T>& params, const featpipe::SequenceBatch& data, int chunk = 64);

/// Eval-mode predictions in chunks, (count x length x outputs).
template <class T>
std::vector<T> predict(const ModelParams<T>& params, const featpipe::SequenceBatch& data, int chunk = 64);

/// Minibatch AdamW with plateau halving, early stopping, best-checkpoint
/// restore. Windows without any unmasked position are skipped. Throws
/// EmptyDataset and Diverged.
template <class T>
TrainResult<T> train(const featpipe::SequenceBatch& train_set, const featpipe::SequenceBatch& val_set,
                     const ModelConfig& config, const TrainHyper& hyper, std::uint64_t init_seed);

// -- files -------------------------------------------------------------------

/// `LCK1`, u16 version, u32 config-JSON length, JSON, u32 tensor count, then
/// per tensor: u16 name length, name, u32 rows, u32 cols, u8 scalar bytes,
/// little-endian data.
template <class T>
std::string serialize_checkpoint(const ModelParams<T>& params, std::string_view provenance_json = "{}");
template <class T>
ModelParams<T> deserialize_checkpoint(std::string_view bytes);

std::string format_history(std::span<const EpochRecord> history, std::string_view comment = {});

}  // namespace lift::seqreg
