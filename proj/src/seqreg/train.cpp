#include <algorithm>
#include <cmath>
#include <numeric>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/common/textio.hpp"
#include "lift/seqreg/seqreg.hpp"

namespace lift::seqreg {

namespace {

std::vector<std::size_t> windows_with_targets(const featpipe::SequenceBatch& data) {
  std::vector<std::size_t> keep;
  const auto L = static_cast<std::size_t>(data.length);
  for (std::size_t w = 0; w < data.count; ++w) {
    if (std::any_of(data.mask.begin() + static_cast<std::ptrdiff_t>(w * L),
                    data.mask.begin() + static_cast<std::ptrdiff_t>((w + 1) * L), [](std::uint8_t m) { return m != 0; }))
      keep.push_back(w);
  }
  return keep;
}

}  // namespace

template <class T>
std::vector<T> predict(const ModelParams<T>& params, const featpipe::SequenceBatch& data, int chunk) {
  std::vector<T> out;
  out.reserve(data.positions() * static_cast<std::size_t>(params.config.outputs));
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.count; start += static_cast<std::size_t>(chunk)) {
    idx.clear();
    for (std::size_t w = start; w < std::min(data.count, start + static_cast<std::size_t>(chunk)); ++w) idx.push_back(w);
    const auto part = forward(params, data.subset(idx), false, 0);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

template <class T>
double evaluate_loss(const ModelParams<T>& params, const featpipe::SequenceBatch& data, int chunk) {
  const auto preds = predict(params, data, chunk);
  return masked_mse_loss<T>(preds, data.targets, data.mask, params.config.outputs);
}

template <class T>
TrainResult<T> train(const featpipe::SequenceBatch& train_set, const featpipe::SequenceBatch& val_set,
                     const ModelConfig& config, const TrainHyper& hyper, std::uint64_t init_seed) {
  config.validate();
  if (hyper.batch_size <= 0 || hyper.max_epochs <= 0) throw_config("BadConfig", "batch size and epochs must be positive");
  const auto usable = windows_with_targets(train_set);
  if (usable.empty()) throw_data("EmptyDataset", "training set has no labeled positions");
  const auto val_windows = windows_with_targets(val_set);
  if (val_windows.empty()) throw_data("EmptyDataset", "validation set has no labeled positions");
  const featpipe::SequenceBatch val = val_set.subset(val_windows);

  TrainResult<T> result;
  ModelParams<T> params = init_model<T>(config, init_seed);
  OptimState<T> state;
  EpochController control(hyper.lr, hyper.plateau_patience, hyper.plateau_factor, hyper.min_lr,
                          hyper.early_stop_patience);
  Rng shuffle_rng(derive_seed(hyper.seed, {tag("shuffle")}));
  std::vector<std::size_t> order = usable;
  result.best = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double sq_sum = 0.0;
    std::size_t positions = 0;
    const double lr = control.lr();
    bool out_of_steps = false;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      const auto batch = train_set.subset(std::span(order).subspan(start, stop - start));
      const auto step_seed = derive_seed(hyper.seed, {tag("dropout"), static_cast<std::uint64_t>(result.steps)});
      auto lg = gradients(params, batch, true, step_seed);
      if (!std::isfinite(lg.loss)) throw_numeric("Diverged", "non-finite training loss at epoch " + std::to_string(epoch));
      const std::size_t n = batch.unmasked();
      sq_sum += lg.loss * static_cast<double>(n);
      positions += n;
      adamw_step<T>(params.values, lg.grads, state, lr, hyper.adamw);
      ++result.steps;
      if (hyper.max_steps > 0 && result.steps >= hyper.max_steps) {
        out_of_steps = true;
        break;
      }
    }

    const double val_loss = evaluate_loss(params, val);
    if (!std::isfinite(val_loss)) throw_numeric("Diverged", "non-finite validation loss at epoch " + std::to_string(epoch));
    result.history.push_back({epoch, sq_sum / static_cast<double>(positions), val_loss, lr});
    const auto decision = control.observe(val_loss);
    if (decision.improved) {
      result.best = params;
      result.best_epoch = epoch;
      result.best_val_loss = val_loss;
    }
    if (decision.stop || out_of_steps) break;
  }
  return result;
}

template std::vector<float> predict<float>(const ModelParams<float>&, const featpipe::SequenceBatch&, int);
template std::vector<double> predict<double>(const ModelParams<double>&, const featpipe::SequenceBatch&, int);
template double evaluate_loss<float>(const ModelParams<float>&, const featpipe::SequenceBatch&, int);
template double evaluate_loss<double>(const ModelParams<double>&, const featpipe::SequenceBatch&, int);
template TrainResult<float> train<float>(const featpipe::SequenceBatch&, const featpipe::SequenceBatch&,
                                         const ModelConfig&, const TrainHyper&, std::uint64_t);
template TrainResult<double> train<double>(const featpipe::SequenceBatch&, const featpipe::SequenceBatch&,
                                           const ModelConfig&, const TrainHyper&, std::uint64_t);

std::string format_history(std::span<const EpochRecord> history, std::string_view comment) {
  std::string out;
  if (!comment.empty()) out += "# " + std::string(comment) + "\n";
  out += "epoch,train_loss,val_loss,lr\n";
  for (const auto& r : history)
    out += std::to_string(r.epoch) + ',' + format_double(r.train_loss) + ',' + format_double(r.val_loss) + ',' +
           format_double(r.lr) + '\n';
  return out;
}

}  // namespace lift::seqreg
