#include <algorithm>
#include <cmath>

#include "lift/common/seed.hpp"
#include "lift/seqreg/seqreg.hpp"

namespace lift::seqreg {

featpipe::SequenceBatch random_check_batch(const ModelConfig& config, int count, std::uint64_t seed) {
  featpipe::SequenceBatch b(config.max_seq, config.input_dim);
  Rng rng(seed);
  std::normal_distribution<float> feature(0.0f, 1.0f);
  std::uniform_real_distribution<float> target(0.05f, 0.6f);
  for (int w = 0; w < count; ++w) {
    b.add_empty_window({"check" + std::to_string(w), "check", 0, featpipe::WindowKind::Train, -1});
    // The last window ends in padding so masked paths are exercised too.
    const int valid = w == count - 1 ? std::max(1, config.max_seq - 2) : config.max_seq;
    for (int p = 0; p < valid; ++p) {
      const auto pos = static_cast<std::size_t>(w) * static_cast<std::size_t>(config.max_seq) + static_cast<std::size_t>(p);
      b.mask[pos] = 1;
      b.frame_index[pos] = p;
      for (int d = 0; d < config.input_dim; ++d)
        b.features[pos * static_cast<std::size_t>(config.input_dim) + static_cast<std::size_t>(d)] = feature(rng);
      for (int o = 0; o < 2; ++o) b.targets[2 * pos + static_cast<std::size_t>(o)] = target(rng);
    }
  }
  return b;
}

std::vector<GradCheckEntry> gradient_check(const ModelConfig& config, std::uint64_t seed, double step) {
  auto params = init_model<double>(config, derive_seed(seed, {tag("init")}));
  const auto batch = random_check_batch(config, 3, derive_seed(seed, {tag("batch")}));
  const auto analytic = gradients(params, batch, false, 0).grads;
  auto loss = [&] {
    const auto y = forward(params, batch, false, 0);
    return masked_mse_loss<double>(y, batch.targets, batch.mask, config.outputs);
  };
  std::vector<GradCheckEntry> out;
  for (const auto& spec : params.layout) {
    GradCheckEntry e{spec.name};
    double scale = 1e-6;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double& w = params.values[spec.offset + i];
      const double keep = w;
      w = keep + step;
      const double up = loss();
      w = keep - step;
      const double down = loss();
      w = keep;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[spec.offset + i];
      e.max_abs_error = std::max(e.max_abs_error, std::abs(a - numeric));
      scale = std::max({scale, std::abs(a), std::abs(numeric)});
    }
    e.relative = e.max_abs_error / scale;
    out.push_back(e);
  }
  return out;
}

}  // namespace lift::seqreg
