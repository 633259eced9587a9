#include <cmath>
#include <limits>

#include "lift/common/error.hpp"
#include "lift/seqreg/seqreg.hpp"

namespace lift::seqreg {

template <class T>
void adamw_step(std::span<T> params, std::span<const T> grads, OptimState<T>& state, double lr,
                const AdamWSettings& s) {
  if (grads.size() != params.size()) throw_data("ShapeMismatch", "gradient and parameter sizes differ");
  if (state.m.empty()) {
    state.m.assign(params.size(), T(0));
    state.v.assign(params.size(), T(0));
  }
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw_data("ShapeMismatch", "optimizer moments do not match parameters");

  ++state.step;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(state.step));
  const T b1 = T(s.beta1), b2 = T(s.beta2);
  const T decay = T(1.0 - lr * s.weight_decay);
  const T step_size = T(lr / bc1);
  const T inv_sqrt_bc2 = T(1.0 / std::sqrt(bc2));
  const T eps = T(s.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
    state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
    params[i] *= decay;
    params[i] -= step_size * state.m[i] / (std::sqrt(state.v[i]) * inv_sqrt_bc2 + eps);
  }
}

template void adamw_step<float>(std::span<float>, std::span<const float>, OptimState<float>&, double,
                                const AdamWSettings&);
template void adamw_step<double>(std::span<double>, std::span<const double>, OptimState<double>&, double,
                                 const AdamWSettings&);

EpochController::EpochController(double lr, int plateau_patience, double plateau_factor, double min_lr,
                                 int stop_patience)
    : lr_(lr),
      plateau_patience_(plateau_patience),
      plateau_factor_(plateau_factor),
      min_lr_(min_lr),
      stop_patience_(stop_patience),
      best_(std::numeric_limits<double>::infinity()) {}

EpochController::Decision EpochController::observe(double val_loss) {
  Decision d;
  if (val_loss < best_) {
    best_ = val_loss;
    stale_ = 0;
    plateau_stale_ = 0;
    d.improved = true;
    return d;
  }
  ++stale_;
  ++plateau_stale_;
  if (plateau_stale_ >= plateau_patience_) {
    const double reduced = std::max(min_lr_, lr_ * plateau_factor_);
    d.lr_reduced = reduced < lr_;
    lr_ = reduced;
    plateau_stale_ = 0;
  }
  d.stop = stale_ >= stop_patience_;
  return d;
}

}  // namespace lift::seqreg
