#include <algorithm>
#include <cmath>

#include "lift/common/error.hpp"
#include "lift/evalharness/evalharness.hpp"

namespace lift::evalharness {

std::string_view to_string(Phase p) noexcept { return p == Phase::Start ? "start" : "end"; }
std::string_view to_string(Target t) noexcept { return t == Target::H ? "H" : "V"; }

MetricSet compute_metrics(std::span<const double> preds_mm, std::span<const double> truths_mm, Phase phase,
                          Target target) {
  if (preds_mm.size() != truths_mm.size())
    throw_data("LengthMismatch", std::to_string(preds_mm.size()) + " predictions for " +
                                     std::to_string(truths_mm.size()) + " ground-truth values");
  if (preds_mm.empty()) throw_data("Empty", "no samples to score");
  MetricSet m{phase, target};
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < preds_mm.size(); ++i) {
    const double e = std::abs(preds_mm[i] - truths_mm[i]);
    if (!std::isfinite(e)) throw_numeric("NonFinite", "non-finite prediction or ground truth");
    abs_sum += e;
    sq_sum += e * e;
    m.maxae_mm = std::max(m.maxae_mm, e);
  }
  const double n = static_cast<double>(preds_mm.size());
  m.n = preds_mm.size();
  m.mae_mm = abs_sum / n;
  m.rmse_mm = std::sqrt(sq_sum / n);
  // Rounding can nudge the means past each other when every error is equal.
  m.mae_mm = std::min(m.mae_mm, m.maxae_mm);
  m.rmse_mm = std::clamp(m.rmse_mm, m.mae_mm, m.maxae_mm);
  return m;
}

}  // namespace lift::evalharness
