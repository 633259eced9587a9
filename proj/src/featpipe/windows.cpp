#include <algorithm>

#include "lift/common/error.hpp"
#include "lift/featpipe/featpipe.hpp"

namespace lift::featpipe {

std::size_t SequenceBatch::unmasked() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void SequenceBatch::append(const SequenceBatch& other) {
  if (other.length != length || other.dim != dim) throw_data("ShapeMismatch", "cannot append batches of different shape");
  features.insert(features.end(), other.features.begin(), other.features.end());
  mask.insert(mask.end(), other.mask.begin(), other.mask.end());
  targets.insert(targets.end(), other.targets.begin(), other.targets.end());
  frame_index.insert(frame_index.end(), other.frame_index.begin(), other.frame_index.end());
  info.insert(info.end(), other.info.begin(), other.info.end());
  count += other.count;
}

SequenceBatch SequenceBatch::subset(std::span<const std::size_t> windows) const {
  SequenceBatch out(length, dim);
  const std::size_t L = static_cast<std::size_t>(length), D = static_cast<std::size_t>(dim);
  out.count = windows.size();
  out.features.reserve(windows.size() * L * D);
  for (std::size_t w : windows) {
    if (w >= count) throw_data("ShapeMismatch", "window index out of range");
    out.features.insert(out.features.end(), features.begin() + w * L * D, features.begin() + (w + 1) * L * D);
    out.mask.insert(out.mask.end(), mask.begin() + w * L, mask.begin() + (w + 1) * L);
    out.targets.insert(out.targets.end(), targets.begin() + w * L * 2, targets.begin() + (w + 1) * L * 2);
    out.frame_index.insert(out.frame_index.end(), frame_index.begin() + w * L, frame_index.begin() + (w + 1) * L);
    out.info.push_back(info[w]);
  }
  return out;
}

std::size_t SequenceBatch::add_empty_window(WindowInfo window_info) {
  const std::size_t L = static_cast<std::size_t>(length);
  features.resize(features.size() + L * static_cast<std::size_t>(dim), 0.0f);
  mask.resize(mask.size() + L, 0);
  targets.resize(targets.size() + 2 * L, 0.0f);
  frame_index.resize(frame_index.size() + L, -1);
  info.push_back(std::move(window_info));
  return count++;
}

namespace {

void fill_window(SequenceBatch& batch, std::size_t w, std::span<const FrameVector> frames,
                 const kinlab::LabelTrack& labels, int start) {
  const std::size_t L = static_cast<std::size_t>(batch.length), D = static_cast<std::size_t>(batch.dim);
  for (int p = 0; p < batch.length; ++p) {
    const int f = start + p;
    if (f < 0 || f >= static_cast<int>(frames.size())) continue;
    const std::size_t pos = w * L + static_cast<std::size_t>(p);
    batch.frame_index[pos] = f;
    const FrameVector& fv = frames[static_cast<std::size_t>(f)];
    const auto& label = static_cast<std::size_t>(f) < labels.frames.size() ? labels.frames[static_cast<std::size_t>(f)]
                                                                             : std::optional<kinlab::FrameLabel>{};
    if (!fv.valid || !label) continue;
    if (fv.values.size() != D) throw_data("DimMismatch", "frame vector dimension differs from batch dim");
    batch.mask[pos] = 1;
    std::copy(fv.values.begin(), fv.values.end(), batch.features.begin() + static_cast<std::ptrdiff_t>(pos * D));
    batch.targets[2 * pos] = static_cast<float>(normalize_target(label->h_mm));
    batch.targets[2 * pos + 1] = static_cast<float>(normalize_target(label->v_mm));
  }
}

}  // namespace

SequenceBatch make_windows(std::span<const FrameVector> frames, const kinlab::LabelTrack& labels,
                           const TrialIdentity& id, int window, int stride) {
  if (frames.empty()) throw_data("Empty", "no frames to window for " + id.trial_id);
  if (window <= 0 || stride <= 0) throw_config("BadWindow", "window and stride must be positive");
  const int dim = static_cast<int>(frames.front().values.size());
  SequenceBatch batch(window, dim);
  const int n = static_cast<int>(frames.size());
  for (int start = 0;; start += stride) {
    const std::size_t w = batch.add_empty_window({id.trial_id, id.participant_id, start, WindowKind::Train, -1});
    fill_window(batch, w, frames, labels, start);
    if (start + window >= n) break;
  }
  return batch;
}

SequenceBatch extract_eval_sequences(std::span<const FrameVector> frames, const kinlab::LabelTrack& labels,
                                     const kinlab::LiftTrialMeta& meta, int window) {
  const int n = static_cast<int>(frames.size());
  if (n == 0) throw_data("Empty", "no frames for " + meta.trial_id);
  const int dim = static_cast<int>(frames.front().values.size());
  SequenceBatch batch(window, dim);
  for (auto [event, kind] : {std::pair{meta.lift_start_frame, WindowKind::LiftStart},
                             std::pair{meta.lift_end_frame, WindowKind::LiftEnd}}) {
    if (event < 0 || event >= n)
      throw_data("EventOutOfRange", meta.trial_id + ": event frame " + std::to_string(event) + " outside 0.." +
                                        std::to_string(n - 1));
    const int start = std::clamp(event - window / 2, 0, std::max(0, n - window));
    const std::size_t w = batch.add_empty_window({meta.trial_id, meta.participant_id, start, kind, event - start});
    fill_window(batch, w, frames, labels, start);
  }
  return batch;
}

}  // namespace lift::featpipe
