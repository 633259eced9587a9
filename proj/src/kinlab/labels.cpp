#include <algorithm>
#include <cmath>
#include <limits>

#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/kinlab/kinlab.hpp"

namespace lift::kinlab {

namespace {

bool finite(const Vec3& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

}  // namespace

std::string_view to_string(LiftOrigin o) noexcept { return o == LiftOrigin::Floor ? "floor" : "knee"; }
std::string_view to_string(HandConfig h) noexcept { return h == HandConfig::Broad ? "broad" : "narrow"; }

std::size_t LabelTrack::present_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.has_value(); }));
}

double compute_h(const Vec3& left_hand, const Vec3& right_hand, const Vec3& left_ankle,
                 const Vec3& right_ankle) {
  if (!finite(left_hand) || !finite(right_hand) || !finite(left_ankle) || !finite(right_ankle))
    throw_numeric("NonFiniteInput", "non-finite landmark in H computation");
  const double dx = 0.5 * (left_hand.x + right_hand.x) - 0.5 * (left_ankle.x + right_ankle.x);
  const double dy = 0.5 * (left_hand.y + right_hand.y) - 0.5 * (left_ankle.y + right_ankle.y);
  return 1000.0 * std::hypot(dx, dy);
}

double compute_v(const Vec3& left_hand, const Vec3& right_hand) {
  if (!finite(left_hand) || !finite(right_hand)) throw_numeric("NonFiniteInput", "non-finite hand tip in V computation");
  return 1000.0 * 0.5 * (left_hand.z + right_hand.z);
}

LabelTrack label_frames(const JointTrajectory& traj, const LiftTrialMeta& meta, const LabelOptions& options) {
  traj.validate();
  if (std::abs(traj.sample_rate_hz - meta.fps) > 1e-9)
    throw_data("RateMismatch", "trajectory " + traj.trial_id + " at " + format_double(traj.sample_rate_hz) +
                                   " Hz; resample to " + std::to_string(meta.fps) + " Hz first");

  const auto& lh = traj.joint(kLeftHandTip);
  const auto& rh = traj.joint(kRightHandTip);
  const auto& la = traj.joint(kLeftMalleolus);
  const auto& ra = traj.joint(kRightMalleolus);

  double floor_offset_mm = 0.0;
  if (options.floor_from_malleoli && traj.size() > 0) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) lowest = std::min({lowest, la[i].z, ra[i].z});
    floor_offset_mm = 1000.0 * lowest;
  }

  const double half_period = 0.5 / meta.fps;
  LabelTrack track;
  track.frames.resize(static_cast<std::size_t>(meta.frame_count));
  for (int k = 0; k < meta.frame_count; ++k) {
    const double t = static_cast<double>(k) / meta.fps;
    auto it = std::lower_bound(traj.timestamps.begin(), traj.timestamps.end(), t);
    std::size_t best = traj.size();
    double best_gap = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == traj.timestamps.begin() ? it : std::prev(it)}) {
      if (cand == traj.timestamps.end()) continue;
      const double gap = std::abs(*cand - t);
      if (gap < best_gap) {
        best_gap = gap;
        best = static_cast<std::size_t>(cand - traj.timestamps.begin());
      }
    }
    if (best == traj.size() || best_gap > half_period + 1e-9) continue;
    track.frames[static_cast<std::size_t>(k)] =
        FrameLabel{k, compute_h(lh[best], rh[best], la[best], ra[best]), compute_v(lh[best], rh[best]) - floor_offset_mm};
  }
  if (track.present_count() == 0)
    throw_data("EmptyOverlap", "trajectory " + traj.trial_id + " does not overlap the video timeline");
  return track;
}

std::string format_labels(const LabelTrack& labels) {
  std::string out = "frame,h_mm,v_mm,present\n";
  for (std::size_t k = 0; k < labels.frames.size(); ++k) {
    const auto& f = labels.frames[k];
    out += std::to_string(k) + ',';
    if (f) out += format_double(f->h_mm) + ',' + format_double(f->v_mm) + ",1\n";
    else out += "0,0,0\n";
  }
  return out;
}

LabelTrack parse_labels(std::string_view text) {
  LabelTrack track;
  auto lines = split(text, '\n');
  bool header = true;
  for (auto raw : lines) {
    auto line = trim(raw);
    if (line.empty() || line.starts_with("#")) continue;
    if (header) {
      if (line != "frame,h_mm,v_mm,present") throw_data("SchemaViolation", "unexpected label header");
      header = false;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != 4) throw_data("SchemaViolation", "label row needs 4 cells");
    const auto k = parse_int(cells[0]);
    if (k != static_cast<long long>(track.frames.size())) throw_data("SchemaViolation", "label frames must be contiguous");
    if (parse_int(cells[3]) != 0) {
      track.frames.push_back(FrameLabel{static_cast<int>(k), parse_double(cells[1]), parse_double(cells[2])});
    } else {
      track.frames.emplace_back(std::nullopt);
    }
  }
  return track;
}

}  // namespace lift::kinlab
