#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::simscene {

void SyntheticSceneConfig::validate() const {
  auto bad = [](const std::string& what) { throw_config("BadConfig", "scene: " + what); };
  if (participant_count < 1 || trials_per_participant < 1) bad("participant and trial counts must be >= 1");
  for (const Normal* n : {&hip_height, &knee_height, &stature, &floor_reach, &knee_reach, &end_reach, &ankle_offset})
    if (!(n->sd >= 0.0)) bad("standard deviations must be >= 0");
  for (double sd : {bbox_noise_px, detect_feature_sd, segment_feature_sd})
    if (!(sd >= 0.0)) bad("noise levels must be >= 0");
  for (double p : {base_dropout, person_miss, mask_failure, low_hand_oblique, low_hand_frontal, far_hand_oblique})
    if (!(p >= 0.0 && p <= 1.0)) bad("probabilities must lie in [0, 1]");
  for (double p : label_dropout)
    if (p > 1.0) bad("label dropout must lie in [0, 1]");
  if (!(sample_rate_hz > 2.0 * 6.0)) bad("sample rate must exceed twice the 6 Hz filter cutoff");
  if (frame_count < 2) bad("frame_count must be >= 2");
  if (!(hold_min_s > 0.0 && hold_min_s <= hold_max_s && lift_min_s > 0.0 && lift_min_s <= lift_max_s))
    bad("hold and lift durations must be positive ranges");
  if (hold_max_s + lift_max_s >= static_cast<double>(frame_count - 1) / kVideoFps)
    bad("longest hold plus lift must end before the last frame");
  if (!(box.width_m > 0.0 && box.depth_m > 0.0 && box.height_m > 0.0)) bad("box dimensions must be positive");
}

std::vector<TrialSpec> trial_plan(const SyntheticSceneConfig& cfg) {
  cfg.validate();
  static constexpr int kMasses[] = {6, 9, 12};
  std::vector<TrialSpec> plan;
  char buf[32];
  for (int p = 0; p < cfg.participant_count; ++p) {
    std::snprintf(buf, sizeof buf, "P%02d", p + 1);
    const std::string pid = buf;
    for (int t = 0; t < cfg.trials_per_participant; ++t) {
      std::snprintf(buf, sizeof buf, "%s_T%02d", pid.c_str(), t + 1);
      TrialSpec spec{pid, buf};
      spec.origin = t % 2 == 0 ? kinlab::LiftOrigin::Floor : kinlab::LiftOrigin::Knee;
      spec.hands = (t / 2) % 2 == 0 ? kinlab::HandConfig::Broad : kinlab::HandConfig::Narrow;
      spec.box_mass_kg = kMasses[(t / 4) % 3];
      plan.push_back(std::move(spec));
    }
  }
  return plan;
}

Participant sample_participant(const SyntheticSceneConfig& cfg, std::string_view participant_id) {
  Rng rng(derive_seed(cfg.seed, {tag("participant"), tag(participant_id)}));
  auto draw = [&](const Normal& n) { return n.sd > 0.0 ? std::normal_distribution<double>(n.mean, n.sd)(rng) : n.mean; };
  Participant p;
  p.hip_height = draw(cfg.hip_height);
  p.knee_height = draw(cfg.knee_height);
  p.stature = draw(cfg.stature);
  p.floor_reach = draw(cfg.floor_reach);
  p.knee_reach = draw(cfg.knee_reach);
  p.end_reach = draw(cfg.end_reach);
  p.ankle_x = draw(cfg.ankle_offset);
  return p;
}

namespace {

double minimum_jerk(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
}

}  // namespace

GeneratedTrial generate_trial(const SyntheticSceneConfig& cfg, const TrialSpec& spec, std::uint64_t seed) {
  const Participant body = sample_participant(cfg, spec.participant_id);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double hold = cfg.hold_min_s + (cfg.hold_max_s - cfg.hold_min_s) * unit(rng);
  const double lift = cfg.lift_min_s + (cfg.lift_max_s - cfg.lift_min_s) * unit(rng);

  GeneratedTrial out;
  auto& meta = out.meta;
  meta.participant_id = spec.participant_id;
  meta.trial_id = spec.trial_id;
  meta.lift_origin = spec.origin;
  meta.hand_config = spec.hands;
  meta.box_mass_kg = spec.box_mass_kg;
  meta.available_views = {ViewId::V1, ViewId::V2, ViewId::V3};
  meta.fps = kVideoFps;
  meta.frame_count = cfg.frame_count;
  meta.lift_start_frame = static_cast<int>(std::lround(hold * kVideoFps));
  meta.lift_end_frame = std::min(cfg.frame_count - 1, static_cast<int>(std::lround((hold + lift) * kVideoFps)));

  // Event times sit exactly on frame times so the labels at the event frames
  // see the hold postures.
  const double t_start = static_cast<double>(meta.lift_start_frame) / kVideoFps;
  const double t_end = static_cast<double>(meta.lift_end_frame) / kVideoFps;

  const bool floor = spec.origin == kinlab::LiftOrigin::Floor;
  const double z0 = floor ? cfg.handle_height_m : body.knee_height;
  const double z1 = body.hip_height;
  const double x0 = body.ankle_x + (floor ? body.floor_reach : body.knee_reach);
  const double x1 = body.ankle_x + body.end_reach;
  const double half_grip = spec.hands == kinlab::HandConfig::Broad ? 0.26 : 0.165;
  const double head_drop = floor ? 0.55 : 0.30;
  const double lean = floor ? 0.35 : 0.20;
  const double grip_below_center = cfg.handle_height_m - 0.5 * cfg.box.height_m;

  auto& traj = out.trajectory;
  traj.trial_id = spec.trial_id;
  traj.sample_rate_hz = cfg.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::lround(cfg.frame_count * cfg.sample_rate_hz / kVideoFps));
  std::vector<Vec3> lh(n), rh(n), la(n), ra(n), head(n), box(n);
  traj.timestamps.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / cfg.sample_rate_hz;
    traj.timestamps[k] = t;
    const double s = minimum_jerk((t - t_start) / (t_end - t_start));
    const double x = x0 + (x1 - x0) * s + cfg.reach_bump_m * std::sin(std::numbers::pi * s);
    const double z = z0 + (z1 - z0) * s;
    lh[k] = {x, half_grip, z};
    rh[k] = {x, -half_grip, z};
    la[k] = {body.ankle_x, cfg.stance_half_width_m, cfg.malleolus_height_m};
    ra[k] = {body.ankle_x, -cfg.stance_half_width_m, cfg.malleolus_height_m};
    head[k] = {body.ankle_x + 0.05 + lean * (1.0 - s), 0.0, body.stature - 0.12 - head_drop * (1.0 - s)};
    box[k] = {x, 0.0, z - grip_below_center};
  }
  traj.joints.emplace(std::string(kinlab::kLeftHandTip), std::move(lh));
  traj.joints.emplace(std::string(kinlab::kRightHandTip), std::move(rh));
  traj.joints.emplace(std::string(kinlab::kLeftMalleolus), std::move(la));
  traj.joints.emplace(std::string(kinlab::kRightMalleolus), std::move(ra));
  traj.joints.emplace(std::string(kHead), std::move(head));
  traj.joints.emplace(std::string(kBoxCenter), std::move(box));
  return out;
}

}  // namespace lift::simscene
