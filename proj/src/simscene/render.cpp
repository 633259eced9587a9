#include <algorithm>
#include <cmath>
#include <limits>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::simscene {

namespace {

using roistore::BBox;

constexpr double kHandHalfSize = 0.05;
constexpr double kHeadRadius = 0.12;

struct Extent {
  double u0 = std::numeric_limits<double>::infinity(), v0 = u0;
  double u1 = -u0, v1 = -u0;

  void add(const Pixel& p) {
    u0 = std::min(u0, p.u);
    v0 = std::min(v0, p.v);
    u1 = std::max(u1, p.u);
    v1 = std::max(v1, p.v);
  }
  BBox box() const { return {u0, v0, u1, v1}; }
};

BBox clamp_box(BBox b, const BBox& to) {
  b.x0 = std::clamp(b.x0, to.x0, to.x1);
  b.x1 = std::clamp(b.x1, to.x0, to.x1);
  b.y0 = std::clamp(b.y0, to.y0, to.y1);
  b.y1 = std::clamp(b.y1, to.y0, to.y1);
  return b;
}

BBox project_points(std::initializer_list<Vec3> points, const CameraModel& cam) {
  Extent e;
  for (const Vec3& p : points) e.add(project_to_view(p, cam));
  return e.box();
}

BBox box_corners(const Vec3& c, const featpipe::BoxDims& d, const CameraModel& cam) {
  Extent e;
  for (int i = 0; i < 8; ++i) {
    const Vec3 corner{c.x + ((i & 1) ? 0.5 : -0.5) * d.depth_m, c.y + ((i & 2) ? 0.5 : -0.5) * d.width_m,
                      c.z + ((i & 4) ? 0.5 : -0.5) * d.height_m};
    e.add(project_to_view(corner, cam));
  }
  return e.box();
}

BBox hand_box(const Vec3& tip, const CameraModel& cam) {
  const Vec3 c = cam.to_camera(tip);
  const Pixel p = project_camera_point(c, cam);
  const double su = cam.fx * kHandHalfSize / c.z, sv = cam.fy * kHandHalfSize / c.z;
  return {p.u - su, p.v - sv, p.u + su, p.v + sv};
}

BBox shoe_box(const Vec3& ankle, const CameraModel& cam) {
  const double z = ankle.z;
  return project_points({{ankle.x - 0.06, ankle.y - 0.045, 0.0},
                         {ankle.x + 0.18, ankle.y - 0.045, 0.0},
                         {ankle.x - 0.06, ankle.y + 0.045, 0.0},
                         {ankle.x + 0.18, ankle.y + 0.045, 0.0},
                         {ankle.x, ankle.y, z + 0.03}},
                        cam);
}

/// Noiseless rectangle clipped to the noisy box, on the box's pixel grid.
std::optional<roistore::MaskRLE> inner_mask(const BBox& truth, const BBox& noisy) {
  const int mx = static_cast<int>(std::floor(noisy.x0)), my = static_cast<int>(std::floor(noisy.y0));
  const int w = static_cast<int>(std::ceil(noisy.x1)) - mx, h = static_cast<int>(std::ceil(noisy.y1)) - my;
  const int rx0 = static_cast<int>(std::ceil(std::max(truth.x0, noisy.x0))) - mx;
  const int ry0 = static_cast<int>(std::ceil(std::max(truth.y0, noisy.y0))) - my;
  const int rx1 = static_cast<int>(std::floor(std::min(truth.x1, noisy.x1))) - mx;
  const int ry1 = static_cast<int>(std::floor(std::min(truth.y1, noisy.y1))) - my;
  if (w <= 0 || h <= 0 || rx1 <= rx0 || ry1 <= ry0) return std::nullopt;
  return roistore::rectangle_mask(mx, my, w, h, rx0, ry0, rx1, ry1);
}

}  // namespace

std::vector<roistore::DetectionRecord> render_rois(const kinlab::JointTrajectory& traj,
                                                   const kinlab::LiftTrialMeta& meta, const CameraModel& cam,
                                                   const SyntheticSceneConfig& cfg, std::uint64_t seed) {
  traj.validate();
  if (std::abs(traj.sample_rate_hz - meta.fps) > 1e-9)
    throw_data("RateMismatch", "render_rois needs a trajectory at the video frame rate");
  if (traj.size() < static_cast<std::size_t>(meta.frame_count))
    throw_data("LengthMismatch", "trajectory shorter than the video");

  const auto& lh = traj.joint(kinlab::kLeftHandTip);
  const auto& rh = traj.joint(kinlab::kRightHandTip);
  const auto& la = traj.joint(kinlab::kLeftMalleolus);
  const auto& ra = traj.joint(kinlab::kRightMalleolus);
  const auto& head = traj.joint(kHead);
  const auto& box = traj.joint(kBoxCenter);

  const BBox image{0.0, 0.0, static_cast<double>(kImageWidth), static_cast<double>(kImageHeight)};
  const bool oblique = cam.view != ViewId::V3;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto jitter = [&](double v) { return v + cfg.bbox_noise_px * noise(rng); };
  auto rate_for = [&](std::string_view label) {
    const double over = cfg.label_dropout[roistore::stage2_label_index(label)];
    return over >= 0.0 ? over : cfg.base_dropout;
  };

  std::vector<roistore::DetectionRecord> out;
  for (int f = 0; f < meta.frame_count; ++f) {
    const auto k = static_cast<std::size_t>(f);
    if (unit(rng) < cfg.person_miss) continue;

    Extent body;
    for (const Vec3& p : {lh[k], rh[k], la[k], ra[k]}) body.add(project_to_view(p, cam));
    body.add(project_to_view(head[k] + Vec3{0, 0, kHeadRadius}, cam));
    const BBox box_truth = box_corners(box[k], cfg.box, cam);
    body.add({box_truth.x0, box_truth.y0});
    body.add({box_truth.x1, box_truth.y1});
    BBox person = body.box();
    const double pad_u = 0.04 * person.width(), pad_v = 0.04 * person.height();
    person = clamp_box({jitter(person.x0 - pad_u), jitter(person.y0 - pad_v), jitter(person.x1 + pad_u),
                        jitter(person.y1 + pad_v)},
                       image);
    if (!(person.width() >= 2.0 && person.height() >= 2.0)) continue;

    roistore::DetectionRecord lifter;
    lifter.frame_index = f;
    lifter.view = cam.view;
    lifter.stage = 1;
    lifter.label = std::string(roistore::kStage1Prompt);
    lifter.score = 0.80 + 0.19 * unit(rng);
    lifter.bbox = person;
    out.push_back(lifter);
    const BBox crop = roistore::crop_rect(person, roistore::kDefaultCropMargin, kImageWidth, kImageHeight);

    struct Target {
      std::string_view label;
      BBox truth;
      double dropout;
    };
    std::vector<Target> targets;
    for (int side = 0; side < 2; ++side) {
      const Vec3& tip = side == 0 ? lh[k] : rh[k];
      double p = rate_for("hand");
      if (tip.z < cfg.low_hand_height_m) p = std::max(p, oblique ? cfg.low_hand_oblique : cfg.low_hand_frontal);
      // V1 sits on the participant's left, so the right hand is the far one.
      const bool far = (cam.view == ViewId::V1 && side == 1) || (cam.view == ViewId::V2 && side == 0);
      if (far) p = 1.0 - (1.0 - p) * (1.0 - cfg.far_hand_oblique);
      targets.push_back({"hand", hand_box(tip, cam), p});
    }
    targets.push_back({"shoe", shoe_box(la[k], cam), rate_for("shoe")});
    targets.push_back({"shoe", shoe_box(ra[k], cam), rate_for("shoe")});
    targets.push_back({"wooden box", box_truth, rate_for("wooden box")});

    for (const Target& t : targets) {
      // Draw every variate up front so a dropped ROI leaves later draws alone.
      const double drop = unit(rng);
      BBox noisy{jitter(t.truth.x0), jitter(t.truth.y0), jitter(t.truth.x1), jitter(t.truth.y1)};
      const double score = 0.50 + 0.45 * unit(rng);
      const double mask_draw = unit(rng);
      if (drop < t.dropout) continue;
      if (noisy.x0 > noisy.x1) std::swap(noisy.x0, noisy.x1);
      if (noisy.y0 > noisy.y1) std::swap(noisy.y0, noisy.y1);
      noisy = clamp_box(noisy, crop);
      if (!(noisy.width() >= 1.0 && noisy.height() >= 1.0)) continue;

      roistore::DetectionRecord r;
      r.frame_index = f;
      r.view = cam.view;
      r.stage = 2;
      r.label = std::string(t.label);
      r.score = score;
      r.bbox = noisy;
      r.crop_rect = crop;
      if (mask_draw >= cfg.mask_failure) r.mask = inner_mask(t.truth, noisy);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace lift::simscene
