#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/simscene/simscene.hpp"

using namespace lift;
using namespace lift::simscene;
namespace fs = std::filesystem;

namespace {

SyntheticSceneConfig small_config(int participants = 2, int trials = 4) {
  SyntheticSceneConfig cfg;
  cfg.participant_count = participants;
  cfg.trials_per_participant = trials;
  cfg.seed = 11;
  return cfg;
}

SyntheticSceneConfig noiseless(SyntheticSceneConfig cfg) {
  cfg.bbox_noise_px = 0.0;
  cfg.base_dropout = cfg.person_miss = cfg.mask_failure = 0.0;
  cfg.low_hand_oblique = cfg.low_hand_frontal = cfg.far_hand_oblique = 0.0;
  return cfg;
}

kinlab::FrameLabel label_at(const GeneratedTrial& g, int frame) {
  const auto video = kinlab::resample(g.trajectory, kVideoFps);
  return *kinlab::label_frames(video, g.meta).frames[static_cast<std::size_t>(frame)];
}

}  // namespace

TEST_CASE("pinhole projection") {
  const auto cam = look_at(ViewId::V3, {2.0, 0.0, 1.1}, {0.25, 0.0, 0.6});
  const auto centre = project_to_view({0.25, 0.0, 0.6}, cam);
  CHECK(centre.u == doctest::Approx(640.0));
  CHECK(centre.v == doctest::Approx(360.0));

  CameraModel raw;
  const auto p = project_camera_point({0.1, 0.0, 1.0}, raw);
  CHECK(p.u == doctest::Approx(raw.cx + 60.0));
  CHECK(p.v == doctest::Approx(raw.cy));
  try {
    project_camera_point({0.1, 0.0, 0.0}, raw);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == "BehindCamera");
  }
  raw.cx = -1;
  CHECK_THROWS_AS(raw.validate(), Error);
}

TEST_CASE("default rig geometry") {
  const RigConfig rig;
  const auto cams = default_cameras(rig);
  // World up projects upward (smaller v) in every view; the frontal camera
  // stands the standoff beyond the work-area edge.
  for (const auto& cam : cams) {
    const auto low = project_to_view({0.25, 0.0, 0.3}, cam);
    const auto high = project_to_view({0.25, 0.0, 0.9}, cam);
    CHECK(high.v < low.v);
    CHECK(project_to_view(rig.target, cam).u == doctest::Approx(640.0));
  }
  const Vec3 frontal_eye_cam = cams[2].to_camera({rig.work_edge_m + rig.standoff_m, 0.0, rig.camera_height_m});
  CHECK(std::abs(frontal_eye_cam.x) < 1e-12);
  CHECK(std::abs(frontal_eye_cam.z) < 1e-12);
  // V1 sits on the participant's left (+y): a point further left lands
  // nearer the image center-right axis than in V2.
  const auto left_v1 = cams[0].to_camera({0.25, 0.5, 0.6});
  const auto left_v2 = cams[1].to_camera({0.25, 0.5, 0.6});
  CHECK(left_v1.z < left_v2.z);
}

TEST_CASE("balanced trial plan") {
  const auto plan = trial_plan(small_config(2, 24));
  REQUIRE(plan.size() == 48);
  CHECK(plan[0].trial_id == "P01_T01");
  CHECK(plan[47].trial_id == "P02_T24");
  int floor = 0, broad = 0, heavy = 0;
  for (const auto& s : plan) {
    floor += s.origin == kinlab::LiftOrigin::Floor;
    broad += s.hands == kinlab::HandConfig::Broad;
    heavy += s.box_mass_kg == 12;
  }
  CHECK(floor == 24);
  CHECK(broad == 24);
  CHECK(heavy == 16);
}

TEST_CASE("generated trials are deterministic and hit their construction heights") {
  auto cfg = small_config();
  cfg.hip_height = {0.95, 0.0};
  const auto plan = trial_plan(cfg);
  const auto a = generate_trial(cfg, plan[0], 5);
  const auto b = generate_trial(cfg, plan[0], 5);
  CHECK(a.trajectory.timestamps == b.trajectory.timestamps);
  CHECK(a.trajectory.joints == b.trajectory.joints);
  CHECK(a.meta.lift_start_frame < a.meta.lift_end_frame);
  CHECK_NOTHROW(a.meta.validate());
  CHECK(a.trajectory.joints.contains(std::string(kHead)));

  REQUIRE(plan[0].origin == kinlab::LiftOrigin::Floor);
  CHECK(std::abs(label_at(a, a.meta.lift_start_frame).v_mm - 1000.0 * cfg.handle_height_m) <= 1.0);
  CHECK(std::abs(label_at(a, a.meta.lift_end_frame).v_mm - 950.0) <= 1.0);

  const auto c = generate_trial(cfg, plan[0], 6);
  CHECK(c.trajectory.joints != a.trajectory.joints);
}

TEST_CASE("rendering without noise puts hand boxes on the projected hands") {
  const auto cfg = noiseless(small_config());
  const auto plan = trial_plan(cfg);
  const auto g = generate_trial(cfg, plan[0], 3);
  const auto video = kinlab::resample(g.trajectory, kVideoFps);
  for (const auto& cam : default_cameras(cfg.rig)) {
    const auto recs = render_rois(video, g.meta, cam, cfg, 9);
    int hands = 0;
    for (const auto& r : recs) {
      if (r.label != "hand") continue;
      ++hands;
      const auto k = static_cast<std::size_t>(r.frame_index);
      const auto pl = project_to_view(video.joint(kinlab::kLeftHandTip)[k], cam);
      const auto pr = project_to_view(video.joint(kinlab::kRightHandTip)[k], cam);
      const double dl = std::hypot(r.bbox.center_x() - pl.u, r.bbox.center_y() - pl.v);
      const double dr = std::hypot(r.bbox.center_x() - pr.u, r.bbox.center_y() - pr.v);
      CHECK(std::min(dl, dr) < 1e-9);
      CHECK(r.mask.has_value());
    }
    CHECK(hands == 2 * g.meta.frame_count);
    CHECK_NOTHROW(roistore::make_detection_set({}, recs));
  }
}

TEST_CASE("label dropout 1.0 removes that label everywhere") {
  auto cfg = small_config();
  cfg.label_dropout[roistore::stage2_label_index("hand")] = 1.0;
  const auto g = generate_trial(cfg, trial_plan(cfg)[1], 3);
  const auto video = kinlab::resample(g.trajectory, kVideoFps);
  const auto cam = default_cameras()[2];
  const auto recs = render_rois(video, g.meta, cam, cfg, 1);
  CHECK(std::none_of(recs.begin(), recs.end(), [](const auto& r) { return r.label == "hand"; }));
  CHECK(render_rois(video, g.meta, cam, cfg, 1) == recs);
  CHECK(render_rois(video, g.meta, cam, cfg, 2) != recs);
}

TEST_CASE("synthetic features") {
  auto cfg = small_config();
  cfg.detect_feature_sd = cfg.segment_feature_sd = 0.0;
  roistore::DetectionRecord r;
  r.stage = 2;
  r.label = "hand";
  r.view = ViewId::V2;
  r.bbox = {100, 100, 140, 150};
  r.crop_rect = roistore::BBox{0, 0, 600, 700};
  const auto a = encode_synthetic_features(r, "detect", 1, cfg);
  CHECK(a.size() == 768u);
  CHECK(encode_synthetic_features(r, "detect", 2, cfg) == a);
  auto moved = r;
  moved.bbox.x0 += 5;
  moved.bbox.x1 += 5;
  CHECK(encode_synthetic_features(moved, "detect", 1, cfg) != a);
  CHECK_THROWS_AS(encode_synthetic_features(r, "sketch", 1, cfg), Error);

  // The segment variant localizes from the mask.
  r.mask = roistore::rectangle_mask(100, 100, 40, 50, 10, 10, 30, 40);
  const auto d = roi_descriptor(r, "segment");
  const auto slot = (roistore::stage2_label_index("hand") * 3 + 1) * 5;
  CHECK(d[slot] == doctest::Approx(120.0 / kImageWidth));
  CHECK(d[slot + 2] == doctest::Approx(20.0 / kImageWidth));
  CHECK(d[slot + 4] == 1.0);

  cfg.detect_feature_sd = 1.0;
  CHECK(encode_synthetic_features(r, "detect", 1, cfg) != encode_synthetic_features(r, "detect", 2, cfg));
}

TEST_CASE("datasets on disk load back to the in-memory dataset") {
  const auto cfg = small_config(2, 3);
  const auto root = fs::temp_directory_path() / "lift_test_simscene";
  fs::remove_all(root);
  const auto manifest = write_dataset(root, cfg, "d1g3st");
  CHECK(manifest.trials.size() == 6);
  CHECK(fs::exists(trajectory_path(root, "P01_T01")));
  CHECK(fs::exists(detection_path(root, "P02_T03", ViewId::V3)));
  CHECK(fs::exists(feature_path(root, "P02_T03", ViewId::V1, Pipeline::GdSamDv2)));

  kinlab::Manifest loaded_manifest;
  const auto loaded = load_dataset(root, &loaded_manifest);
  const auto memory = build_dataset(cfg);
  CHECK(loaded_manifest.config_digest == "d1g3st");
  REQUIRE(loaded.size() == memory.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].meta.trial_id == memory[i].meta.trial_id);
    CHECK(loaded[i].labels.frames == memory[i].labels.frames);
    REQUIRE(loaded[i].views.size() == memory[i].views.size());
    for (const auto& [key, frames] : memory[i].views) {
      const auto& other = loaded[i].views.at(key);
      REQUIRE(other.size() == frames.size());
      for (std::size_t k = 0; k < frames.size(); ++k) {
        CHECK(other[k].values == frames[k].values);
        CHECK(other[k].valid == frames[k].valid);
      }
    }
  }

  // Rewriting with the same seed reproduces every file byte for byte.
  const auto again = fs::temp_directory_path() / "lift_test_simscene_again";
  fs::remove_all(again);
  write_dataset(again, cfg, "d1g3st");
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    ++files;
    CHECK(read_file(e.path()) == read_file(again / fs::relative(e.path(), root)));
  }
  CHECK(files == 1 + 6 + 6 * 3 + 6 * 3 * 2);
  fs::remove_all(root);
  fs::remove_all(again);
}

TEST_CASE("scene config validation") {
  auto cfg = small_config();
  cfg.base_dropout = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.frame_count = 40;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
