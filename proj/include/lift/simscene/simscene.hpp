#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lift/common/types.hpp"
#include "lift/featpipe/featpipe.hpp"
#include "lift/kinlab/kinlab.hpp"
#include "lift/roistore/roistore.hpp"

namespace lift::simscene {

// Extra landmarks carried by synthetic trajectories for rendering.
inline constexpr std::string_view kHead = "head";
inline constexpr std::string_view kBoxCenter = "box_center";

// -- cameras -------------------------------------------------------------------

/// Pinhole camera, world->camera extrinsics. Camera axes: x right, y down,
/// z along the optical axis.
struct CameraModel {
  ViewId view = ViewId::V3;
  double fx = 600.0, fy = 600.0, cx = 640.0, cy = 360.0;
  std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};  ///< row-major
  Vec3 translation;

  /// Throws BadCamera.
  void validate() const;
  Vec3 to_camera(const Vec3& world) const;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

/// Camera-frame point to pixels. Throws BehindCamera for depth <= 0.
Pixel project_camera_point(const Vec3& camera_point, const CameraModel& cam);
Pixel project_to_view(const Vec3& world_point, const CameraModel& cam);

/// Camera at `eye` looking at `target` with world z up.
CameraModel look_at(ViewId view, const Vec3& eye, const Vec3& target, double focal_px = 600.0);

struct RigConfig {
  /// Distance from the work-area edge to each camera, meters.
  double standoff_m = 1.74;
  /// Front edge of the work area, meters anterior of the ankles.
  double work_edge_m = 0.60;
  double camera_height_m = 1.10;
  /// Azimuth of the two oblique cameras around the frontal axis.
  double oblique_deg = 40.0;
  double focal_px = 600.0;
  Vec3 target{0.25, 0.0, 0.60};
};

/// V1 at +azimuth (participant's left), V2 at -azimuth, V3 frontal.
std::array<CameraModel, 3> default_cameras(const RigConfig& rig = {});

// -- scene configuration -----------------------------------------------------

struct Normal {
  double mean = 0.0;
  double sd = 0.0;
};

struct SyntheticSceneConfig {
  int participant_count = 8;
  int trials_per_participant = 24;

  // Anthropometry and task geometry, meters.
  Normal hip_height{0.95, 0.05};
  Normal knee_height{0.50, 0.03};
  Normal stature{1.72, 0.08};
  Normal floor_reach{0.46, 0.03};  ///< hands anterior of ankles at a floor-origin start
  Normal knee_reach{0.38, 0.03};
  Normal end_reach{0.30, 0.03};
  Normal ankle_offset{0.0, 0.02};  ///< per-participant stance position along x
  double handle_height_m = 0.20;   ///< grip height of the box resting on the floor
  double reach_bump_m = 0.03;      ///< extra anterior excursion mid-lift
  double stance_half_width_m = 0.12;
  double malleolus_height_m = 0.075;
  featpipe::BoxDims box;

  // Timing.
  double sample_rate_hz = 100.0;
  int frame_count = 90;
  double hold_min_s = 0.5, hold_max_s = 0.8;
  double lift_min_s = 1.0, lift_max_s = 1.4;

  // Detector and feature noise.
  double bbox_noise_px = 8.0;
  double detect_feature_sd = 1.0;
  double segment_feature_sd = 0.4;

  // Occlusion dropout probabilities.
  double base_dropout = 0.03;
  double person_miss = 0.01;
  double mask_failure = 0.03;
  double low_hand_height_m = 0.45;   ///< hands below this count as near the floor
  double low_hand_oblique = 0.45;    ///< hands near the floor, V1/V2
  double low_hand_frontal = 0.10;    ///< hands near the floor, V3
  double far_hand_oblique = 0.15;    ///< the hand on the far side of an oblique camera
  /// Per-label overrides (index into kStage2Labels); negative means unset.
  std::array<double, 6> label_dropout{-1, -1, -1, -1, -1, -1};

  RigConfig rig;
  std::uint64_t seed = 0;

  /// Throws BadConfig.
  void validate() const;
};

// -- trials ------------------------------------------------------------------

struct TrialSpec {
  std::string participant_id;
  std::string trial_id;
  kinlab::LiftOrigin origin = kinlab::LiftOrigin::Floor;
  kinlab::HandConfig hands = kinlab::HandConfig::Broad;
  int box_mass_kg = 6;
};

/// The balanced design: origin x hand configuration x mass, repeated.
std::vector<TrialSpec> trial_plan(const SyntheticSceneConfig& cfg);

struct Participant {
  double hip_height = 0.0;
  double knee_height = 0.0;
  double stature = 0.0;
  double floor_reach = 0.0;
  double knee_reach = 0.0;
  double end_reach = 0.0;
  double ankle_x = 0.0;
};

/// Anthropometry drawn from (cfg.seed, participant_id).
Participant sample_participant(const SyntheticSceneConfig& cfg, std::string_view participant_id);

struct GeneratedTrial {
  kinlab::JointTrajectory trajectory;  ///< cfg.sample_rate_hz
  kinlab::LiftTrialMeta meta;
};

/// Hold, minimum-jerk lift, hold. Pure in (cfg, spec, seed).
GeneratedTrial generate_trial(const SyntheticSceneConfig& cfg, const TrialSpec& spec, std::uint64_t seed);

// -- rendering ---------------------------------------------------------------

/// Detection records of one view for a 30 fps trajectory: a stage-1 person
/// box, stage-2 hand, shoe and box ROIs with pixel noise and occlusion
/// dropout, and rectangular masks for the segmentation variant.
std::vector<roistore::DetectionRecord> render_rois(const kinlab::JointTrajectory& traj,
                                                   const kinlab::LiftTrialMeta& meta, const CameraModel& cam,
                                                   const SyntheticSceneConfig& cfg, std::uint64_t seed);

// -- features ----------------------------------------------------------------

/// Label-and-view gated slots of (cx, cy, w, h, present).
inline constexpr int kDescriptorDim = 6 * 3 * 5;

std::array<double, kDescriptorDim> roi_descriptor(const roistore::DetectionRecord& record, std::string_view variant);

/// Fixed random linear map from descriptors to 768-d vectors plus Gaussian
/// noise; the segment variant localizes from the mask and is less noisy.
class FeatureEncoder {
public:
  FeatureEncoder(std::uint64_t map_seed, double detect_sd, double segment_sd);

  /// Throws SchemaViolation for an unknown variant.
  std::vector<float> encode(const roistore::DetectionRecord& record, std::string_view variant,
                            std::uint64_t noise_seed) const;

private:
  std::vector<float> map_;  ///< column-major 768 x kDescriptorDim
  double detect_sd_;
  double segment_sd_;
};

std::vector<float> encode_synthetic_features(const roistore::DetectionRecord& record, std::string_view variant,
                                             std::uint64_t seed, const SyntheticSceneConfig& cfg = {});

// -- datasets ----------------------------------------------------------------

struct SimulatedTrial {
  GeneratedTrial trial;
  std::array<std::vector<roistore::DetectionRecord>, 3> detections;  ///< by view
  std::array<std::array<featpipe::FeatureStore, 2>, 3> features;     ///< by view, then pipeline
};

/// Per-trial seed that simulate_trial hands to generate_trial.
std::uint64_t trial_seed(const SyntheticSceneConfig& cfg, std::string_view trial_id);

/// Renders every view and encodes both variants for one trial.
SimulatedTrial simulate_trial(const SyntheticSceneConfig& cfg, const TrialSpec& spec,
                              const std::string& config_digest = {});

/// Filter, resample and label the trajectory, then build per-view frames
/// exactly as files on disk would be assembled.
featpipe::TrialRecord assemble_record(const kinlab::JointTrajectory& trajectory, const kinlab::LiftTrialMeta& meta,
                                      const std::array<roistore::DetectionSet, 3>& detections,
                                      const std::array<std::array<featpipe::FeatureStore, 2>, 3>& features);

/// In-memory dataset for every planned trial.
std::vector<featpipe::TrialRecord> build_dataset(const SyntheticSceneConfig& cfg);

/// Writes manifest.json, trajectories/, detections/ and features/ under root.
/// Returns the manifest that was written.
kinlab::Manifest write_dataset(const std::filesystem::path& root, const SyntheticSceneConfig& cfg,
                               const std::string& config_digest);

std::filesystem::path trajectory_path(const std::filesystem::path& root, std::string_view trial_id);
std::filesystem::path detection_path(const std::filesystem::path& root, std::string_view trial_id, ViewId view);
std::filesystem::path feature_path(const std::filesystem::path& root, std::string_view trial_id, ViewId view,
                                   Pipeline pipeline);

/// Loads a dataset written by write_dataset (or by an adapter using the same
/// layout). Throws MissingArtifact and the loaders' data errors.
std::vector<featpipe::TrialRecord> load_dataset(const std::filesystem::path& root, kinlab::Manifest* manifest = nullptr);


}  // namespace lift::simscene
