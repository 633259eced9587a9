#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lift/common/types.hpp"

namespace lift::kinlab {

inline constexpr std::string_view kLeftHandTip = "left_hand_tip";
inline constexpr std::string_view kRightHandTip = "right_hand_tip";
inline constexpr std::string_view kLeftMalleolus = "left_medial_malleolus";
inline constexpr std::string_view kRightMalleolus = "right_medial_malleolus";
inline constexpr std::array<std::string_view, 4> kRequiredLandmarks{
    kLeftHandTip, kRightHandTip, kLeftMalleolus, kRightMalleolus};

/// Timestamped landmark positions of one trial, meters.
/// Axes: x anterior-posterior, y mediolateral, z vertical (floor at z = 0).
struct JointTrajectory {
  std::string trial_id;
  double sample_rate_hz = 0.0;
  std::vector<double> timestamps;
  std::map<std::string, std::vector<Vec3>, std::less<>> joints;

  std::size_t size() const noexcept { return timestamps.size(); }
  const std::vector<Vec3>& joint(std::string_view name) const;

  /// Throws MissingLandmark / LengthMismatch / NonMonotonicTime / BadRate.
  void validate() const;
};

struct FrameLabel {
  int frame_index = 0;
  double h_mm = 0.0;
  double v_mm = 0.0;

  bool operator==(const FrameLabel&) const = default;
};

enum class LiftOrigin { Floor, Knee };
enum class HandConfig { Broad, Narrow };

std::string_view to_string(LiftOrigin o) noexcept;
std::string_view to_string(HandConfig h) noexcept;

struct LiftTrialMeta {
  std::string participant_id;
  std::string trial_id;
  LiftOrigin lift_origin = LiftOrigin::Floor;
  HandConfig hand_config = HandConfig::Broad;
  int box_mass_kg = 6;
  std::vector<ViewId> available_views;
  int fps = kVideoFps;
  int frame_count = 0;
  int lift_start_frame = 0;
  int lift_end_frame = 0;

  /// Throws BadManifest on any violated invariant.
  void validate() const;
};

/// Per-frame labels for one video; absent where no trajectory sample lies
/// within half a frame period of the frame time.
struct LabelTrack {
  std::vector<std::optional<FrameLabel>> frames;

  std::size_t present_count() const noexcept;
};

// -- trajectory file ---------------------------------------------------------

/// Comma-separated: `# rate_hz=<r>` comment, then `t,<name>.x,<name>.y,<name>.z,...`.
JointTrajectory parse_joint_trajectories(std::string_view text, std::string trial_id);
JointTrajectory load_joint_trajectories(const std::filesystem::path& path);
std::string format_joint_trajectories(const JointTrajectory& traj);

// -- signal processing -------------------------------------------------------

/// Zero-phase Butterworth low-pass on every coordinate channel.
/// Throws NyquistViolation when rate <= 2*cutoff and TooShort when the
/// trajectory cannot host 3*(order+1) samples of reflection padding.
JointTrajectory lowpass_filter(const JointTrajectory& traj, double cutoff_hz = 6.0, int order = 4);

/// Integer-ratio decimation, otherwise linear interpolation at t0 + k/target.
JointTrajectory resample(const JointTrajectory& traj, double target_hz = 30.0);

// -- labels ------------------------------------------------------------------

/// Horizontal hands-to-ankles midpoint distance, millimeters.
double compute_h(const Vec3& left_hand, const Vec3& right_hand, const Vec3& left_ankle,
                 const Vec3& right_ankle);
/// Mean hand-tip height above the floor, millimeters.
double compute_v(const Vec3& left_hand, const Vec3& right_hand);

struct LabelOptions {
  /// Subtract the trial's minimum malleolus height from V.
  bool floor_from_malleoli = false;
};

LabelTrack label_frames(const JointTrajectory& traj, const LiftTrialMeta& meta,
                        const LabelOptions& options = {});

std::string format_labels(const LabelTrack& labels);
LabelTrack parse_labels(std::string_view text);

// -- manifest ----------------------------------------------------------------

struct Manifest {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<LiftTrialMeta> trials;
};

std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

}  // namespace lift::kinlab
