#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lift/common/types.hpp"
#include "lift/kinlab/kinlab.hpp"
#include "lift/roistore/roistore.hpp"

namespace lift::featpipe {

inline constexpr int kRoiDim = 768;
inline constexpr int kGeomDim = 5;
inline constexpr int kFrameDim = kRoiDim + kGeomDim;
inline constexpr int kWindowLength = 100;
inline constexpr int kWindowStride = 50;
inline constexpr double kTargetScaleMm = 2000.0;

/// Physical handled-box dimensions, meters.
struct BoxDims {
  double width_m = 0.26;
  double depth_m = 0.41;
  double height_m = 0.235;
};

// -- feature store -----------------------------------------------------------

struct FeatureEntry {
  int frame_index = 0;
  std::string roi_label;
  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

/// One ROI feature vector per entry, for one (trial, view, variant).
/// Entries follow the detection file: one per stage-2 record eligible for the
/// variant (every record for `detect`, masked records for `segment`).
struct FeatureStore {
  int dim = kRoiDim;
  std::string trial_id;
  ViewId view = ViewId::V1;
  std::string variant = "detect";
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<FeatureEntry> entries;
  std::vector<float> data;

  std::span<const float> vector(std::size_t entry) const {
    return {data.data() + entry * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// `LFT1`, u16 LE version, u32 LE header length, UTF-8 JSON header,
/// then entries*dim little-endian float32.
std::string serialize_feature_store(const FeatureStore& store);
FeatureStore deserialize_feature_store(std::string_view bytes);
FeatureStore load_feature_store(const std::filesystem::path& path);
void save_feature_store(const std::filesystem::path& path, const FeatureStore& store);

// -- per-frame representation --------------------------------------------------

struct FrameVector {
  int frame_index = 0;
  std::vector<float> values = std::vector<float>(kFrameDim, 0.0f);
  bool valid = false;
  /// Valid but degraded: masks dropped or no handled-object geometry.
  bool partial = false;
  /// Score of the handled-object ROI that supplied the geometric slots; < 0 if none.
  double handled_score = -1.0;
};

/// (bbox_w / image_w, bbox_h / image_h, width_m, depth_m, height_m).
/// Throws DegenerateBox for zero-area boxes.
std::array<double, kGeomDim> geometric_features(const roistore::BBox& handled, int image_width, int image_height,
                                                const BoxDims& dims = {});

struct PooledFeatures {
  std::vector<float> values = std::vector<float>(kRoiDim, 0.0f);
  bool valid = false;
};

/// Element-wise mean of ROI vectors; empty input gives zeros and invalid.
/// Throws DimMismatch.
PooledFeatures pool_frame_features(std::span<const std::span<const float>> rois);

/// Mean over valid views; geometric slots from the valid view with the
/// highest handled-object score (ties averaged). Throws FrameIndexMismatch.
FrameVector fuse_views(std::span<const FrameVector> views);

/// Per-frame vectors for one trial/view/pipeline from its detection set and
/// feature store. Throws FeatureMismatch when an ROI has no stored vector.
std::vector<FrameVector> build_view_frames(const roistore::DetectionSet& detections, ViewId view,
                                           const FeatureStore& store, Pipeline pipeline, int frame_count,
                                           const BoxDims& dims = {}, double score_threshold = 0.0);

// -- targets -----------------------------------------------------------------

double normalize_target(double value_mm);
double denormalize_target(double value);

// -- windows -----------------------------------------------------------------

enum class WindowKind : std::uint8_t { Train, LiftStart, LiftEnd };

struct WindowInfo {
  std::string trial_id;
  std::string participant_id;
  int start_frame = 0;
  WindowKind kind = WindowKind::Train;
  /// In-window position of the lift event for LiftStart/LiftEnd windows.
  int event_offset = -1;
};

/// Row-major (count x length x dim) features, (count x length) mask and
/// (count x length x 2) normalized targets. Masked-off positions carry zero
/// features and zero targets.
struct SequenceBatch {
  int length = kWindowLength;
  int dim = kFrameDim;
  std::size_t count = 0;
  std::vector<float> features;
  std::vector<std::uint8_t> mask;
  std::vector<float> targets;
  std::vector<int> frame_index;
  std::vector<WindowInfo> info;

  SequenceBatch() = default;
  SequenceBatch(int length, int dim) : length(length), dim(dim) {}

  std::size_t positions() const noexcept { return count * static_cast<std::size_t>(length); }
  std::size_t unmasked() const noexcept;
  void append(const SequenceBatch& other);
  SequenceBatch subset(std::span<const std::size_t> windows) const;
  /// Appends one all-masked window and returns its index.
  std::size_t add_empty_window(WindowInfo info);
};

struct TrialIdentity {
  std::string trial_id;
  std::string participant_id;
};

/// Windows at 0, stride, 2*stride ... until one reaches the last frame; the
/// final window is zero-padded. Invalid or unlabeled frames get mask false.
/// Throws Empty for zero frames.
SequenceBatch make_windows(std::span<const FrameVector> frames, const kinlab::LabelTrack& labels,
                           const TrialIdentity& id, int window = kWindowLength, int stride = kWindowStride);

/// Start-of-lift and end-of-lift windows centered on the event frames,
/// clamped to the trial and zero-padded past its end. Throws EventOutOfRange.
SequenceBatch extract_eval_sequences(std::span<const FrameVector> frames, const kinlab::LabelTrack& labels,
                                     const kinlab::LiftTrialMeta& meta, int window = kWindowLength);

// -- assembled dataset -------------------------------------------------------

/// Everything training and evaluation need from one trial.
struct TrialRecord {
  kinlab::LiftTrialMeta meta;
  kinlab::LabelTrack labels;
  /// Per-frame vectors keyed by (pipeline, view); a missing key means the
  /// view is unavailable for that trial.
  std::map<std::pair<Pipeline, ViewId>, std::vector<FrameVector>> views;
};

}  // namespace lift::featpipe
