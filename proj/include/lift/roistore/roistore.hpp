#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lift/common/types.hpp"

namespace lift::roistore {

inline constexpr std::string_view kStage1Prompt = "person lifting";
inline constexpr std::string_view kStage2Prompt = "hand . wrist . shoe . wooden box . crate . holding object";
inline constexpr std::array<std::string_view, 6> kStage2Labels{"hand", "wrist", "shoe", "wooden box", "crate",
                                                               "holding object"};
/// Labels that count as the handled object for geometric features.
inline constexpr std::array<std::string_view, 3> kHandledObjectLabels{"wooden box", "crate", "holding object"};
inline constexpr double kDefaultCropMargin = 0.10;

bool is_stage2_label(std::string_view label) noexcept;
bool is_handled_object(std::string_view label) noexcept;
/// Position of a stage-2 label in kStage2Labels; throws SchemaViolation.
std::size_t stage2_label_index(std::string_view label);

/// Axis-aligned box in full-frame pixel coordinates, x0 < x1, y0 < y1.
struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double center_x() const noexcept { return 0.5 * (x0 + x1); }
  double center_y() const noexcept { return 0.5 * (y0 + y1); }
  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Binary mask over a pixel rectangle anchored at (x, y) in the full frame.
/// Row-major runs that alternate 0/1 and always begin with a (possibly
/// empty) zero-run; runs sum to width*height.
struct MaskRLE {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const MaskRLE&, const MaskRLE&) = default;
};

MaskRLE encode_mask(int x, int y, int width, int height, std::span<const std::uint8_t> pixels);
std::vector<std::uint8_t> decode_mask(const MaskRLE& mask);
/// Mask of a filled rectangle [rx0, rx1) x [ry0, ry1) inside the mask frame.
MaskRLE rectangle_mask(int x, int y, int width, int height, int rx0, int ry0, int rx1, int ry1);
/// Tight full-frame box of the set pixels, or nullopt when the mask is empty.
std::optional<BBox> mask_extent(const MaskRLE& mask);
/// Throws BadRle when runs do not sum to width*height.
void validate_mask(const MaskRLE& mask);

struct DetectionRecord {
  int frame_index = 0;
  ViewId view = ViewId::V1;
  int stage = 1;
  std::string label;
  double score = 0.0;
  BBox bbox;
  std::optional<BBox> crop_rect;
  std::optional<MaskRLE> mask;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct DetectionHeader {
  std::string source = "simscene";
  std::string trial_id;
  int image_width = kImageWidth;
  int image_height = kImageHeight;
  double crop_margin = kDefaultCropMargin;
  double stage2_threshold = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

/// Records of one detection file grouped by (view, frame); record order
/// within a group follows file order.
struct DetectionSet {
  DetectionHeader header;
  std::vector<DetectionRecord> records;
  std::map<std::pair<ViewId, int>, std::vector<std::size_t>> groups;

  std::vector<DetectionRecord> frame_records(ViewId view, int frame) const;
};

/// Enforces record invariants against the image bounds. Throws
/// BoxOutOfBounds, BadRle or SchemaViolation.
void validate_record(const DetectionRecord& record, int image_width, int image_height);

/// Validates records against the header's image size and groups them.
DetectionSet make_detection_set(DetectionHeader header, std::vector<DetectionRecord> records);

DetectionSet parse_detection_records(std::string_view text);
DetectionSet load_detection_records(const std::filesystem::path& path);
std::string format_detection_records(const DetectionHeader& header, std::span<const DetectionRecord> records);

// -- section 2.4 selection logic --------------------------------------------

/// Highest-scoring stage-1 record; first in record order on ties.
std::optional<DetectionRecord> select_lifter(std::span<const DetectionRecord> frame_records);

/// Lifter box grown by margin_fraction of its width/height per side, clamped
/// to the image.
BBox crop_rect(const BBox& lifter, double margin_fraction, int image_width, int image_height);

/// Crop-local box back to full-frame coordinates. Throws OutOfCrop.
BBox remap_to_frame(const BBox& crop_local, const BBox& crop);

struct Roi {
  std::string label;
  double score = 0.0;
  BBox bbox;
  std::optional<MaskRLE> mask;
  std::size_t record = 0;  ///< index into the frame's record list
};

enum class FrameStatus { Valid, Partial, Invalid };

struct FrameRois {
  std::vector<Roi> rois;
  FrameStatus status = FrameStatus::Invalid;
};

/// Stage-2 ROIs of one frame for a pipeline. GD-SAM-Dv2 drops records
/// without masks (frame becomes Partial). No lifter or no surviving ROI
/// gives an Invalid frame.
FrameRois resolve_frame_rois(std::span<const DetectionRecord> frame_records, Pipeline pipeline,
                             double score_threshold = 0.0);

}  // namespace lift::roistore
