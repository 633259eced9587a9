#include <algorithm>

#include "lift/common/error.hpp"
#include "lift/roistore/roistore.hpp"

namespace lift::roistore {

std::optional<DetectionRecord> select_lifter(std::span<const DetectionRecord> frame_records) {
  const DetectionRecord* best = nullptr;
  for (const auto& r : frame_records) {
    if (r.stage != 1) continue;
    if (best == nullptr || r.score > best->score) best = &r;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

BBox crop_rect(const BBox& lifter, double margin_fraction, int image_width, int image_height) {
  const double mx = margin_fraction * lifter.width();
  const double my = margin_fraction * lifter.height();
  return {std::clamp(lifter.x0 - mx, 0.0, static_cast<double>(image_width)),
          std::clamp(lifter.y0 - my, 0.0, static_cast<double>(image_height)),
          std::clamp(lifter.x1 + mx, 0.0, static_cast<double>(image_width)),
          std::clamp(lifter.y1 + my, 0.0, static_cast<double>(image_height))};
}

BBox remap_to_frame(const BBox& crop_local, const BBox& crop) {
  if (crop_local.x0 < 0.0 || crop_local.y0 < 0.0 || crop_local.x1 > crop.width() || crop_local.y1 > crop.height())
    throw_data("OutOfCrop", "box exceeds the crop extents");
  return {crop_local.x0 + crop.x0, crop_local.y0 + crop.y0, crop_local.x1 + crop.x0, crop_local.y1 + crop.y0};
}

FrameRois resolve_frame_rois(std::span<const DetectionRecord> frame_records, Pipeline pipeline,
                             double score_threshold) {
  FrameRois out;
  if (!select_lifter(frame_records)) return out;

  bool dropped = false;
  for (std::size_t i = 0; i < frame_records.size(); ++i) {
    const auto& r = frame_records[i];
    if (r.stage != 2 || r.score < score_threshold) continue;
    if (pipeline == Pipeline::GdSamDv2) {
      if (!r.mask) {
        dropped = true;
        continue;
      }
      out.rois.push_back({r.label, r.score, r.bbox, r.mask, i});
    } else {
      out.rois.push_back({r.label, r.score, r.bbox, std::nullopt, i});
    }
  }
  if (out.rois.empty()) out.status = FrameStatus::Invalid;
  else out.status = dropped ? FrameStatus::Partial : FrameStatus::Valid;
  return out;
}

}  // namespace lift::roistore
