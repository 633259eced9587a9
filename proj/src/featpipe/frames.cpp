#include <cmath>
#include <unordered_map>

#include "lift/common/error.hpp"
#include "lift/featpipe/featpipe.hpp"

namespace lift::featpipe {

std::array<double, kGeomDim> geometric_features(const roistore::BBox& handled, int image_width, int image_height,
                                                const BoxDims& dims) {
  if (!(handled.width() > 0.0) || !(handled.height() > 0.0))
    throw_data("DegenerateBox", "handled-object box has zero area");
  if (image_width <= 0 || image_height <= 0) throw_config("BadImageSize", "image dimensions must be positive");
  return {handled.width() / image_width, handled.height() / image_height, dims.width_m, dims.depth_m, dims.height_m};
}

PooledFeatures pool_frame_features(std::span<const std::span<const float>> rois) {
  PooledFeatures out;
  if (rois.empty()) return out;
  std::vector<double> acc(kRoiDim, 0.0);
  for (const auto& roi : rois) {
    if (roi.size() != static_cast<std::size_t>(kRoiDim))
      throw_data("DimMismatch", "ROI vector has " + std::to_string(roi.size()) + " values, expected 768");
    for (int i = 0; i < kRoiDim; ++i) acc[i] += roi[i];
  }
  const double n = static_cast<double>(rois.size());
  for (int i = 0; i < kRoiDim; ++i) out.values[i] = static_cast<float>(acc[i] / n);
  out.valid = true;
  return out;
}

FrameVector fuse_views(std::span<const FrameVector> views) {
  if (views.empty()) throw_data("FrameIndexMismatch", "no views to fuse");
  FrameVector out;
  out.frame_index = views.front().frame_index;
  for (const auto& v : views) {
    if (v.frame_index != out.frame_index) throw_data("FrameIndexMismatch", "views disagree on frame index");
    if (v.values.size() != static_cast<std::size_t>(kFrameDim)) throw_data("DimMismatch", "frame vector must have 773 values");
  }

  std::vector<double> acc(kRoiDim, 0.0);
  int valid = 0;
  double best_score = -1.0;
  for (const auto& v : views) {
    if (!v.valid) continue;
    ++valid;
    for (int i = 0; i < kRoiDim; ++i) acc[i] += v.values[i];
    best_score = std::max(best_score, v.handled_score);
    out.partial = out.partial || v.partial;
  }
  if (valid == 0) return out;

  out.valid = true;
  for (int i = 0; i < kRoiDim; ++i) out.values[i] = static_cast<float>(acc[i] / valid);
  if (best_score >= 0.0) {
    std::array<double, kGeomDim> geom{};
    int tied = 0;
    for (const auto& v : views) {
      if (!v.valid || v.handled_score != best_score) continue;
      ++tied;
      for (int g = 0; g < kGeomDim; ++g) geom[g] += v.values[kRoiDim + g];
    }
    for (int g = 0; g < kGeomDim; ++g) out.values[kRoiDim + g] = static_cast<float>(geom[g] / tied);
    out.handled_score = best_score;
  } else {
    out.partial = true;
  }
  return out;
}

std::vector<FrameVector> build_view_frames(const roistore::DetectionSet& detections, ViewId view,
                                           const FeatureStore& store, Pipeline pipeline, int frame_count,
                                           const BoxDims& dims, double score_threshold) {
  if (store.dim != kRoiDim) throw_data("DimMismatch", "feature store dim must be 768");
  std::unordered_map<int, std::vector<std::size_t>> by_frame;
  for (std::size_t e = 0; e < store.entries.size(); ++e) by_frame[store.entries[e].frame_index].push_back(e);

  std::vector<FrameVector> frames(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    FrameVector& fv = frames[static_cast<std::size_t>(f)];
    fv.frame_index = f;
    const auto records = detections.frame_records(view, f);
    const auto rois = roistore::resolve_frame_rois(records, pipeline, score_threshold);
    if (rois.status == roistore::FrameStatus::Invalid) continue;

    // Ordinal of each record among the records this variant stores vectors for.
    std::vector<int> ordinal(records.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const bool eligible = records[i].stage == 2 && (pipeline == Pipeline::GdDv2 || records[i].mask.has_value());
      if (eligible) ordinal[i] = next++;
    }
    const auto found = by_frame.find(f);
    const std::size_t stored = found == by_frame.end() ? 0 : found->second.size();
    if (stored != static_cast<std::size_t>(next))
      throw_data("FeatureMismatch", store.trial_id + " frame " + std::to_string(f) + ": " + std::to_string(stored) +
                                        " stored vectors for " + std::to_string(next) + " eligible records");

    std::vector<std::span<const float>> vectors;
    const roistore::Roi* handled = nullptr;
    for (const auto& roi : rois.rois) {
      const std::size_t entry = found->second[static_cast<std::size_t>(ordinal[roi.record])];
      if (store.entries[entry].roi_label != roi.label)
        throw_data("FeatureMismatch", store.trial_id + " frame " + std::to_string(f) + ": label order differs");
      vectors.push_back(store.vector(entry));
      if (roistore::is_handled_object(roi.label) && (handled == nullptr || roi.score > handled->score)) handled = &roi;
    }
    const auto pooled = pool_frame_features(vectors);
    std::copy(pooled.values.begin(), pooled.values.end(), fv.values.begin());
    fv.valid = true;
    fv.partial = rois.status == roistore::FrameStatus::Partial;
    if (handled != nullptr) {
      const auto geom = geometric_features(handled->bbox, detections.header.image_width,
                                           detections.header.image_height, dims);
      for (int g = 0; g < kGeomDim; ++g) fv.values[kRoiDim + g] = static_cast<float>(geom[g]);
      fv.handled_score = handled->score;
    } else {
      fv.partial = true;
    }
  }
  return frames;
}

double normalize_target(double value_mm) {
  if (!std::isfinite(value_mm)) throw_numeric("NonFinite", "target must be finite");
  return value_mm / kTargetScaleMm;
}

double denormalize_target(double value) {
  if (!std::isfinite(value)) throw_numeric("NonFinite", "prediction must be finite");
  return value * kTargetScaleMm;
}

}  // namespace lift::featpipe
