#include <cmath>

#include "lift/common/error.hpp"
#include "lift/common/seed.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::simscene {

std::array<double, kDescriptorDim> roi_descriptor(const roistore::DetectionRecord& record, std::string_view variant) {
  if (variant != "detect" && variant != "segment") throw_data("SchemaViolation", "unknown variant " + std::string(variant));
  roistore::BBox b = record.bbox;
  if (variant == "segment" && record.mask) {
    if (auto extent = roistore::mask_extent(*record.mask)) b = *extent;
  }
  std::array<double, kDescriptorDim> d{};
  const std::size_t label = record.stage == 2 ? roistore::stage2_label_index(record.label) : 0;
  const std::size_t slot = (label * 3 + static_cast<std::size_t>(record.view)) * 5;
  d[slot + 0] = b.center_x() / kImageWidth;
  d[slot + 1] = b.center_y() / kImageHeight;
  d[slot + 2] = b.width() / kImageWidth;
  d[slot + 3] = b.height() / kImageHeight;
  d[slot + 4] = 1.0;
  return d;
}

FeatureEncoder::FeatureEncoder(std::uint64_t map_seed, double detect_sd, double segment_sd)
    : map_(static_cast<std::size_t>(featpipe::kRoiDim) * kDescriptorDim), detect_sd_(detect_sd), segment_sd_(segment_sd) {
  Rng rng(map_seed);
  std::normal_distribution<float> n(0.0f, 1.0f);
  for (auto& w : map_) w = n(rng);
}

std::vector<float> FeatureEncoder::encode(const roistore::DetectionRecord& record, std::string_view variant,
                                          std::uint64_t noise_seed) const {
  const auto d = roi_descriptor(record, variant);
  const float sd = static_cast<float>(variant == "segment" ? segment_sd_ : detect_sd_);
  std::vector<float> out(featpipe::kRoiDim, 0.0f);
  // Descriptors hold a single active slot, so only five columns contribute.
  for (int j = 0; j < kDescriptorDim; ++j) {
    if (d[j] == 0.0) continue;
    const float dj = static_cast<float>(d[j]);
    const float* col = map_.data() + static_cast<std::size_t>(j) * featpipe::kRoiDim;
    for (int i = 0; i < featpipe::kRoiDim; ++i) out[i] += dj * col[i];
  }
  if (sd > 0.0f) {
    Rng rng(noise_seed);
    std::normal_distribution<float> n(0.0f, sd);
    for (auto& v : out) v += n(rng);
  }
  return out;
}

std::vector<float> encode_synthetic_features(const roistore::DetectionRecord& record, std::string_view variant,
                                             std::uint64_t seed, const SyntheticSceneConfig& cfg) {
  const FeatureEncoder encoder(derive_seed(cfg.seed, {tag("feature-map")}), cfg.detect_feature_sd,
                               cfg.segment_feature_sd);
  return encoder.encode(record, variant, seed);
}

}  // namespace lift::simscene
