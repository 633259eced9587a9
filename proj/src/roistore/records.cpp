#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lift/common/error.hpp"
#include "lift/common/textio.hpp"
#include "lift/roistore/roistore.hpp"

namespace lift::roistore {

using ordered_json = nlohmann::ordered_json;

bool is_stage2_label(std::string_view label) noexcept {
  return std::find(kStage2Labels.begin(), kStage2Labels.end(), label) != kStage2Labels.end();
}

bool is_handled_object(std::string_view label) noexcept {
  return std::find(kHandledObjectLabels.begin(), kHandledObjectLabels.end(), label) != kHandledObjectLabels.end();
}

std::size_t stage2_label_index(std::string_view label) {
  auto it = std::find(kStage2Labels.begin(), kStage2Labels.end(), label);
  if (it == kStage2Labels.end()) throw_data("SchemaViolation", "label '" + std::string(label) + "' not in vocabulary");
  return static_cast<std::size_t>(it - kStage2Labels.begin());
}

std::vector<DetectionRecord> DetectionSet::frame_records(ViewId view, int frame) const {
  std::vector<DetectionRecord> out;
  auto it = groups.find({view, frame});
  if (it == groups.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(records[idx]);
  return out;
}

namespace {

void check_box(const BBox& b, int w, int h, const char* what) {
  if (!(b.x0 < b.x1) || !(b.y0 < b.y1))
    throw_data("BoxOutOfBounds", std::string(what) + " is degenerate or inverted");
  if (!(b.x0 >= 0.0 && b.y0 >= 0.0 && b.x1 <= w && b.y1 <= h))
    throw_data("BoxOutOfBounds", std::string(what) + " leaves the " + std::to_string(w) + "x" + std::to_string(h) + " image");
}

ordered_json box_json(const BBox& b) { return ordered_json::array({b.x0, b.y0, b.x1, b.y1}); }

BBox box_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 4) throw_data("SchemaViolation", "box must be [x0, y0, x1, y1]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

ordered_json record_json(const DetectionRecord& r) {
  ordered_json j{{"frame_index", r.frame_index},
                 {"view_id", std::string(to_string(r.view))},
                 {"stage", r.stage},
                 {"label", r.label},
                 {"score", r.score},
                 {"bbox", box_json(r.bbox)}};
  if (r.crop_rect) j["crop_rect"] = box_json(*r.crop_rect);
  if (r.mask) {
    j["mask"] = ordered_json{{"x", r.mask->x},
                             {"y", r.mask->y},
                             {"width", r.mask->width},
                             {"height", r.mask->height},
                             {"counts", r.mask->counts}};
  }
  return j;
}

DetectionRecord record_from(const ordered_json& j) {
  static const std::array<std::string_view, 8> known{"frame_index", "view_id", "stage", "label",
                                                     "score",       "bbox",    "crop_rect", "mask"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw_data("SchemaViolation", "unknown record field '" + key + "'");
  DetectionRecord r;
  r.frame_index = j.at("frame_index").get<int>();
  r.view = parse_view(j.at("view_id").get<std::string>());
  r.stage = j.at("stage").get<int>();
  r.label = j.at("label").get<std::string>();
  r.score = j.at("score").get<double>();
  r.bbox = box_from(j.at("bbox"));
  if (j.contains("crop_rect")) r.crop_rect = box_from(j.at("crop_rect"));
  if (j.contains("mask")) {
    const auto& m = j.at("mask");
    r.mask = MaskRLE{m.at("x").get<int>(), m.at("y").get<int>(), m.at("width").get<int>(), m.at("height").get<int>(),
                     m.at("counts").get<std::vector<std::uint32_t>>()};
  }
  return r;
}

}  // namespace

void validate_record(const DetectionRecord& r, int image_width, int image_height) {
  if (r.frame_index < 0) throw_data("SchemaViolation", "negative frame_index");
  if (r.stage != 1 && r.stage != 2) throw_data("SchemaViolation", "stage must be 1 or 2");
  if (r.stage == 1 && r.label != kStage1Prompt)
    throw_data("SchemaViolation", "stage-1 label must be '" + std::string(kStage1Prompt) + "'");
  if (r.stage == 2 && !is_stage2_label(r.label))
    throw_data("SchemaViolation", "stage-2 label '" + r.label + "' not in vocabulary");
  if (!(r.score >= 0.0 && r.score <= 1.0)) throw_data("SchemaViolation", "score outside [0, 1]");
  check_box(r.bbox, image_width, image_height, "bbox");
  if (r.stage == 2) {
    if (!r.crop_rect) throw_data("SchemaViolation", "stage-2 record without crop_rect");
    check_box(*r.crop_rect, image_width, image_height, "crop_rect");
    const BBox& c = *r.crop_rect;
    if (r.bbox.x0 < c.x0 || r.bbox.y0 < c.y0 || r.bbox.x1 > c.x1 || r.bbox.y1 > c.y1)
      throw_data("BoxOutOfBounds", "stage-2 bbox outside its crop_rect");
  } else if (r.crop_rect) {
    throw_data("SchemaViolation", "stage-1 record carries crop_rect");
  }
  if (r.mask) {
    validate_mask(*r.mask);
    const MaskRLE& m = *r.mask;
    if (m.x < std::floor(r.bbox.x0) || m.y < std::floor(r.bbox.y0) || m.x + m.width > std::ceil(r.bbox.x1) ||
        m.y + m.height > std::ceil(r.bbox.y1))
      throw_data("BadRle", "mask does not fit within its bbox");
  }
}

DetectionSet make_detection_set(DetectionHeader header, std::vector<DetectionRecord> records) {
  DetectionSet set;
  set.header = std::move(header);
  set.records = std::move(records);
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& r = set.records[i];
    validate_record(r, set.header.image_width, set.header.image_height);
    set.groups[{r.view, r.frame_index}].push_back(i);
  }
  return set;
}

DetectionSet parse_detection_records(std::string_view text) {
  DetectionSet set;
  bool have_header = false;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw_data("SchemaViolation", "line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        if (!j.contains("header")) throw_data("SchemaViolation", "first line must be the header object");
        const auto& h = j.at("header");
        if (h.value("schema", "") != "lift-detections/1") throw_data("SchemaViolation", "unknown detection schema");
        const auto& prompts = h.at("prompts");
        if (prompts.at("stage1").get<std::string>() != kStage1Prompt ||
            prompts.at("stage2").get<std::string>() != kStage2Prompt)
          throw_data("SchemaViolation", "prompt vocabulary differs from the fixed prompts");
        set.header.source = h.value("source", "");
        set.header.trial_id = h.value("trial_id", "");
        set.header.image_width = h.value("image_width", kImageWidth);
        set.header.image_height = h.value("image_height", kImageHeight);
        set.header.crop_margin = h.value("crop_margin", kDefaultCropMargin);
        set.header.stage2_threshold = h.value("stage2_threshold", 0.0);
        set.header.seed = h.value("seed", std::uint64_t{0});
        set.header.config_digest = h.value("config_digest", "");
        have_header = true;
        continue;
      }
      DetectionRecord r = record_from(j);
      validate_record(r, set.header.image_width, set.header.image_height);
      set.groups[{r.view, r.frame_index}].push_back(set.records.size());
      set.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw_data("SchemaViolation", "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw_data("SchemaViolation", "empty detection file");
  return set;
}

DetectionSet load_detection_records(const std::filesystem::path& path) {
  return parse_detection_records(read_file(path));
}

std::string format_detection_records(const DetectionHeader& header, std::span<const DetectionRecord> records) {
  ordered_json h{{"schema", "lift-detections/1"},
                 {"source", header.source},
                 {"trial_id", header.trial_id},
                 {"image_width", header.image_width},
                 {"image_height", header.image_height},
                 {"prompts", ordered_json{{"stage1", kStage1Prompt}, {"stage2", kStage2Prompt}}},
                 {"crop_margin", header.crop_margin},
                 {"stage2_threshold", header.stage2_threshold},
                 {"seed", header.seed},
                 {"config_digest", header.config_digest}};
  std::string out = ordered_json{{"header", h}}.dump() + '\n';
  for (const auto& r : records) out += record_json(r).dump() + '\n';
  return out;
}

}  // namespace lift::roistore
