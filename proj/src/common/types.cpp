#include "lift/common/types.hpp"

#include "lift/common/error.hpp"

namespace lift {

std::string_view to_string(ViewId v) noexcept {
  switch (v) {
    case ViewId::V1: return "V1";
    case ViewId::V2: return "V2";
    case ViewId::V3: return "V3";
  }
  return "?";
}

std::string_view to_string(Pipeline p) noexcept {
  return p == Pipeline::GdDv2 ? "GD-Dv2" : "GD-SAM-Dv2";
}

std::string_view variant_name(Pipeline p) noexcept {
  return p == Pipeline::GdDv2 ? "detect" : "segment";
}

ViewId parse_view(std::string_view text) {
  if (text == "V1") return ViewId::V1;
  if (text == "V2") return ViewId::V2;
  if (text == "V3") return ViewId::V3;
  throw_data("SchemaViolation", "unknown view '" + std::string(text) + "'");
}

Pipeline parse_pipeline(std::string_view text) {
  if (text == "GD-Dv2" || text == "detect") return Pipeline::GdDv2;
  if (text == "GD-SAM-Dv2" || text == "segment") return Pipeline::GdSamDv2;
  throw_config("BadPipeline", "unknown pipeline '" + std::string(text) + "'");
}

}  // namespace lift
