#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace lift {

inline constexpr int kImageWidth = 1280;
inline constexpr int kImageHeight = 720;
inline constexpr int kVideoFps = 30;

enum class ViewId : std::uint8_t { V1 = 0, V2 = 1, V3 = 2 };
inline constexpr std::array<ViewId, 3> kAllViews{ViewId::V1, ViewId::V2, ViewId::V3};

/// Detection-only vs detection-plus-segmentation ROI pipeline.
enum class Pipeline : std::uint8_t { GdDv2 = 0, GdSamDv2 = 1 };

std::string_view to_string(ViewId v) noexcept;
std::string_view to_string(Pipeline p) noexcept;
ViewId parse_view(std::string_view text);
Pipeline parse_pipeline(std::string_view text);

/// Feature-store variant name tied to each pipeline ("detect" / "segment").
std::string_view variant_name(Pipeline p) noexcept;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

}  // namespace lift
