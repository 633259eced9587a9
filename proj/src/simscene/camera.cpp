#include <cmath>
#include <numbers>

#include "lift/common/error.hpp"
#include "lift/simscene/simscene.hpp"

namespace lift::simscene {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 unit(const Vec3& a) { return (1.0 / std::sqrt(dot(a, a))) * a; }

}  // namespace

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw_config("BadCamera", "focal lengths must be positive");
  if (!(cx >= 0.0 && cx < kImageWidth) || !(cy >= 0.0 && cy < kImageHeight))
    throw_config("BadCamera", "principal point outside the 1280x720 image");
}

Vec3 CameraModel::to_camera(const Vec3& p) const {
  const auto& R = rotation;
  return {R[0] * p.x + R[1] * p.y + R[2] * p.z + translation.x, R[3] * p.x + R[4] * p.y + R[5] * p.z + translation.y,
          R[6] * p.x + R[7] * p.y + R[8] * p.z + translation.z};
}

Pixel project_camera_point(const Vec3& c, const CameraModel& cam) {
  if (!(c.z > 0.0)) throw_data("BehindCamera", "point has camera-frame depth " + std::to_string(c.z));
  return {cam.cx + cam.fx * c.x / c.z, cam.cy + cam.fy * c.y / c.z};
}

Pixel project_to_view(const Vec3& world_point, const CameraModel& cam) {
  return project_camera_point(cam.to_camera(world_point), cam);
}

CameraModel look_at(ViewId view, const Vec3& eye, const Vec3& target, double focal_px) {
  const Vec3 forward = unit(target - eye);
  const Vec3 right = unit(cross(forward, Vec3{0, 0, 1}));
  const Vec3 down = cross(forward, right);
  CameraModel cam;
  cam.view = view;
  cam.fx = cam.fy = focal_px;
  cam.rotation = {right.x, right.y, right.z, down.x, down.y, down.z, forward.x, forward.y, forward.z};
  cam.translation = {-dot(right, eye), -dot(down, eye), -dot(forward, eye)};
  cam.validate();
  return cam;
}

std::array<CameraModel, 3> default_cameras(const RigConfig& rig) {
  // All three sit on a circle around the target whose frontal point is the
  // stated standoff beyond the work-area edge.
  const double radius = rig.work_edge_m + rig.standoff_m - rig.target.x;
  auto eye_at = [&](double azimuth_deg) {
    const double a = azimuth_deg * std::numbers::pi / 180.0;
    return Vec3{rig.target.x + radius * std::cos(a), rig.target.y + radius * std::sin(a), rig.camera_height_m};
  };
  return {look_at(ViewId::V1, eye_at(rig.oblique_deg), rig.target, rig.focal_px),
          look_at(ViewId::V2, eye_at(-rig.oblique_deg), rig.target, rig.focal_px),
          look_at(ViewId::V3, eye_at(0.0), rig.target, rig.focal_px)};
}

}  // namespace lift::simscene
