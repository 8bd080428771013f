#include "icy/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace icy {

Vec3 CameraIntrinsics::pixel_direction(int x, int y) const {
  const double f = focal_px();
  return Vec3((x + 0.5 - principal_x()) / f, (y + 0.5 - principal_y()) / f, 1.0);
}

void CameraIntrinsics::validate() const {
  if (!(sensor_width > 0.0)) throw std::invalid_argument("CameraIntrinsics: sensor_width must be > 0");
  if (!(focal_length > 0.0)) throw std::invalid_argument("CameraIntrinsics: focal_length must be > 0");
  if (image_width <= 0 || image_height <= 0) {
    throw std::invalid_argument("CameraIntrinsics: image dimensions must be > 0");
  }
}

CameraPose CameraPose::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) {
    // Looking along `up`: pick any perpendicular right vector.
    right = forward.cross(std::abs(forward.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX());
  }
  right.normalize();
  const Vec3 down = forward.cross(right);
  CameraPose pose;
  pose.position = eye;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  return pose;
}

std::string_view to_string(Eye eye) { return eye == Eye::left ? "left" : "right"; }

CameraPose StereoRig::pose(Eye eye) const {
  if (eye == Eye::left) return left;
  CameraPose right = left;
  right.position += baseline * left.rotation.col(0);
  return right;
}

void StereoRig::validate() const {
  intrinsics.validate();
  if (!(baseline > 0.0)) throw std::invalid_argument("StereoRig: baseline must be > 0");
  const Mat3 should_be_identity = left.rotation.transpose() * left.rotation;
  if (!should_be_identity.isIdentity(1e-9)) {
    throw std::invalid_argument("StereoRig: pose rotation must be orthonormal");
  }
}

}  // namespace icy
