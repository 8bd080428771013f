#pragma once

#include <string_view>

#include "icy/types.hpp"

namespace icy {

/// Pinhole intrinsics with square pixels and the principal point at the
/// image centre. Vertical field of view follows from the aspect ratio.
struct CameraIntrinsics {
  double sensor_width = 60.0;  // mm
  double focal_length = 32.0;  // mm
  int image_width = 640;
  int image_height = 480;

  double focal_px() const { return focal_length / sensor_width * image_width; }
  double principal_x() const { return 0.5 * image_width; }
  double principal_y() const { return 0.5 * image_height; }

  /// Camera-frame direction (z = 1) through the centre of pixel (x, y).
  Vec3 pixel_direction(int x, int y) const;

  void validate() const;
};

/// Camera-to-world transform. Rotation columns are the camera x (right),
/// y (down) and z (optical axis) directions in world coordinates.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  static CameraPose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

  Vec3 world_to_camera(const Vec3& p) const { return rotation.transpose() * (p - position); }
  Vec3 camera_to_world_dir(const Vec3& d) const { return rotation * d; }
};

enum class Eye { left, right };

std::string_view to_string(Eye eye);

/// Parallel-axis stereo pair; the right camera sits `baseline` meters along
/// the left camera's x axis.
struct StereoRig {
  CameraIntrinsics intrinsics;
  double baseline = 0.25;
  CameraPose left;

  CameraPose pose(Eye eye) const;
  /// Ground-truth disparity in pixels for a planar depth z: f * B / z.
  double disparity_for_depth(double z) const { return intrinsics.focal_px() * baseline / z; }

  void validate() const;
};

}  // namespace icy
