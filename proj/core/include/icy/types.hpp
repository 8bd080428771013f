#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace icy {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Linear RGB triple. Component-wise arithmetic.
using Color = Eigen::Array3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace icy
