#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>

namespace synact {

using Vec2f = Eigen::Vector2f;
using Vec3f = Eigen::Vector3f;
using Vec2d = Eigen::Vector2d;
using Vec3d = Eigen::Vector3d;
using Mat3d = Eigen::Matrix3d;
using Mat4d = Eigen::Matrix4d;
using Vec6d = Eigen::Matrix<double, 6, 1>;
using Mat6d = Eigen::Matrix<double, 6, 6>;

// Rigid transform (rotation + translation).
using Isometry = Eigen::Isometry3d;
// General invertible affine transform (rigid + uniform/non-uniform scale).
using Affine = Eigen::Affine3d;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Mat3d skew(const Vec3d& v);

// Rotation vector (axis * angle, radians) <-> rotation matrix.
Mat3d rotation_from_axis_angle(const Vec3d& rotvec);
Vec3d axis_angle_from_rotation(const Mat3d& rotation);

// Rotation about the world vertical (+y) axis.
Mat3d rotation_y(double radians);

// Rotation by `radians` about the vertical line through `pivot`.
Affine rotation_about_vertical(const Vec3d& pivot, double radians);

namespace se3 {

// Tangent vectors are ordered [omega (rotation), upsilon (translation)].
Isometry exp(const Vec6d& xi);
Vec6d log(const Isometry& pose);

// Adjoint of a pose acting on [omega, upsilon] tangent vectors.
Mat6d adjoint(const Isometry& pose);

// Small-residual approximation of the inverse right Jacobian.
Mat6d right_jacobian_inverse_approx(const Vec6d& xi);

// Re-orthonormalize the rotation block (guards drift after many compositions).
Isometry orthonormalized(const Isometry& pose);

}  // namespace se3

}  // namespace synact
