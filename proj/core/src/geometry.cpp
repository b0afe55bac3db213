#include "synact/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace synact {

namespace {
constexpr double kSmallAngle = 1e-10;
}

Mat3d skew(const Vec3d& v) {
    Mat3d s;
    s << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
        -v.y(), v.x(), 0;
    return s;
}

Mat3d rotation_from_axis_angle(const Vec3d& rotvec) {
    const double theta = rotvec.norm();
    if (theta < kSmallAngle) return Mat3d::Identity() + skew(rotvec);
    return Eigen::AngleAxisd(theta, rotvec / theta).toRotationMatrix();
}

Vec3d axis_angle_from_rotation(const Mat3d& r) {
    const double cos_theta = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    const Vec3d w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    if (theta < 1e-7) return 0.5 * w;
    if (std::numbers::pi - theta < 1e-6) {
        // Near pi the antisymmetric part vanishes; recover the axis from the
        // symmetric part instead.
        Eigen::AngleAxisd aa(r);
        return aa.angle() * aa.axis();
    }
    return w * (theta / (2.0 * std::sin(theta)));
}

Mat3d rotation_y(double radians) {
    return Eigen::AngleAxisd(radians, Vec3d::UnitY()).toRotationMatrix();
}

Affine rotation_about_vertical(const Vec3d& pivot, double radians) {
    Affine a = Affine::Identity();
    a.linear() = rotation_y(radians);
    a.translation() = pivot - a.linear() * pivot;
    return a;
}

namespace se3 {

Isometry exp(const Vec6d& xi) {
    const Vec3d w = xi.head<3>();
    const Vec3d u = xi.tail<3>();
    const double theta = w.norm();
    Isometry t = Isometry::Identity();
    const Mat3d wx = skew(w);
    Mat3d v;
    if (theta < kSmallAngle) {
        t.linear() = Mat3d::Identity() + wx;
        v = Mat3d::Identity() + 0.5 * wx;
    } else {
        const double t2 = theta * theta;
        const double a = std::sin(theta) / theta;
        const double b = (1.0 - std::cos(theta)) / t2;
        const double c = (theta - std::sin(theta)) / (t2 * theta);
        t.linear() = Mat3d::Identity() + a * wx + b * wx * wx;
        v = Mat3d::Identity() + b * wx + c * wx * wx;
    }
    t.translation() = v * u;
    return t;
}

Vec6d log(const Isometry& pose) {
    const Vec3d w = axis_angle_from_rotation(pose.linear());
    const double theta = w.norm();
    const Mat3d wx = skew(w);
    Mat3d v_inv;
    if (theta < kSmallAngle) {
        v_inv = Mat3d::Identity() - 0.5 * wx;
    } else {
        const double half = 0.5 * theta;
        const double coef = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
        v_inv = Mat3d::Identity() - 0.5 * wx + coef * wx * wx;
    }
    Vec6d xi;
    xi.head<3>() = w;
    xi.tail<3>() = v_inv * pose.translation();
    return xi;
}

Mat6d adjoint(const Isometry& pose) {
    Mat6d ad = Mat6d::Zero();
    const Mat3d r = pose.linear();
    ad.block<3, 3>(0, 0) = r;
    ad.block<3, 3>(3, 3) = r;
    ad.block<3, 3>(3, 0) = skew(pose.translation()) * r;
    return ad;
}

Mat6d right_jacobian_inverse_approx(const Vec6d& xi) {
    Mat6d ad = Mat6d::Zero();
    const Mat3d wx = skew(xi.head<3>());
    ad.block<3, 3>(0, 0) = wx;
    ad.block<3, 3>(3, 3) = wx;
    ad.block<3, 3>(3, 0) = skew(xi.tail<3>());
    return Mat6d::Identity() + 0.5 * ad;
}

Isometry orthonormalized(const Isometry& pose) {
    Isometry out = pose;
    Eigen::Quaterniond q(pose.linear());
    out.linear() = q.normalized().toRotationMatrix();
    return out;
}

}  // namespace se3

}  // namespace synact
