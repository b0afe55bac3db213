#pragma once

#include "synact/raster/raster.hpp"
#include "synact/scene/scene.hpp"

#include <cmath>
#include <optional>

namespace test {

struct Hit {
    double t = 0;       // distance along the unit ray
    double b_min = 0;   // smallest barycentric coordinate, for edge rejection
};

// Moller-Trumbore, double precision.
inline std::optional<Hit> ray_triangle(const synact::Vec3d& o, const synact::Vec3d& d, const synact::Vec3d& a,
                                       const synact::Vec3d& b, const synact::Vec3d& c) {
    const synact::Vec3d e1 = b - a, e2 = c - a;
    const synact::Vec3d p = d.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-14) return std::nullopt;
    const double inv = 1.0 / det;
    const synact::Vec3d s = o - a;
    const double u = s.dot(p) * inv;
    if (u < 0 || u > 1) return std::nullopt;
    const synact::Vec3d q = s.cross(e1);
    const double v = d.dot(q) * inv;
    if (v < 0 || u + v > 1) return std::nullopt;
    const double t = e2.dot(q) * inv;
    if (t <= 0) return std::nullopt;
    return Hit{t, std::min({u, v, 1 - u - v})};
}

// World-space ray through the centre of pixel (x, y).
inline void pixel_ray(const synact::Camera& cam, int w, int h, int x, int y, synact::Vec3d& origin, synact::Vec3d& dir) {
    const double tan_half = std::tan(cam.vfov / 2);
    const double ndc_x = ((x + 0.5) / w * 2 - 1) * tan_half * cam.aspect;
    const double ndc_y = (1 - (y + 0.5) / h * 2) * tan_half;
    origin = cam.pose.translation();
    dir = (cam.pose.linear() * synact::Vec3d(ndc_x, ndc_y, -1)).normalized();
}

}  // namespace test
