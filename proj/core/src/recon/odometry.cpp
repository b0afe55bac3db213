#include "synact/recon/registration.hpp"

#include "synact/error.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace synact {

Mat6d point_information(const std::vector<Vec3d>& points) {
    Mat6d info = Mat6d::Zero();
    if (points.empty()) return info;
    for (const auto& p : points) {
        Eigen::Matrix<double, 3, 6> g;
        g.block<3, 3>(0, 0) = -skew(p);
        g.block<3, 3>(0, 3) = Mat3d::Identity();
        info.noalias() += g.transpose() * g;
    }
    return info / static_cast<double>(points.size());
}

namespace {

struct Association {
    bool ok = false;
    Vec3d p;  // source point in the target frame
    Vec3d q;
    Vec3d n;
};

Association associate(const VertexMap& target, const Isometry& t, const Vec3f& src) {
    Association a;
    a.p = t * src.cast<double>();
    if (a.p.z() <= 1e-6) return a;
    const Intrinsics& k = target.intrinsics;
    const long u = std::lround(k.fx * a.p.x() / a.p.z() + k.cx);
    const long v = std::lround(k.fy * a.p.y() / a.p.z() + k.cy);
    if (u < 0 || v < 0 || u >= target.width || v >= target.height) return a;
    const std::size_t i = static_cast<std::size_t>(v) * target.width + static_cast<std::size_t>(u);
    if (!target.valid(i) || !target.has_normal(i)) return a;
    a.q = target.points[i].cast<double>();
    a.n = target.normals[i].cast<double>();
    a.ok = true;
    return a;
}

// Level l sample (x, y) is level 0 pixel (2^l x, 2^l y), matching downsample().
std::vector<GrayImage> intensity_pyramid(const GrayImage& base, int levels) {
    std::vector<GrayImage> out{base};
    for (int l = 1; l < levels; ++l) {
        const GrayImage& prev = out.back();
        GrayImage next(prev.width / 2, prev.height / 2);
        for (int y = 0; y < next.height; ++y)
            for (int x = 0; x < next.width; ++x) {
                double sum = 0, wsum = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int sx = 2 * x + dx, sy = 2 * y + dy;
                        if (sx < 0 || sy < 0 || sx >= prev.width || sy >= prev.height) continue;
                        const double w = (2 - std::abs(dx)) * (2 - std::abs(dy));
                        sum += w * prev.at(sx, sy);
                        wsum += w;
                    }
                next.at(x, y) = static_cast<float>(sum / wsum);
            }
        out.push_back(std::move(next));
    }
    return out;
}

struct IntensitySample {
    double value = 0;
    double gx = 0;
    double gy = 0;
};

// Bilinear intensity and central-difference gradient at continuous pixel
// coordinates (pixel-index convention). False near the border.
bool sample_intensity(const GrayImage& img, double u, double v, IntensitySample& s) {
    const int x0 = static_cast<int>(std::floor(u)), y0 = static_cast<int>(std::floor(v));
    if (x0 < 1 || y0 < 1 || x0 + 2 >= img.width || y0 + 2 >= img.height) return false;
    const double fx = u - x0, fy = v - y0;
    auto bil = [&](auto f) {
        return (1 - fx) * (1 - fy) * f(x0, y0) + fx * (1 - fy) * f(x0 + 1, y0) + (1 - fx) * fy * f(x0, y0 + 1) +
               fx * fy * f(x0 + 1, y0 + 1);
    };
    s.value = bil([&](int x, int y) { return static_cast<double>(img.at(x, y)); });
    s.gx = bil([&](int x, int y) { return 0.5 * (img.at(x + 1, y) - img.at(x - 1, y)); });
    s.gy = bil([&](int x, int y) { return 0.5 * (img.at(x, y + 1) - img.at(x, y - 1)); });
    return true;
}

}  // namespace

OdometryResult rgbd_odometry(const RGBDFrame& a, const RGBDFrame& b, const Isometry& init, const OdometryParams& params) {
    a.validate();
    b.validate();
    if (params.levels < 1 || params.iterations.size() < static_cast<std::size_t>(params.levels) ||
        params.max_distance_m.size() < static_cast<std::size_t>(params.levels))
        throw ConfigError("odometry needs iteration counts and distances for every level");

    std::vector<VertexMap> pa{make_vertex_map(a, params.max_depth_m)};
    std::vector<VertexMap> pb{make_vertex_map(b, params.max_depth_m)};
    for (int l = 1; l < params.levels; ++l) {
        pa.push_back(downsample(pa.back()));
        pb.push_back(downsample(pb.back()));
    }
    if (!(params.hybrid_lambda > 0.0 && params.hybrid_lambda <= 1.0)) throw ConfigError("hybrid_lambda must be in (0, 1]");
    const bool photometric = params.hybrid_lambda < 1.0;
    std::vector<GrayImage> ia, ib;
    if (photometric) {
        ia = intensity_pyramid(a.intensity, params.levels);
        ib = intensity_pyramid(b.intensity, params.levels);
    }
    const double wg = std::sqrt(params.hybrid_lambda), wi = std::sqrt(1.0 - params.hybrid_lambda);

    Isometry t = init;
    for (int l = params.levels - 1; l >= 0; --l) {
        const VertexMap& ta = pa[static_cast<std::size_t>(l)];
        const VertexMap& sb = pb[static_cast<std::size_t>(l)];
        const double max_d2 = params.max_distance_m[static_cast<std::size_t>(l)] * params.max_distance_m[static_cast<std::size_t>(l)];
        for (int it = 0; it < params.iterations[static_cast<std::size_t>(l)]; ++it) {
            Mat6d h = Mat6d::Zero();
            Vec6d g = Vec6d::Zero();
            std::size_t count = 0;
            for (std::size_t i = 0; i < sb.points.size(); ++i) {
                if (!sb.valid(i)) continue;
                const Association as = associate(ta, t, sb.points[i]);
                if (!as.ok || (as.p - as.q).squaredNorm() > max_d2) continue;
                Vec6d j;
                j.head<3>() = as.p.cross(as.n);
                j.tail<3>() = as.n;
                const double r = as.n.dot(as.p - as.q);
                h.noalias() += (wg * wg) * j * j.transpose();
                g.noalias() += (wg * wg * r) * j;
                ++count;
                if (!photometric) continue;
                const Intrinsics& k = ta.intrinsics;
                const double z = as.p.z();
                IntensitySample s;
                if (!sample_intensity(ia[static_cast<std::size_t>(l)], k.fx * as.p.x() / z + k.cx, k.fy * as.p.y() / z + k.cy, s))
                    continue;
                const int sx = static_cast<int>(i % static_cast<std::size_t>(sb.width));
                const int sy = static_cast<int>(i / static_cast<std::size_t>(sb.width));
                const double ri = s.value - ib[static_cast<std::size_t>(l)].at(sx, sy);
                if (std::abs(ri) > params.max_intensity_residual) continue;
                // d(intensity)/d(point) through the pinhole projection.
                const Vec3d dip(s.gx * k.fx / z, s.gy * k.fy / z,
                                -(s.gx * k.fx * as.p.x() + s.gy * k.fy * as.p.y()) / (z * z));
                Vec6d ji;
                ji.head<3>() = as.p.cross(dip);
                ji.tail<3>() = dip;
                h.noalias() += (wi * wi) * ji * ji.transpose();
                g.noalias() += (wi * wi * ri) * ji;
            }
            if (count < 6) break;
            h.diagonal().array() += 1e-9 * h.trace();
            const Vec6d delta = -h.ldlt().solve(g);
            if (!delta.allFinite()) break;
            t = se3::orthonormalized(se3::exp(delta) * t);
            if (delta.norm() < 1e-8) break;
        }
    }

    OdometryResult res;
    res.transform = t;
    const VertexMap& ta = pa.front();
    const VertexMap& sb = pb.front();
    const double thr2 = params.fitness_threshold_m * params.fitness_threshold_m;
    std::size_t valid = 0, inl = 0;
    double sq = 0;
    std::vector<Vec3d> matched;
    for (std::size_t i = 0; i < sb.points.size(); ++i) {
        if (!sb.valid(i)) continue;
        ++valid;
        const Association as = associate(ta, t, sb.points[i]);
        if (!as.ok || (as.p - as.q).squaredNorm() > thr2) continue;
        ++inl;
        const double r = as.n.dot(as.p - as.q);
        sq += r * r;
        matched.push_back(as.p);
    }
    res.fitness = valid ? static_cast<double>(inl) / static_cast<double>(valid) : 0.0;
    res.rmse = inl ? std::sqrt(sq / static_cast<double>(inl)) : 0.0;
    res.information = point_information(matched);
    res.tracking_lost = res.fitness < params.min_fitness;
    return res;
}

}  // namespace synact
