#include "synact/recon/registration.hpp"

#include "synact/error.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <unordered_map>

namespace synact {
namespace {

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ULL;
        h ^= static_cast<std::uint64_t>(k.y) * 19349663ULL;
        h ^= static_cast<std::uint64_t>(k.z) * 83492791ULL;
        return static_cast<std::size_t>(h);
    }
};

CellKey cell_of(const Vec3d& p, double size) {
    return {static_cast<std::int64_t>(std::floor(p.x() / size)), static_cast<std::int64_t>(std::floor(p.y() / size)),
            static_cast<std::int64_t>(std::floor(p.z() / size))};
}

class Grid {
public:
    Grid(const std::vector<Vec3d>& points, double cell) : points_(points), cell_(cell) {
        for (std::size_t i = 0; i < points.size(); ++i) cells_[cell_of(points[i], cell)].push_back(i);
    }

    // Index of the nearest point within `radius` (radius <= cell size), or -1.
    long nearest(const Vec3d& p, double radius) const {
        const CellKey c = cell_of(p, cell_);
        long best = -1;
        double best_d2 = radius * radius;
        for (std::int64_t dz = -1; dz <= 1; ++dz)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dx = -1; dx <= 1; ++dx) {
                    auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
                    if (it == cells_.end()) continue;
                    for (std::size_t i : it->second) {
                        const double d2 = (points_[i] - p).squaredNorm();
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = static_cast<long>(i);
                        }
                    }
                }
        return best;
    }

private:
    const std::vector<Vec3d>& points_;
    double cell_;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
    if (!(voxel > 0)) throw ContractError("voxel size must be positive");
    PointCloud out;
    std::unordered_map<CellKey, std::size_t, CellHash> seen;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (!seen.emplace(cell_of(cloud.points[i], voxel), i).second) continue;
        out.points.push_back(cloud.points[i]);
        if (i < cloud.normals.size()) out.normals.push_back(cloud.normals[i]);
    }
    return out;
}

PointCloud voxel_downsample(const Mesh& mesh, double voxel) {
    PointCloud c;
    c.points.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        c.points.push_back(mesh.vertices[i].cast<double>());
        c.normals.push_back(i < mesh.normals.size() ? Vec3d(mesh.normals[i].cast<double>()) : Vec3d::Zero());
    }
    return voxel_downsample(c, voxel);
}

IcpResult icp_point_to_plane(const PointCloud& source, const PointCloud& target, const Isometry& init,
                             double max_distance, int iterations) {
    if (target.normals.size() != target.points.size())
        throw ContractError("point-to-plane ICP needs target normals");
    IcpResult res;
    res.transform = init;
    if (source.points.empty() || target.points.empty()) return res;
    const Grid grid(target.points, max_distance);

    Isometry t = init;
    for (int it = 0; it < iterations; ++it) {
        Mat6d h = Mat6d::Zero();
        Vec6d g = Vec6d::Zero();
        std::size_t count = 0;
        for (const auto& s : source.points) {
            const Vec3d p = t * s;
            const long k = grid.nearest(p, max_distance);
            if (k < 0) continue;
            const Vec3d& n = target.normals[static_cast<std::size_t>(k)];
            if (n.squaredNorm() < 0.5) continue;
            Vec6d j;
            j.head<3>() = p.cross(n);
            j.tail<3>() = n;
            const double r = n.dot(p - target.points[static_cast<std::size_t>(k)]);
            h.noalias() += j * j.transpose();
            g.noalias() += j * r;
            ++count;
        }
        if (count < 6) break;
        h.diagonal().array() += 1e-9 * h.trace();
        const Vec6d delta = -h.ldlt().solve(g);
        if (!delta.allFinite()) break;
        t = se3::orthonormalized(se3::exp(delta) * t);
        if (delta.norm() < 1e-7) break;
    }

    std::size_t inl = 0;
    double sq = 0;
    std::vector<Vec3d> matched;
    for (const auto& s : source.points) {
        const Vec3d p = t * s;
        const long k = grid.nearest(p, max_distance);
        if (k < 0) continue;
        ++inl;
        sq += (p - target.points[static_cast<std::size_t>(k)]).squaredNorm();
        matched.push_back(p);
    }
    res.transform = t;
    res.fitness = static_cast<double>(inl) / static_cast<double>(source.points.size());
    res.rmse = inl ? std::sqrt(sq / static_cast<double>(inl)) : 0.0;
    res.information = point_information(matched);
    return res;
}

}  // namespace synact
