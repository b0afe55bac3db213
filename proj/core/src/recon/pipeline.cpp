#include "synact/error.hpp"
#include "synact/recon/reconstruction.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace synact {

ReconResult reconstruct(const std::vector<RGBDFrame>& frames, const ReconConfig& config) {
    std::vector<Fragment> fragments = build_fragments(frames, config);
    const PoseGraph graph = register_fragments(fragments, frames, config);
    const PoseGraphResult opt = optimize_posegraph(graph, config.posegraph);

    ReconResult res;
    res.fragment_count = fragments.size();
    res.edge_count = graph.edges.size();
    for (const auto& e : graph.edges) res.loop_edge_count += e.kind == EdgeKind::Loop;
    res.final_cost = opt.final_cost;
    const Isometry gauge = opt.poses.front().inverse();
    for (std::size_t k = 0; k < fragments.size(); ++k) {
        fragments[k].world_pose = se3::orthonormalized(gauge * opt.poses[k]);
        for (const auto& node : fragments[k].local_graph.nodes)
            res.trajectory.push_back(se3::orthonormalized(fragments[k].world_pose * node));
        for (const auto& w : fragments[k].warnings) {
            res.tracking_lost |= w.rfind("tracking lost", 0) == 0;
            res.warnings.push_back(w);
        }
    }
    TsdfVolume vol = integrate_tsdf(frames, res.trajectory, config.tsdf);
    res.mesh = extract_mesh(vol);
    return res;
}

double absolute_trajectory_error(const std::vector<Isometry>& estimate, const std::vector<Isometry>& truth,
                                 Isometry* alignment) {
    if (estimate.size() != truth.size() || estimate.empty())
        throw ContractError("trajectory error needs two equally long, non-empty trajectories");
    const auto n = static_cast<Eigen::Index>(estimate.size());
    Eigen::Matrix3Xd src(3, n), dst(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        src.col(i) = estimate[static_cast<std::size_t>(i)].translation();
        dst.col(i) = truth[static_cast<std::size_t>(i)].translation();
    }
    Isometry t = Isometry::Identity();
    const Vec3d spread = (src.colwise() - src.rowwise().mean()).rowwise().norm();
    if (n >= 3 && spread.maxCoeff() > 1e-9) {
        t.matrix() = Eigen::umeyama(src, dst, false);
    } else {
        t.translation() = dst.rowwise().mean() - src.rowwise().mean();
    }
    double sq = 0;
    for (Eigen::Index i = 0; i < n; ++i) sq += (t * Vec3d(src.col(i)) - Vec3d(dst.col(i))).squaredNorm();
    if (alignment) *alignment = t;
    return std::sqrt(sq / static_cast<double>(n));
}

std::string format_trajectory(const std::vector<Isometry>& poses) {
    std::string out;
    char buf[64];
    for (const auto& p : poses) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", p.matrix()(r, c));
                out += buf;
                out += (r == 2 && c == 3) ? '\n' : ' ';
            }
    }
    return out;
}

std::vector<Isometry> parse_trajectory(const std::string& text) {
    std::vector<Isometry> poses;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        Isometry p = Isometry::Identity();
        for (int k = 0; k < 12; ++k) {
            double v = 0;
            if (!(row >> v)) throw ParseError("trajectory row needs 12 numbers", lineno);
            p.matrix()(k / 4, k % 4) = v;
        }
        std::string extra;
        if (row >> extra) throw ParseError("trajectory row has more than 12 numbers", lineno);
        poses.push_back(p);
    }
    return poses;
}

namespace {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
Vec3d closest_on_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    const Vec3d ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    const Vec3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
    const Vec3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

double point_to_mesh_rms(const std::vector<Vec3d>& points, const Mesh& mesh) {
    if (points.empty()) return 0.0;
    if (mesh.triangles.empty()) throw ContractError("point_to_mesh_rms needs a mesh with triangles");
    double sq = 0;
    for (const auto& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : mesh.triangles) {
            const Vec3d a = mesh.vertices[t[0]].cast<double>();
            const Vec3d b = mesh.vertices[t[1]].cast<double>();
            const Vec3d c = mesh.vertices[t[2]].cast<double>();
            best = std::min(best, (closest_on_triangle(p, a, b, c) - p).squaredNorm());
        }
        sq += best;
    }
    return std::sqrt(sq / static_cast<double>(points.size()));
}

}  // namespace synact
