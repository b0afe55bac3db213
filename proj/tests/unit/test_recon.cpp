#include "doctest.h"
#include "support.hpp"

#include "synact/error.hpp"
#include "synact/raster/raster.hpp"
#include "synact/recon/posegraph.hpp"
#include "synact/recon/reconstruction.hpp"
#include "synact/recon/registration.hpp"
#include "synact/recon/rgbd.hpp"
#include "synact/recon/tsdf.hpp"
#include "synact/scene/assets.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <set>

using namespace synact;

namespace {

Vec6d random_twist(Rng& rng, double rot, double trans) {
    Vec6d xi;
    for (int k = 0; k < 3; ++k) xi[k] = rng.uniform(-rot, rot);
    for (int k = 3; k < 6; ++k) xi[k] = rng.uniform(-trans, trans);
    return xi;
}

double rotation_angle(const Isometry& t) { return axis_angle_from_rotation(t.linear()).norm(); }

RGBDFrame flat_frame(int w, int h, std::uint16_t depth_mm) {
    RGBDFrame f;
    f.intensity = GrayImage(w, h, 0.5f);
    f.depth.assign(static_cast<std::size_t>(w) * h, depth_mm);
    f.intrinsics = {w, h, 80.0, 80.0, w / 2.0 - 0.5, h / 2.0 - 0.5};
    return f;
}

// Room renders shared by the registration tests.
const DepthSequence& room_sequence() {
    static const DepthSequence seq = [] {
        const Environment room = make_living_room();
        RenderConfig rc;
        rc.shadows = false;
        return render_depth_sequence(room_orbit_scenes(room, 12, 0.8, 24.0), rc);
    }();
    return seq;
}

TsdfVolume sphere_volume(double radius, double voxel) {
    TsdfConfig cfg;
    cfg.voxel_size = voxel;
    cfg.truncation = 4 * voxel;
    TsdfVolume vol(cfg);
    const int n = static_cast<int>(std::ceil((radius + 3 * voxel) / voxel));
    for (int i = -n; i < n; ++i)
        for (int j = -n; j < n; ++j)
            for (int k = -n; k < n; ++k) {
                const VoxelIndex idx(i, j, k);
                Voxel& v = vol.at(idx);
                const double d = vol.voxel_center(idx).norm() - radius;
                v.sdf = static_cast<float>(std::clamp(d, -cfg.truncation, cfg.truncation));
                v.weight = 1.0f;
            }
    return vol;
}

}  // namespace

TEST_SUITE("recon") {

TEST_CASE("se3 exp and log are inverse") {
    CHECK(se3::exp(Vec6d::Zero()).matrix() == Mat4d::Identity());
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const Vec6d xi = random_twist(rng, 1.5, 2.0);
        CHECK((se3::log(se3::exp(xi)) - xi).norm() < 1e-9);
        const Isometry t = se3::exp(random_twist(rng, 2.0, 1.0));
        CHECK((se3::exp(se3::log(t)).matrix() - t.matrix()).cwiseAbs().maxCoeff() < 1e-9);
        // T exp(xi) T^-1 = exp(Ad_T xi).
        const Isometry lhs = t * se3::exp(xi) * t.inverse();
        const Isometry rhs = se3::exp(se3::adjoint(t) * xi);
        CHECK((lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
    const Vec6d tiny = Vec6d::Constant(1e-10);
    CHECK((se3::log(se3::exp(tiny)) - tiny).norm() < 1e-15);
}

TEST_CASE("pose graph with consistent edges has zero cost at the truth") {
    Rng rng(2);
    PoseGraph g;
    for (int i = 0; i < 6; ++i) g.nodes.push_back(i == 0 ? Isometry::Identity() : se3::exp(random_twist(rng, 0.5, 1.0)));
    for (std::size_t i = 0; i + 1 < 6; ++i) g.edges.push_back({i, i + 1, g.nodes[i].inverse() * g.nodes[i + 1]});
    g.edges.push_back({0, 5, g.nodes[0].inverse() * g.nodes[5], Mat6d::Identity(), EdgeKind::Loop});
    CHECK(posegraph_cost(g, g.nodes) < 1e-20);
    for (const auto& e : g.edges) CHECK(edge_residual(e, g.nodes).norm() < 1e-9);

    // Perturbed start converges back; node 0 stays fixed.
    PoseGraph start = g;
    for (std::size_t i = 1; i < 6; ++i) start.nodes[i] = g.nodes[i] * se3::exp(random_twist(rng, 0.05, 0.05));
    const PoseGraphResult r = optimize_posegraph(start);
    CHECK(r.final_cost < 1e-12);
    CHECK(r.poses[0].matrix() == start.nodes[0].matrix());
    for (std::size_t i = 0; i < 6; ++i) CHECK((r.poses[i].matrix() - g.nodes[i].matrix()).cwiseAbs().maxCoeff() < 1e-5);
    REQUIRE_FALSE(r.cost_history.empty());
    CHECK(r.cost_history.front() == doctest::Approx(r.initial_cost));
    for (std::size_t i = 1; i < r.cost_history.size(); ++i) CHECK(r.cost_history[i] <= r.cost_history[i - 1]);
}

TEST_CASE("huber loss limits a bad loop edge") {
    PoseGraph g;
    for (int i = 0; i < 5; ++i) g.nodes.push_back(Isometry(Eigen::Translation3d(i, 0, 0)));
    for (std::size_t i = 0; i + 1 < 5; ++i) {
        g.edges.push_back({i, i + 1, Isometry(Eigen::Translation3d(1, 0, 0))});
        g.edges.back().information *= 100;
    }
    // Wildly wrong loop closure.
    g.edges.push_back({0, 4, Isometry(Eigen::Translation3d(2, 3, 0)), Mat6d::Identity(), EdgeKind::Loop});
    const PoseGraphResult r = optimize_posegraph(g);
    CHECK(r.final_cost <= r.initial_cost);
    CHECK((r.poses[4].translation() - Vec3d(4, 0, 0)).norm() < 0.5);
}

TEST_CASE("pose graph validation") {
    PoseGraph g;
    g.nodes = {Isometry::Identity(), Isometry::Identity()};
    g.edges.push_back({0, 2, Isometry::Identity()});
    CHECK_THROWS_AS(g.validate(), StructuralError);
    g.edges[0].j = 1;
    CHECK_NOTHROW(g.validate());
    g.edges[0].information(0, 1) = 1.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g.edges[0].information = -Mat6d::Identity();
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("tsdf of a facing plane") {
    TsdfConfig cfg;
    cfg.voxel_size = 0.02;
    cfg.truncation = 0.08;
    TsdfVolume vol(cfg);
    const RGBDFrame f = flat_frame(64, 48, 1500);
    vol.integrate(f, Isometry::Identity());
    int checked = 0;
    vol.for_each_voxel([&](const VoxelIndex& idx, const Voxel& v) {
        if (v.weight <= 0) return;
        const Vec3d c = vol.voxel_center(idx);
        CHECK(std::abs(v.sdf) <= cfg.truncation + 1e-6);
        const double expect = std::clamp(1.5 - c.z(), -cfg.truncation, cfg.truncation);
        CHECK(std::abs(v.sdf - expect) < 1e-4);
        CHECK(c.z() < 1.5 + cfg.truncation + cfg.voxel_size);
        ++checked;
    });
    CHECK(checked > 1000);
    // Integrating the same frame twice doubles the weight and keeps the sdf.
    TsdfVolume twice(cfg);
    twice.integrate(f, Isometry::Identity());
    twice.integrate(f, Isometry::Identity());
    vol.for_each_voxel([&](const VoxelIndex& idx, const Voxel& v) {
        const Voxel* w = twice.find(idx);
        REQUIRE(w != nullptr);
        CHECK(w->weight == doctest::Approx(2 * v.weight));
        CHECK(w->sdf == doctest::Approx(v.sdf).epsilon(1e-5));
    });
}

TEST_CASE("integration order does not matter") {
    const DepthSequence& seq = room_sequence();
    const auto frames = frames_from_depth_sequence(seq);
    TsdfConfig cfg;
    cfg.voxel_size = 0.04;
    cfg.truncation = 0.16;
    cfg.threads = 1;
    TsdfVolume a(cfg), b(cfg);
    a.integrate(frames[0], seq.poses[0]);
    a.integrate(frames[6], seq.poses[6]);
    b.integrate(frames[6], seq.poses[6]);
    b.integrate(frames[0], seq.poses[0]);
    std::size_t n = 0;
    a.for_each_voxel([&](const VoxelIndex& idx, const Voxel& v) {
        const Voxel* w = b.find(idx);
        REQUIRE(w != nullptr);
        CHECK(w->weight == v.weight);
        CHECK(std::abs(w->sdf - v.sdf) < 1e-5);
        ++n;
    });
    CHECK(n > 0);
}

TEST_CASE("marching cubes on an analytic sphere") {
    const double r = 0.3, voxel = 0.02;
    const Mesh m = extract_mesh(sphere_volume(r, voxel));
    REQUIRE(m.vertices.size() > 100);
    double worst = 0;
    for (const auto& v : m.vertices) worst = std::max(worst, std::abs(v.cast<double>().norm() - r));
    CHECK(worst < 0.1 * voxel);
    // Closed genus-0 surface: V - E + F = 2.
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            const auto a = t[k], b = t[(k + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
            ++uses[{std::min(a, b), std::max(a, b)}];
        }
    const long chi = static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.triangles.size());
    CHECK(chi == 2);
    for (const auto& [e, n] : uses) CHECK(n == 2);
    // Normals point outward, towards positive distance.
    REQUIRE(m.normals.size() == m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(m.normals[i].dot(m.vertices[i]) > 0);
}

TEST_CASE("empty volume gives an empty mesh") {
    const Mesh m = extract_mesh(TsdfVolume{});
    CHECK(m.vertices.empty());
    CHECK(m.triangles.empty());
}

TEST_CASE("frame odometry recovers the rendered relative pose") {
    const DepthSequence& seq = room_sequence();
    const auto frames = frames_from_depth_sequence(seq);
    for (std::size_t k : {0u, 5u, 9u}) {
        const Isometry truth = seq.poses[k].inverse() * seq.poses[k + 2];
        const OdometryResult r = rgbd_odometry(frames[k], frames[k + 2], Isometry::Identity());
        CHECK_FALSE(r.tracking_lost);
        CHECK(r.fitness > 0.5);
        const Isometry err = truth.inverse() * r.transform;
        CHECK(err.translation().norm() < 0.01);
        CHECK(rad_to_deg(rotation_angle(err)) < 0.5);
        CHECK((r.information - r.information.transpose()).norm() < 1e-6 * r.information.norm());
    }
}

TEST_CASE("intensity term recovers sliding along a textured plane") {
    // A fronto-parallel plane gives point-to-plane ICP no in-plane constraint.
    const int w = 128, h = 96, m = 8, shift = 2;
    const auto p = test::smooth_pattern(w + 2 * m, h + 2 * m, 31);
    RGBDFrame a = flat_frame(w, h, 1500), b = flat_frame(w, h, 1500);
    a.intrinsics.fx = b.intrinsics.fx = 160.0;
    a.intrinsics.fy = b.intrinsics.fy = 160.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            a.intensity.at(x, y) = p[static_cast<std::size_t>(y + m) * (w + 2 * m) + x + m];
            b.intensity.at(x, y) = p[static_cast<std::size_t>(y + m) * (w + 2 * m) + x + m - shift];
        }
    // b sees the texture moved right, so its points sit shift pixels left in a.
    const Vec3d truth(-shift * 1.5 / 160.0, 0, 0);
    const OdometryResult hybrid = rgbd_odometry(a, b, Isometry::Identity());
    CHECK((hybrid.transform.translation() - truth).norm() < 0.002);
    CHECK(rad_to_deg(rotation_angle(hybrid.transform)) < 0.2);
    OdometryParams geometric;
    geometric.hybrid_lambda = 1.0;
    const OdometryResult plain = rgbd_odometry(a, b, Isometry::Identity(), geometric);
    CHECK(std::abs(plain.transform.translation().x()) < 0.002);
    geometric.hybrid_lambda = 0.0;
    CHECK_THROWS_AS(rgbd_odometry(a, b, Isometry::Identity(), geometric), ConfigError);
}

TEST_CASE("rough alignment from features") {
    const DepthSequence& seq = room_sequence();
    const auto frames = frames_from_depth_sequence(seq);
    const Isometry truth = seq.poses[0].inverse() * seq.poses[4];
    const RoughAlignResult r = rough_align(frames[0], frames[4]);
    REQUIRE(r.success);
    CHECK(r.inliers >= 3);
    CHECK(r.inliers <= r.matches);
    const Isometry err = truth.inverse() * r.transform;
    CHECK(err.translation().norm() < 0.05);
    CHECK(rad_to_deg(rotation_angle(err)) < 3.0);
    const RoughAlignResult again = rough_align(frames[0], frames[4]);
    CHECK(again.transform.matrix() == r.transform.matrix());
}

TEST_CASE("point-to-plane icp on a box") {
    const Mesh box = make_box(Vec3f(-0.5f, -0.3f, -0.4f), Vec3f(0.5f, 0.3f, 0.4f));
    // Subdivide by sampling the faces on a grid.
    PointCloud target;
    for (int axis = 0; axis < 3; ++axis)
        for (float side : {-1.0f, 1.0f})
            for (int a = 0; a <= 30; ++a)
                for (int b = 0; b <= 30; ++b) {
                    Vec3d p, n = Vec3d::Zero();
                    const Vec3d half(0.5, 0.3, 0.4);
                    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                    p[axis] = side * half[axis];
                    p[u] = (a / 15.0 - 1) * half[u];
                    p[v] = (b / 15.0 - 1) * half[v];
                    n[axis] = side;
                    target.points.push_back(p);
                    target.normals.push_back(n);
                }
    Rng rng(3);
    const Isometry motion = se3::exp(random_twist(rng, 0.05, 0.03));
    PointCloud source = target;
    for (std::size_t i = 0; i < source.points.size(); ++i) {
        source.points[i] = motion.inverse() * target.points[i];
        source.normals[i] = motion.linear().transpose() * target.normals[i];
    }
    const IcpResult r = icp_point_to_plane(source, target, Isometry::Identity(), 0.1);
    CHECK(r.fitness > 0.95);
    CHECK((r.transform.matrix() - motion.matrix()).cwiseAbs().maxCoeff() < 1e-3);
    const PointCloud thin = voxel_downsample(target, 0.1);
    CHECK(thin.points.size() < target.points.size());
    CHECK(thin.points.size() == thin.normals.size());
    CHECK(voxel_downsample(box, 0.05).points.size() > 0);
}

TEST_CASE("point information is symmetric positive semidefinite") {
    Rng rng(4);
    std::vector<Vec3d> pts;
    for (int i = 0; i < 50; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 3));
    const Mat6d info = point_information(pts);
    CHECK((info - info.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat6d> es(info);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(info.block<3, 3>(3, 3).isApprox(Mat3d::Identity()));
}

TEST_CASE("fragments partition the sequence") {
    const DepthSequence& seq = room_sequence();
    const auto frames = frames_from_depth_sequence(seq);
    ReconConfig cfg;
    cfg.fragment_size = 5;
    cfg.tsdf.voxel_size = 0.04;
    cfg.tsdf.truncation = 0.16;
    const auto fragments = build_fragments(frames, cfg);
    REQUIRE(fragments.size() >= 3);
    CHECK(fragments.front().first == 0);
    CHECK(fragments.back().last == frames.size());
    for (std::size_t i = 0; i < fragments.size(); ++i) {
        CHECK(fragments[i].size() <= 5);
        CHECK(fragments[i].size() >= 1);
        CHECK(fragments[i].local_graph.nodes.size() == fragments[i].size());
        CHECK(fragments[i].local_graph.nodes[0].isApprox(Isometry::Identity()));
        if (i > 0) CHECK(fragments[i].first == fragments[i - 1].last);
    }
    const PoseGraph global = register_fragments(fragments, frames, cfg);
    CHECK(global.nodes.size() == fragments.size());
    CHECK_NOTHROW(global.validate());
}

TEST_CASE("single frame reconstruction") {
    const auto frames = frames_from_depth_sequence(room_sequence());
    ReconConfig cfg;
    cfg.tsdf.voxel_size = 0.04;
    cfg.tsdf.truncation = 0.16;
    const ReconResult r = reconstruct({frames[0]}, cfg);
    REQUIRE(r.trajectory.size() == 1);
    CHECK(r.trajectory[0].isApprox(Isometry::Identity()));
    CHECK(r.fragment_count == 1);
    CHECK_FALSE(r.mesh.triangles.empty());
    CHECK_FALSE(r.tracking_lost);
}

TEST_CASE("trajectory text round trip and errors") {
    Rng rng(6);
    std::vector<Isometry> poses;
    for (int i = 0; i < 10; ++i) poses.push_back(se3::exp(random_twist(rng, 3, 5)));
    const auto back = parse_trajectory(format_trajectory(poses));
    REQUIRE(back.size() == poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i)
        CHECK((back[i].matrix() - poses[i].matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(parse_trajectory("").empty());
    CHECK_THROWS_AS(parse_trajectory("1 0 0 0 0 1 0 0 0 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse_trajectory("1 0 0 0 0 1 0 0 0 0 1 0 7\n"), ParseError);
}

TEST_CASE("trajectory error is invariant to a rigid change of world frame") {
    Rng rng(7);
    std::vector<Isometry> truth, est;
    const Isometry g = se3::exp(random_twist(rng, 1, 2));
    for (int i = 0; i < 30; ++i) {
        truth.push_back(se3::exp(random_twist(rng, 1, 2)));
        est.push_back(g * truth.back());
    }
    Isometry align;
    CHECK(absolute_trajectory_error(est, truth, &align) < 1e-9);
    CHECK((align * g).isApprox(Isometry::Identity(), 1e-9));
    for (auto& e : est) e.translation() += Vec3d(0.01, 0, 0);
    CHECK(absolute_trajectory_error(est, truth) < 0.011);
}

TEST_CASE("point to mesh distance") {
    const Mesh quad = make_quad(2, 2);
    std::vector<Vec3d> pts{{0, 0, 0.1}, {0.5, -0.5, -0.1}, {0.9, 0.9, 0.1}};
    CHECK(point_to_mesh_rms(pts, quad) == doctest::Approx(0.1));
    CHECK(point_to_mesh_rms({{2, 0, 0}}, quad) == doctest::Approx(1.0));
}

TEST_CASE("rgbd directory round trip") {
    test::TempDir dir("rgbd");
    DepthSequence seq = room_sequence();
    seq.depth_mm.resize(2);
    seq.color.resize(2);
    seq.poses.resize(2);
    save_rgbd_directory(dir.path(), seq);
    const auto frames = load_rgbd_directory(dir.path());
    REQUIRE(frames.size() == 2);
    CHECK(frames[1].depth == seq.depth_mm[1]);
    CHECK(frames[0].intrinsics.fx == doctest::Approx(seq.intrinsics.fx));
    CHECK(frames[0].color == seq.color[0]);
    CHECK_THROWS_AS(load_rgbd_directory(dir / "missing"), IoError);
}

}  // TEST_SUITE
