#include "doctest.h"
#include "support.hpp"

#include "synact/body/humanoid.hpp"
#include "synact/body/skinning.hpp"
#include "synact/error.hpp"
#include "synact/formats/motion.hpp"

using namespace synact;

namespace {

Mat4d rest_matrix(const Joint& j) {
    Mat4d m = Mat4d::Identity();
    m.block<3, 3>(0, 0) = j.rest_rotation;
    m.block<3, 1>(0, 3) = j.rest_translation;
    return m;
}

Mat4d rotation_matrix(const Vec3d& rotvec) {
    Mat4d m = Mat4d::Identity();
    const double a = rotvec.norm();
    if (a > 0) m.block<3, 3>(0, 0) = Eigen::AngleAxisd(a, rotvec / a).toRotationMatrix();
    return m;
}

// Walks up the parent chain and multiplies the 4x4 matrices explicitly.
Mat4d brute_force_world(const SkeletonRig& rig, const PoseFrame& pose, int j) {
    Mat4d m = Mat4d::Identity();
    for (int k = j; k >= 0; k = rig.joints[static_cast<std::size_t>(k)].parent)
        m = rest_matrix(rig.joints[static_cast<std::size_t>(k)]) * rotation_matrix(pose.joint_rotations[static_cast<std::size_t>(k)]) * m;
    Mat4d root = Mat4d::Identity();
    root.block<3, 1>(0, 3) = pose.root_translation;
    return root * m;
}

SkeletonRig random_chain(Rng& rng, int n) {
    SkeletonRig rig;
    for (int i = 0; i < n; ++i) {
        Joint j;
        j.name = "j" + std::to_string(i);
        j.parent = i - 1;
        j.rest_rotation = rotation_from_axis_angle(Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
        j.rest_translation = Vec3d(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
        rig.joints.push_back(j);
    }
    return rig;
}

PoseFrame random_pose(Rng& rng, std::size_t n, double amplitude) {
    PoseFrame p = PoseFrame::identity(n);
    for (auto& r : p.joint_rotations) r = Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * amplitude;
    return p;
}

}  // namespace

TEST_SUITE("body") {

TEST_CASE("identity pose gives accumulated rest transforms") {
    const SkinnedBody body = make_procedural_humanoid();
    const PoseFrame pose = PoseFrame::identity(body.rig.size());
    const auto world = forward_kinematics(body.rig, pose);
    for (std::size_t j = 0; j < body.rig.size(); ++j)
        CHECK((world[j].matrix() - brute_force_world(body.rig, pose, static_cast<int>(j))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("three-joint chain bent 90 degrees at the middle joint") {
    SkeletonRig rig;
    rig.joints = {{"a", -1, Mat3d::Identity(), Vec3d::Zero()},
                  {"b", 0, Mat3d::Identity(), Vec3d(1, 0, 0)},
                  {"c", 1, Mat3d::Identity(), Vec3d(1, 0, 0)}};
    PoseFrame pose = PoseFrame::identity(3);
    pose.joint_rotations[1] = Vec3d(0, 0, std::numbers::pi / 2);
    const auto world = forward_kinematics(rig, pose);
    // Hand product: T(1,0,0) Rz(90) T(1,0,0) applied to the origin.
    CHECK((world[2].translation() - Vec3d(1, 1, 0)).norm() < 1e-12);
    CHECK((world[1].translation() - Vec3d(1, 0, 0)).norm() < 1e-12);
    CHECK_THROWS_AS(forward_kinematics(rig, PoseFrame::identity(2)), ContractError);
}

TEST_CASE("random 5-joint chains match the brute-force matrix product") {
    Rng rng(11);
    for (int k = 0; k < 50; ++k) {
        const SkeletonRig rig = random_chain(rng, 5);
        PoseFrame pose = random_pose(rng, 5, 1.5);
        pose.root_translation = Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const auto world = forward_kinematics(rig, pose);
        for (int j = 0; j < 5; ++j)
            CHECK((world[static_cast<std::size_t>(j)].matrix() - brute_force_world(rig, pose, j)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(forward_kinematics(rig, pose)[4].matrix() == world[4].matrix());
    }
}

TEST_CASE("root rotation left-multiplies every joint") {
    const SkinnedBody body = make_procedural_humanoid();
    Rng rng(3);
    const PoseFrame base = random_pose(rng, body.rig.size(), 0.4);
    PoseFrame turned = base;
    turned.joint_rotations[0] = axis_angle_from_rotation(rotation_y(0.7) * rotation_from_axis_angle(base.joint_rotations[0]));
    const auto w0 = forward_kinematics(body.rig, base);
    const auto w1 = forward_kinematics(body.rig, turned);
    const Isometry left = w1[0] * w0[0].inverse();
    for (std::size_t j = 0; j < w0.size(); ++j) CHECK(((left * w0[j]).matrix() - w1[j].matrix()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("lbs identity pose returns the template") {
    const SkinnedBody body = make_procedural_humanoid();
    const Mesh posed = lbs_pose(body, PoseFrame::identity(body.rig.size()));
    REQUIRE(posed.vertices.size() == body.template_mesh.vertices.size());
    float worst = 0;
    for (std::size_t i = 0; i < posed.vertices.size(); ++i)
        worst = std::max(worst, (posed.vertices[i] - body.template_mesh.vertices[i]).norm());
    CHECK(worst < 1e-6f);
    CHECK(posed.triangles == body.template_mesh.triangles);
}

TEST_CASE("lbs is rigidly equivariant over 100 random rigid poses") {
    const SkinnedBody body = make_procedural_humanoid();
    const Joint& root = body.rig.joints[0];
    Rng rng(2024);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        const PoseFrame pose = random_pose(rng, body.rig.size(), 0.6);
        const Mat3d R = rotation_from_axis_angle(Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * 2.0);
        const Vec3d t(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        // Express G * world(root) through the root's own pose parameters.
        PoseFrame moved = pose;
        moved.joint_rotations[0] = axis_angle_from_rotation(root.rest_rotation.transpose() * R * root.rest_rotation *
                                                            rotation_from_axis_angle(pose.joint_rotations[0]));
        moved.root_translation = R * (pose.root_translation + root.rest_translation) + t - root.rest_translation;
        const Mesh a = lbs_pose(body, pose);
        const Mesh b = lbs_pose(body, moved);
        for (std::size_t i = 0; i < a.vertices.size(); ++i) {
            const Vec3d expect = R * a.vertices[i].cast<double>() + t;
            worst = std::max(worst, (b.vertices[i].cast<double>() - expect).norm());
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("vertices bound to one joint follow that joint exactly") {
    const SkinnedBody body = make_procedural_humanoid();
    const int elbow = body.rig.find("r_elbow");
    REQUIRE(elbow >= 0);
    PoseFrame pose = PoseFrame::identity(body.rig.size());
    pose.joint_rotations[static_cast<std::size_t>(elbow)] = Vec3d(0, 0, 1.2);
    const Mesh posed = lbs_pose(body, pose);
    const auto world = forward_kinematics(body.rig, pose);
    const auto rest = forward_kinematics(body.rig, PoseFrame::identity(body.rig.size()));
    const Isometry m = world[static_cast<std::size_t>(elbow)] * rest[static_cast<std::size_t>(elbow)].inverse();
    int checked = 0;
    for (std::size_t i = 0; i < body.weights.size(); ++i) {
        const auto& w = body.weights[i];
        if (w.size() != 1 || static_cast<int>(w[0].joint) != elbow) continue;
        const Vec3d expect = m * body.template_mesh.vertices[i].cast<double>();
        CHECK((posed.vertices[i].cast<double>() - expect).norm() < 1e-5);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("equal joint transforms move no vertex relative to the rigid map") {
    // Every joint gets the same world motion when only the root moves.
    const SkinnedBody body = make_procedural_humanoid();
    PoseFrame pose = PoseFrame::identity(body.rig.size());
    pose.root_translation = Vec3d(0.3, -0.2, 0.1);
    const Mesh posed = lbs_pose(body, pose);
    for (std::size_t i = 0; i < posed.vertices.size(); ++i)
        CHECK((posed.vertices[i] - body.template_mesh.vertices[i] - Vec3f(0.3f, -0.2f, 0.1f)).norm() < 1e-5f);
}

TEST_CASE("body height") {
    CHECK(body_height(make_cube_shared(Vec3f(0, 0, 0), Vec3f(1, 1, 1))) == doctest::Approx(1.0));
    CHECK(body_height(make_cube_shared(Vec3f(0, 0, 0), Vec3f(1, 1.8f, 1))) == doctest::Approx(1.8));
    CHECK_THROWS_AS(body_height(Mesh{}), ContractError);
    const SkinnedBody body = make_procedural_humanoid();
    float lo = 1e9f, hi = -1e9f;
    for (const auto& v : body.template_mesh.vertices) {
        lo = std::min(lo, v.y());
        hi = std::max(hi, v.y());
    }
    CHECK(body_height(body.template_mesh) == doctest::Approx(hi - lo).epsilon(1e-9));
}

TEST_CASE("procedural humanoid") {
    const SkinnedBody body = make_procedural_humanoid();
    CHECK_NOTHROW(body.validate());
    CHECK(body.rig.size() >= 15);
    CHECK(body.rig.size() <= 25);
    CHECK(body.template_mesh.vertices.size() > 1000);
    CHECK(body.template_mesh.vertices.size() < 4000);
    CHECK(body_height(body.template_mesh) == doctest::Approx(1.7).epsilon(1e-3 / 1.7));
    CHECK(write_rig(parse_rig(write_rig(body))) == write_rig(body));
}

TEST_CASE("wave take moves only arm joints") {
    const SkinnedBody body = make_procedural_humanoid();
    for (std::uint64_t variation : {0u, 1u, 7u}) {
        const MotionTake t = make_procedural_take(body.rig, ActionLabel::HandWaving, "s", 50, variation);
        CHECK_NOTHROW(t.validate());
        bool arm_moves = false;
        for (const auto& f : t.frames)
            for (std::size_t j = 0; j < body.rig.size(); ++j) {
                const bool zero = f.joint_rotations[j].isZero(0.0);
                if (!is_arm_joint(body.rig.joints[j].name)) CHECK(zero);
                else arm_moves |= !zero;
            }
        CHECK(arm_moves);
    }
}

TEST_CASE("procedural subjects are deterministic") {
    const auto a = make_procedural_subject("s03", subject_shape(3), 3);
    const auto b = make_procedural_subject("s03", subject_shape(3), 3);
    CHECK(a.body.template_mesh == b.body.template_mesh);
    REQUIRE(a.takes.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(write_motion_take(a.takes[k]) == write_motion_take(b.takes[k]));
}

}  // TEST_SUITE
