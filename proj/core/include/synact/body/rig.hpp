#pragma once

#include "synact/formats/mesh.hpp"
#include "synact/geometry.hpp"

#include <string>
#include <vector>

namespace synact {

struct Joint {
    std::string name;
    int parent = -1;  // -1 for the root
    Mat3d rest_rotation = Mat3d::Identity();
    Vec3d rest_translation = Vec3d::Zero();  // meters, in the parent frame

    Isometry rest_local() const {
        Isometry t = Isometry::Identity();
        t.linear() = rest_rotation;
        t.translation() = rest_translation;
        return t;
    }
};

// Joints are topologically sorted: parent index < child index, one root.
struct SkeletonRig {
    std::vector<Joint> joints;

    std::size_t size() const { return joints.size(); }
    int find(std::string_view name) const;
    // Throws StructuralError on ordering or root violations.
    void validate() const;
};

// Per-joint axis-angle rotations (radians) applied after the rest transform.
struct PoseFrame {
    std::vector<Vec3d> joint_rotations;
    Vec3d root_translation = Vec3d::Zero();

    static PoseFrame identity(std::size_t joint_count) {
        return PoseFrame{std::vector<Vec3d>(joint_count, Vec3d::Zero()), Vec3d::Zero()};
    }
};

struct SkinInfluence {
    std::uint32_t joint = 0;
    float weight = 0.0f;
};

inline constexpr std::size_t kMaxInfluences = 4;

struct SkinnedBody {
    SkeletonRig rig;
    Mesh template_mesh;  // rest pose
    std::vector<std::vector<SkinInfluence>> weights;  // one list per vertex

    // Weights sum to 1 (1e-6), at most four influences, joint indices valid.
    void validate() const;
};

}  // namespace synact
