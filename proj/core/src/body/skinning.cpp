#include "synact/body/skinning.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace synact {

int SkeletonRig::find(std::string_view name) const {
    for (std::size_t i = 0; i < joints.size(); ++i)
        if (joints[i].name == name) return static_cast<int>(i);
    return -1;
}

void SkeletonRig::validate() const {
    if (joints.empty()) throw StructuralError("rig has no joints");
    int roots = 0;
    std::unordered_set<std::string> names;
    for (std::size_t j = 0; j < joints.size(); ++j) {
        const int p = joints[j].parent;
        if (p == -1) ++roots;
        else if (p < -1 || p >= static_cast<int>(j))
            throw StructuralError("joint " + joints[j].name + " parent index must precede it");
        if (!names.insert(joints[j].name).second) throw StructuralError("duplicate joint name " + joints[j].name);
    }
    if (roots != 1 || joints[0].parent != -1) throw StructuralError("rig must have exactly one root at index 0");
}

void SkinnedBody::validate() const {
    rig.validate();
    template_mesh.validate();
    if (weights.size() != template_mesh.vertices.size())
        throw StructuralError("skin weight list count differs from vertex count");
    for (std::size_t v = 0; v < weights.size(); ++v) {
        const auto& w = weights[v];
        if (w.empty() || w.size() > kMaxInfluences)
            throw StructuralError("vertex " + std::to_string(v) + " must have 1 to 4 influences");
        double sum = 0;
        for (const auto& inf : w) {
            if (inf.joint >= rig.size()) throw StructuralError("vertex " + std::to_string(v) + " references an unknown joint");
            if (!(inf.weight >= 0)) throw StructuralError("negative skin weight");
            sum += inf.weight;
        }
        if (std::abs(sum - 1.0) > 1e-6) throw StructuralError("vertex " + std::to_string(v) + " weights do not sum to 1");
    }
}

std::vector<Isometry> forward_kinematics(const SkeletonRig& rig, const PoseFrame& pose) {
    if (pose.joint_rotations.size() != rig.size())
        throw ContractError("pose has " + std::to_string(pose.joint_rotations.size()) + " rotations for " +
                            std::to_string(rig.size()) + " joints");
    std::vector<Isometry> world(rig.size());
    for (std::size_t j = 0; j < rig.size(); ++j) {
        Isometry local = rig.joints[j].rest_local();
        local.linear() = local.linear() * rotation_from_axis_angle(pose.joint_rotations[j]);
        const int p = rig.joints[j].parent;
        if (p < 0) {
            Isometry root = Isometry::Identity();
            root.translation() = pose.root_translation;
            world[j] = root * local;
        } else {
            world[j] = world[p] * local;
        }
    }
    return world;
}

std::vector<Isometry> inverse_rest_transforms(const SkeletonRig& rig) {
    auto rest = forward_kinematics(rig, PoseFrame::identity(rig.size()));
    for (auto& t : rest) t = t.inverse();
    return rest;
}

Mesh lbs_pose(const SkinnedBody& body, const PoseFrame& pose) {
    return lbs_pose(body, pose, inverse_rest_transforms(body.rig));
}

Mesh lbs_pose(const SkinnedBody& body, const PoseFrame& pose, const std::vector<Isometry>& inverse_rest) {
    const auto world = forward_kinematics(body.rig, pose);
    std::vector<Eigen::Matrix<double, 3, 4>> skin(world.size());
    for (std::size_t k = 0; k < world.size(); ++k) skin[k] = (world[k] * inverse_rest[k]).matrix().topRows<3>();

    Mesh out = body.template_mesh;
    const bool normals = !out.normals.empty();
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
        Eigen::Matrix<double, 3, 4> m = Eigen::Matrix<double, 3, 4>::Zero();
        for (const auto& inf : body.weights[v]) m += static_cast<double>(inf.weight) * skin[inf.joint];
        const Vec3d p = body.template_mesh.vertices[v].cast<double>();
        out.vertices[v] = (m.leftCols<3>() * p + m.col(3)).cast<float>();
        if (normals) {
            const Vec3d n = m.leftCols<3>() * body.template_mesh.normals[v].cast<double>();
            const double len = n.norm();
            out.normals[v] = len > 1e-12 ? Vec3f((n / len).cast<float>()) : body.template_mesh.normals[v];
        }
    }
    return out;
}

double body_height(const Mesh& mesh) {
    if (mesh.vertices.empty()) throw ContractError("body_height of an empty mesh");
    float lo = mesh.vertices[0].y(), hi = lo;
    for (const auto& v : mesh.vertices) {
        lo = std::min(lo, v.y());
        hi = std::max(hi, v.y());
    }
    return static_cast<double>(hi) - static_cast<double>(lo);
}

}  // namespace synact
