#pragma once

#include "synact/body/rig.hpp"
#include "synact/formats/mesh.hpp"

#include <vector>

namespace synact {

// World transform of every joint:
//   world(j) = world(parent(j)) * rest_local(j) * R(pose_j)
// The root uses T(root_translation) as its parent. Throws ContractError
// when the pose length differs from the joint count.
std::vector<Isometry> forward_kinematics(const SkeletonRig& rig, const PoseFrame& pose);

// Linear blend skinning: v' = sum_k w_k * T_k * T_rest,k^-1 * v. Normals are
// skinned with the blended linear part and renormalized.
Mesh lbs_pose(const SkinnedBody& body, const PoseFrame& pose);

// Same, with precomputed inverse rest transforms (for per-frame loops).
Mesh lbs_pose(const SkinnedBody& body, const PoseFrame& pose, const std::vector<Isometry>& inverse_rest);
std::vector<Isometry> inverse_rest_transforms(const SkeletonRig& rig);

// Vertical extent max_y - min_y. Throws ContractError for an empty mesh.
double body_height(const Mesh& mesh);

}  // namespace synact
