#pragma once

#include "synact/recon/posegraph.hpp"
#include "synact/recon/registration.hpp"
#include "synact/recon/tsdf.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace synact {

struct ReconConfig {
    std::size_t fragment_size = 50;
    int keyframe_interval = 5;
    double loop_min_fitness = 0.3;      // frame and fragment loop acceptance
    std::size_t loop_min_inliers = 12;  // rough alignment consensus for keyframe loops
    double fragment_icp_distance = 0.08;  // coarse fragment registration, metres
    double fragment_icp_fine_distance = 0.04;
    int threads = 0;  // fragments built in parallel; 0 = hardware concurrency
    TsdfConfig tsdf;
    OdometryParams odometry;
    RoughAlignParams rough;
    PoseGraphOptions posegraph;

    void validate() const;
};

// Frames [first, last) fused in the frame of `first`.
struct Fragment {
    std::size_t first = 0;
    std::size_t last = 0;
    PoseGraph local_graph;            // nodes are fragment-local poses
    Mesh mesh;                        // fragment-local coordinates
    Isometry world_pose = Isometry::Identity();
    std::vector<std::string> warnings;

    std::size_t size() const { return last - first; }
};

// Partitions into blocks of `fragment_size`; a block is split where
// odometry loses tracking. Local pose graphs hold consecutive odometry
// edges and keyframe loop edges (every `keyframe_interval`-th frame pair,
// seeded by rough_align).
std::vector<Fragment> build_fragments(const std::vector<RGBDFrame>& frames, const ReconConfig& config = {});

// Builds the global fragment pose graph. Nodes are fragment world poses
// chained by odometry; consecutive fragments are joined by the frame
// odometry across their boundary composed with the local trajectory. Other
// fragment pairs whose chained bounding boxes intersect are tested with
// mesh ICP and kept when fitness is high enough, with information scaled by
// fitness. Accepted loop edges are then re-registered at the finer distance.
PoseGraph register_fragments(const std::vector<Fragment>& fragments, const std::vector<RGBDFrame>& frames,
                             const ReconConfig& config = {});

struct ReconResult {
    std::vector<Isometry> trajectory;  // world-from-camera per frame, world = first camera
    Mesh mesh;
    std::size_t fragment_count = 0;
    std::size_t edge_count = 0;
    std::size_t loop_edge_count = 0;
    double final_cost = 0.0;
    bool tracking_lost = false;  // some fragment was split by lost tracking
    std::vector<std::string> warnings;
};

ReconResult reconstruct(const std::vector<RGBDFrame>& frames, const ReconConfig& config = {});

// RMS position error after the best rigid alignment of `estimate` onto
// `truth` (Umeyama, no scale). `alignment` receives the transform applied
// to the estimate.
double absolute_trajectory_error(const std::vector<Isometry>& estimate, const std::vector<Isometry>& truth,
                                 Isometry* alignment = nullptr);

// One row per pose: the 3x4 matrix [R | t] row-major, 12 numbers.
std::string format_trajectory(const std::vector<Isometry>& poses);
std::vector<Isometry> parse_trajectory(const std::string& text);

// Distances from each point to the nearest triangle of `mesh`.
double point_to_mesh_rms(const std::vector<Vec3d>& points, const Mesh& mesh);

}  // namespace synact
