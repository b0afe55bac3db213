#pragma once

#include "synact/recon/rgbd.hpp"

#include <cstdint>
#include <vector>

namespace synact {

// All relative transforms map points from frame b's camera into frame a's:
// p_a = T * p_b, i.e. T = X_a^-1 * X_b for world-from-camera poses X.

struct RoughAlignParams {
    int max_corners = 400;
    double harris_k = 0.04;
    int patch_radius = 4;          // 9x9 descriptor
    double min_ncc = 0.8;
    int ransac_iterations = 1000;
    double inlier_distance_m = 0.03;
    std::size_t min_inliers = 3;
    double max_depth_m = 10.0;
    std::uint64_t seed = 0x5eed;
};

struct RoughAlignResult {
    bool success = false;
    Isometry transform = Isometry::Identity();
    std::size_t inliers = 0;
    std::size_t matches = 0;
};

// Harris corners + normalized cross-correlation patch matching (mutual best
// matches), back-projected through depth, then 3-point rigid RANSAC with a
// least-squares refit on the consensus set.
RoughAlignResult rough_align(const RGBDFrame& a, const RGBDFrame& b, const RoughAlignParams& params = {});

struct OdometryParams {
    int levels = 4;
    std::vector<int> iterations = {20, 12, 8, 8};                   // fine to coarse
    std::vector<double> max_distance_m = {0.04, 0.08, 0.16, 0.32};  // fine to coarse
    double fitness_threshold_m = 0.04;                  // 2 x voxel size
    double min_fitness = 0.3;
    double max_depth_m = 10.0;
    // Weight of the geometric term; the photometric term gets 1 - lambda.
    // 1 disables the intensity term.
    double hybrid_lambda = 0.968;
    double max_intensity_residual = 0.3;
};

struct OdometryResult {
    Isometry transform = Isometry::Identity();
    double fitness = 0.0;  // inlier fraction of valid source points
    double rmse = 0.0;     // point-to-plane, over inliers
    bool tracking_lost = true;
    Mat6d information = Mat6d::Zero();
};

// Multi-scale hybrid odometry with projective data association. Points of
// b are moved into a and compared with a's vertex at the projected pixel
// (point-to-plane) and with a's intensity there (photometric). The
// intensity term constrains sliding along planar, textured surfaces.
OdometryResult rgbd_odometry(const RGBDFrame& a, const RGBDFrame& b, const Isometry& init,
                             const OdometryParams& params = {});

struct PointCloud {
    std::vector<Vec3d> points;
    std::vector<Vec3d> normals;
};

// One point per occupied voxel (the first one encountered), with normals.
PointCloud voxel_downsample(const Mesh& mesh, double voxel);
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

struct IcpResult {
    Isometry transform = Isometry::Identity();
    double fitness = 0.0;  // fraction of source points with a neighbour within max distance
    double rmse = 0.0;
    Mat6d information = Mat6d::Zero();
};

// Point-to-plane ICP between unordered clouds; nearest neighbours from a
// uniform hash grid. `transform` maps source into target.
IcpResult icp_point_to_plane(const PointCloud& source, const PointCloud& target, const Isometry& init,
                             double max_distance, int iterations = 30);

// Mean of G^T G over correspondences, G = [-[p]x, I]: the Gauss-Newton
// information of a point-to-point alignment at p (target frame).
Mat6d point_information(const std::vector<Vec3d>& points);

}  // namespace synact
