#pragma once

#include "synact/formats/mesh.hpp"
#include "synact/recon/rgbd.hpp"

#include <array>
#include <functional>
#include <memory>
#include <unordered_map>

namespace synact {

struct TsdfConfig {
    double voxel_size = 0.02;
    double truncation = 0.08;  // 4 x voxel size
    double max_depth_m = 8.0;
    int threads = 0;           // 0 = hardware concurrency

    void validate() const;
};

struct Voxel {
    float sdf = 0.0f;     // metres, |sdf| <= truncation where weight > 0
    float weight = 0.0f;
    float r = 0.0f, g = 0.0f, b = 0.0f;  // averaged colour in [0, 1]
};

using VoxelIndex = Eigen::Vector3i;

// Block-sparse grid of 8^3 voxel blocks allocated on demand. Voxel (i, j, k)
// has its centre at (i + 0.5, j + 0.5, k + 0.5) * voxel_size.
class TsdfVolume {
public:
    static constexpr int kBlock = 8;

    explicit TsdfVolume(const TsdfConfig& config = {});

    const TsdfConfig& config() const { return config_; }
    std::size_t block_count() const { return blocks_.size(); }

    // Fuses one frame given its world-from-camera pose (computer-vision
    // camera frame). Signed distances are projective: measured depth minus
    // the voxel's depth along the optical axis, clamped to the truncation
    // band; voxels more than one truncation behind the surface are skipped.
    void integrate(const RGBDFrame& frame, const Isometry& pose);

    const Voxel* find(const VoxelIndex& v) const;
    Vec3d voxel_center(const VoxelIndex& v) const;
    VoxelIndex voxel_of(const Vec3d& p) const;

    void for_each_voxel(const std::function<void(const VoxelIndex&, const Voxel&)>& fn) const;

    // Direct write access, used to build analytic volumes.
    Voxel& at(const VoxelIndex& v);

private:
    struct KeyHash {
        std::size_t operator()(const VoxelIndex& k) const;
    };
    using Block = std::array<Voxel, kBlock * kBlock * kBlock>;

    TsdfConfig config_;
    std::unordered_map<VoxelIndex, std::unique_ptr<Block>, KeyHash> blocks_;
};

TsdfVolume integrate_tsdf(const std::vector<RGBDFrame>& frames, const std::vector<Isometry>& poses,
                          const TsdfConfig& config = {});

// Marching cubes over cubes whose eight corners all carry weight. Vertices
// are shared along grid edges, normals point towards positive distance and
// colours come from the voxel accumulators. An empty volume gives an empty
// mesh.
Mesh extract_mesh(const TsdfVolume& volume);

}  // namespace synact
