#pragma once

#include "synact/flow/flow.hpp"
#include "synact/formats/mesh.hpp"
#include "synact/raster/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace synact {

// Intensity plus metric depth from one camera view. Pixel (x, y) has its
// centre at (x + 0.5, y + 0.5) in image coordinates; intrinsics follow the
// pixel-index convention of camera_intrinsics().
struct RGBDFrame {
    GrayImage intensity;                 // [0, 1]
    std::vector<std::uint16_t> depth;    // millimetres, 0 = invalid
    Texture color;                       // optional; empty when unavailable
    Intrinsics intrinsics;
    std::size_t index = 0;

    int width() const { return intensity.width; }
    int height() const { return intensity.height; }
    double depth_m(int x, int y) const { return depth[static_cast<std::size_t>(y) * width() + x] * 1e-3; }
    std::size_t valid_depth_count() const;

    // StructuralError on size mismatches, ValidationError on non-positive
    // intrinsics.
    void validate() const;
};

std::vector<RGBDFrame> frames_from_depth_sequence(const DepthSequence& sequence);

// Directory layout:
//   intrinsics.json            {"width", "height", "fx", "fy", "cx", "cy"}
//   color/NNNNNN.png           RGB8 (or gray) image
//   depth/NNNNNN.png | .raw    16-bit depth; .raw is little-endian u16
// Depth is millimetres unless `tum_depth_scale` is set, in which case raw
// values are divided by 5000 (TUM convention) and rescaled to millimetres.
std::vector<RGBDFrame> load_rgbd_directory(const std::filesystem::path& dir, bool tum_depth_scale = false);
void save_rgbd_directory(const std::filesystem::path& dir, const DepthSequence& sequence);

// Per-pixel camera-frame points (x right, y down, z forward) and normals.
// Invalid pixels have z = 0 (points) and a zero normal.
struct VertexMap {
    int width = 0;
    int height = 0;
    Intrinsics intrinsics;
    std::vector<Vec3f> points;
    std::vector<Vec3f> normals;

    bool valid(std::size_t i) const { return points[i].z() > 0.0f; }
    bool has_normal(std::size_t i) const { return normals[i].squaredNorm() > 0.0f; }
};

// Normals are estimated from neighbouring points; pixels whose neighbours
// lie across a depth discontinuity get no normal.
VertexMap make_vertex_map(const RGBDFrame& frame, double max_depth_m = 10.0);

// Halves resolution by keeping the top-left sample of each 2x2 block.
VertexMap downsample(const VertexMap& map);

// Valid points, optionally every `stride`-th pixel in each direction.
std::vector<Vec3d> backproject(const RGBDFrame& frame, int stride = 1, double max_depth_m = 10.0);

}  // namespace synact
