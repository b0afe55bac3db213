#pragma once

#include "synact/formats/clip.hpp"
#include "synact/formats/mesh.hpp"
#include "synact/labels.hpp"
#include "synact/scene/scene.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace synact {

struct RenderConfig {
    int width = 224;
    int height = 224;
    bool supersample = false;      // 2x2 ordered grid, box filtered
    int shadow_resolution = 1024;  // power of two
    bool shadows = true;

    void validate() const;
};

struct Framebuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> color;  // RGB8, rows top-down
    std::vector<float> depth;         // view-space meters, +inf for background
    std::vector<std::int32_t> node;   // scene node index, -1 for background

    Texture color_texture() const;
};

struct Projection {
    Vec2d pixel;   // continuous image coordinates, (0, 0) = top-left corner
    double depth;  // view-space -z, meters
};

// Pinhole projection. The optical axis hits pixel coordinate (W/2, H/2); the
// top frustum edge maps to y = 0.
Projection project(const Camera& camera, int width, int height, const Vec3d& world);
Vec3d unproject(const Camera& camera, int width, int height, const Vec2d& pixel, double depth);

// Pixel-index intrinsics (pixel i has its centre at coordinate i + 0.5), in
// the computer-vision camera frame: x right, y down, z forward.
struct Intrinsics {
    int width = 0;
    int height = 0;
    double fx = 0, fy = 0, cx = 0, cy = 0;
};
Intrinsics camera_intrinsics(const Camera& camera, int width, int height);

// Camera-to-world pose in the computer-vision frame (flips y and z).
Isometry cv_pose(const Camera& camera);

Framebuffer rasterize_frame(const SceneGraph& scene, const RenderConfig& config = {});

// Renders every scene into a clip at 25 fps. Throws ContractError for an
// empty sequence or a resolution change.
ClipContainer render_clip(const std::vector<SceneGraph>& scenes, ActionLabel label, const std::string& provenance,
                          const RenderConfig& config = {});

struct DepthSequence {
    Intrinsics intrinsics;
    std::vector<std::vector<std::uint16_t>> depth_mm;  // 0 = invalid
    std::vector<Texture> color;
    std::vector<Isometry> poses;  // ground-truth cv_pose per frame
};

// Depth in millimetres plus colour. Throws ConfigError when the far plane
// does not fit u16 millimetres (far >= 65.535 m).
DepthSequence render_depth_sequence(const std::vector<SceneGraph>& scenes, const RenderConfig& config = {});

}  // namespace synact
