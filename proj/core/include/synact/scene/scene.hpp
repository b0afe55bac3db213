#pragma once

#include "synact/formats/mesh.hpp"
#include "synact/geometry.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synact {

// Perspective camera. OpenGL convention: the camera looks down its local -z
// axis with +y up; `pose` maps camera coordinates to world coordinates.
struct Camera {
    double vfov = deg_to_rad(45.0);  // radians
    double aspect = 1.0;
    double near = 0.1;
    double far = 50.0;
    Isometry pose = Isometry::Identity();

    Isometry view() const { return pose.inverse(); }
    // Throws ContractError unless 0 < vfov < pi and 0 < near < far.
    void validate() const;
};

// Camera pose at `eye` looking at `target` with world +y up.
Isometry look_from(const Vec3d& eye, const Vec3d& target);

enum class LightKind { Directional, Point };

struct Light {
    LightKind kind = LightKind::Directional;
    Vec3d direction = Vec3d(0, 0, -1);  // travel direction (directional lights), unit length
    Vec3d position = Vec3d::Zero();     // point lights
    double intensity = 1.0;
    Vec3d color = Vec3d::Ones();
    bool casts_shadows = true;

    void validate() const;
};

enum class NodeRole { Body, Background, Environment };

struct SceneNode {
    std::string name;
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const Texture> texture;  // sampled with mesh uvs when set
    Affine world = Affine::Identity();
    std::optional<Vec3d> color_override;     // flat albedo in [0,1]^3
    NodeRole role = NodeRole::Environment;
    bool colorable = false;                  // receives set_background_color
};

struct SceneGraph {
    std::vector<SceneNode> nodes;
    Camera camera;
    std::vector<Light> lights;
    Vec3d ambient = Vec3d::Constant(0.25);
    Vec3d clear_color = Vec3d::Zero();
    // World point on the body's vertical axis (pivot of body rotation and orbit).
    Vec3d body_pivot = Vec3d::Zero();
    std::vector<std::string> warnings;

    // Index of the body node, or -1.
    int body_index() const;
    // Throws ContractError on a non-invertible node transform, an invalid
    // camera or light, or a node without a mesh.
    void validate() const;
};

struct WallPlacement {
    double dx = 0.0;     // meters
    double dy = 0.0;     // meters
    double scale = 1.0;
};

struct WallSceneConfig {
    double vfov_deg = 45.0;
    double near = 0.1;
    double far = 50.0;
    double frame_fraction = 0.75;  // body height / image height at default placement
    double wall_gap = 1.5;         // meters from the body origin to the wall
    double light_intensity = 0.75;
    Vec3d light_direction = Vec3d(0.35, -0.55, -1.0);
    double ambient = 0.25;
};

// Body rotation and placement in the wall scene:
//   M = T(dx, dy, 0) * T(c) * S(scale) * R_y(theta) * T(-c)
// where c is the centre of the body's footprint (bounding-box centre in x/z,
// minimum y). The translation is not scaled.
Affine wall_body_transform(const Mesh& body_mesh, double theta_deg, const WallPlacement& placement);

// Textured wall behind a body centred at the origin. `reference_height`
// (meters, defaults to the body's own height) frames the camera so that
// the body spans `frame_fraction` of the image height. Throws
// ContractError for a missing or empty texture or theta outside
// [-90, 90] degrees.
SceneGraph build_wall_scene(std::shared_ptr<const Texture> background, std::shared_ptr<const Mesh> body_mesh,
                            double theta_deg, const WallPlacement& placement = {}, const WallSceneConfig& config = {},
                            std::optional<double> reference_height = std::nullopt);

struct RoomSceneConfig {
    double vfov_deg = 55.0;
    double near = 0.1;
    double far = 50.0;
    double frame_fraction = 0.75;
    double light_intensity = 0.6;
    Vec3d light_direction = Vec3d(0.3, -0.7, -0.65);
    double point_intensity = 0.25;  // second, shadowless fill light
    double ambient = 0.3;
};

// Environment nodes plus the body at `anchor` (a transform of the body's
// footprint origin). The camera faces the body's front (+z of the anchor
// frame). A body whose bounds leave the environment bounds adds a warning.
SceneGraph build_room_scene(const std::vector<SceneNode>& environment, std::shared_ptr<const Mesh> body_mesh,
                            const Affine& anchor, const RoomSceneConfig& config = {},
                            std::optional<double> reference_height = std::nullopt);

// Rotates the camera and every light by theta about the vertical line
// through the body pivot. Body and environment nodes are untouched.
SceneGraph orbit_camera_and_light(const SceneGraph& scene, double theta_deg);

// Moves the camera rig in its own image plane so the body pivot appears at
// (offset_x, offset_y) meters from the image centre (lights follow).
SceneGraph offset_camera(const SceneGraph& scene, double offset_x, double offset_y);

// Replaces the body node mesh (same transform).
SceneGraph with_body_mesh(const SceneGraph& scene, std::shared_ptr<const Mesh> body_mesh);

struct PaletteColor {
    std::string_view name;
    Vec3d rgb;
};

// The 12 background colours, in sampling order.
const std::vector<PaletteColor>& background_palette();
// Throws ValidationError for a name outside the palette.
Vec3d palette_color(std::string_view name);

// Flat colour override on every colorable node.
SceneGraph set_background_color(const SceneGraph& scene, std::string_view color_name);

// Applies a transform to all nodes (used for composition tests).
SceneGraph transform_nodes(const SceneGraph& scene, const Affine& transform);

}  // namespace synact
