#include "synact/scene/scene.hpp"

#include "synact/error.hpp"

#include <cmath>
#include <numbers>

namespace synact {
namespace {

Vec3d footprint_center(const Mesh& mesh) {
    const Aabb b = bounds(mesh);
    return Vec3d(0.5 * (b.min.x() + b.max.x()), b.min.y(), 0.5 * (b.min.z() + b.max.z()));
}

}  // namespace

Isometry look_from(const Vec3d& eye, const Vec3d& target) {
    const Vec3d back = (eye - target).normalized();  // camera +z
    Vec3d right = Vec3d::UnitY().cross(back);
    if (right.norm() < 1e-9) right = Vec3d::UnitX();
    right.normalize();
    const Vec3d up = back.cross(right);
    Isometry pose = Isometry::Identity();
    pose.linear().col(0) = right;
    pose.linear().col(1) = up;
    pose.linear().col(2) = back;
    pose.translation() = eye;
    return pose;
}

namespace {

void apply_to_lights(std::vector<Light>& lights, const Isometry& delta) {
    for (auto& l : lights) {
        l.direction = (delta.linear() * l.direction).normalized();
        l.position = delta * l.position;
    }
}

Light key_light(const Vec3d& direction, double intensity) {
    Light l;
    l.kind = LightKind::Directional;
    l.direction = direction.normalized();
    l.intensity = intensity;
    return l;
}

}  // namespace

void Camera::validate() const {
    if (!(vfov > 0 && vfov < std::numbers::pi)) throw ContractError("camera vfov must be in (0, pi)");
    if (!(aspect > 0)) throw ContractError("camera aspect must be positive");
    if (!(near > 0 && near < far)) throw ContractError("camera planes must satisfy 0 < near < far");
}

void Light::validate() const {
    if (!(intensity >= 0)) throw ContractError("light intensity must be nonnegative");
    if (kind == LightKind::Directional && std::abs(direction.norm() - 1.0) > 1e-6)
        throw ContractError("directional light direction must be unit length");
}

int SceneGraph::body_index() const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].role == NodeRole::Body) return static_cast<int>(i);
    return -1;
}

void SceneGraph::validate() const {
    camera.validate();
    for (const auto& l : lights) l.validate();
    for (const auto& n : nodes) {
        if (!n.mesh) throw ContractError("scene node '" + n.name + "' has no mesh");
        const double det = n.world.linear().determinant();
        if (!std::isfinite(det) || std::abs(det) < 1e-12)
            throw ContractError("scene node '" + n.name + "' transform is not invertible");
    }
}

Affine wall_body_transform(const Mesh& body_mesh, double theta_deg, const WallPlacement& placement) {
    const Vec3d c = footprint_center(body_mesh);
    Affine m = Affine::Identity();
    m.translate(Vec3d(placement.dx, placement.dy, 0.0));
    m.translate(c);
    m.scale(placement.scale);
    m.rotate(rotation_y(deg_to_rad(theta_deg)));
    m.translate(-c);
    return m;
}

SceneGraph build_wall_scene(std::shared_ptr<const Texture> background, std::shared_ptr<const Mesh> body_mesh,
                            double theta_deg, const WallPlacement& placement, const WallSceneConfig& config,
                            std::optional<double> reference_height) {
    if (!background || background->width <= 0 || background->height <= 0)
        throw ContractError("wall scene needs a background texture");
    if (!body_mesh || body_mesh->empty()) throw ContractError("wall scene needs a body mesh");
    if (!(theta_deg >= -90.0 && theta_deg <= 90.0)) throw ContractError("wall rotation must lie in [-90, 90] degrees");
    if (!(placement.scale > 0)) throw ContractError("body scale must be positive");
    background->validate();

    const Aabb bb = bounds(*body_mesh);
    const double h = reference_height.value_or(static_cast<double>(bb.max.y()) - bb.min.y());
    const Vec3d c = footprint_center(*body_mesh);

    SceneGraph scene;
    scene.camera.vfov = deg_to_rad(config.vfov_deg);
    scene.camera.near = config.near;
    scene.camera.far = config.far;
    const double tan_half = std::tan(0.5 * scene.camera.vfov);
    const double dist = h / (2.0 * config.frame_fraction * tan_half);
    const Vec3d target = c + Vec3d(0, 0.5 * h, 0);
    scene.camera.pose = look_from(target + Vec3d(0, 0, dist), target);

    // Wall sized to cover the frustum at its depth with a margin.
    const double wall_depth = dist + config.wall_gap;
    const double half_h = 1.1 * wall_depth * tan_half;
    const double half_w = half_h * scene.camera.aspect;
    SceneNode wall;
    wall.name = "wall";
    wall.mesh = std::make_shared<const Mesh>(make_quad(static_cast<float>(2 * half_w), static_cast<float>(2 * half_h)));
    wall.texture = std::move(background);
    wall.world = Affine(Eigen::Translation3d(target.x(), target.y(), c.z() - config.wall_gap));
    wall.role = NodeRole::Background;
    scene.nodes.push_back(std::move(wall));

    SceneNode body;
    body.name = "body";
    body.mesh = std::move(body_mesh);
    body.world = wall_body_transform(*body.mesh, theta_deg, placement);
    body.role = NodeRole::Body;
    scene.nodes.push_back(std::move(body));

    scene.body_pivot = c + Vec3d(placement.dx, placement.dy, 0.0);
    scene.lights.push_back(key_light(config.light_direction, config.light_intensity));
    scene.ambient = Vec3d::Constant(config.ambient);
    scene.validate();
    return scene;
}

SceneGraph build_room_scene(const std::vector<SceneNode>& environment, std::shared_ptr<const Mesh> body_mesh,
                            const Affine& anchor, const RoomSceneConfig& config, std::optional<double> reference_height) {
    if (!body_mesh || body_mesh->empty()) throw ContractError("room scene needs a body mesh");
    SceneGraph scene;
    scene.nodes = environment;

    const Aabb bb = bounds(*body_mesh);
    const double h = reference_height.value_or(static_cast<double>(bb.max.y()) - bb.min.y());
    const Vec3d c = footprint_center(*body_mesh);

    SceneNode body;
    body.name = "body";
    body.mesh = std::move(body_mesh);
    body.world = anchor * Eigen::Translation3d(-c);
    body.role = NodeRole::Body;

    Aabb env;
    for (const auto& n : environment) {
        const Aabb nb = transformed_bounds(bounds(*n.mesh), n.world);
        env.extend(nb.min);
        env.extend(nb.max);
    }
    const Aabb placed = transformed_bounds(bb, body.world);
    if (!environment.empty() && !(env.contains(placed.min) && env.contains(placed.max)))
        scene.warnings.push_back("body placement leaves the environment bounds");
    scene.nodes.push_back(std::move(body));

    scene.camera.vfov = deg_to_rad(config.vfov_deg);
    scene.camera.near = config.near;
    scene.camera.far = config.far;
    const double dist = h / (2.0 * config.frame_fraction * std::tan(0.5 * scene.camera.vfov));
    const Vec3d pivot = anchor.translation();
    const Vec3d up = anchor.linear() * Vec3d::UnitY();
    const Vec3d front = (anchor.linear() * Vec3d::UnitZ()).normalized();
    const double scale = up.norm();
    const Vec3d target = pivot + 0.5 * h * up;
    scene.camera.pose = look_from(target + dist * scale * front, target);
    scene.body_pivot = pivot;

    // Key light travels from the camera side, expressed in the anchor frame.
    const Mat3d frame = anchor.linear() / scale;
    scene.lights.push_back(key_light(frame * config.light_direction, config.light_intensity));
    if (config.point_intensity > 0) {
        Light fill;
        fill.kind = LightKind::Point;
        fill.position = target + frame * Vec3d(-1.0, 1.0, 1.2);
        fill.intensity = config.point_intensity;
        fill.casts_shadows = false;
        scene.lights.push_back(fill);
    }
    scene.ambient = Vec3d::Constant(config.ambient);
    scene.validate();
    return scene;
}

SceneGraph orbit_camera_and_light(const SceneGraph& scene, double theta_deg) {
    SceneGraph out = scene;
    if (theta_deg == 0.0) return out;
    Isometry delta = Isometry::Identity();
    delta.linear() = rotation_y(deg_to_rad(theta_deg));
    delta.translation() = scene.body_pivot - delta.linear() * scene.body_pivot;
    out.camera.pose = delta * scene.camera.pose;
    apply_to_lights(out.lights, delta);
    return out;
}

SceneGraph offset_camera(const SceneGraph& scene, double offset_x, double offset_y) {
    SceneGraph out = scene;
    if (offset_x == 0.0 && offset_y == 0.0) return out;
    Isometry local = Isometry::Identity();
    local.translation() = Vec3d(-offset_x, -offset_y, 0.0);
    out.camera.pose = scene.camera.pose * local;
    apply_to_lights(out.lights, out.camera.pose * scene.camera.pose.inverse());
    return out;
}

SceneGraph with_body_mesh(const SceneGraph& scene, std::shared_ptr<const Mesh> body_mesh) {
    SceneGraph out = scene;
    const int b = out.body_index();
    if (b < 0) throw ContractError("scene has no body node");
    out.nodes[b].mesh = std::move(body_mesh);
    return out;
}

const std::vector<PaletteColor>& background_palette() {
    static const std::vector<PaletteColor> palette = {
        {"pink", {1.0, 0.753, 0.796}},    {"purple", {0.502, 0.0, 0.502}}, {"cyan", {0.0, 1.0, 1.0}},
        {"red", {1.0, 0.0, 0.0}},         {"green", {0.0, 0.502, 0.0}},    {"yellow", {1.0, 1.0, 0.0}},
        {"brown", {0.647, 0.165, 0.165}}, {"blue", {0.0, 0.0, 1.0}},       {"offwhite", {0.98, 0.965, 0.91}},
        {"white", {1.0, 1.0, 1.0}},       {"orange", {1.0, 0.647, 0.0}},   {"grey", {0.502, 0.502, 0.502}},
    };
    return palette;
}

Vec3d palette_color(std::string_view name) {
    for (const auto& c : background_palette())
        if (c.name == name) return c.rgb;
    throw ValidationError("unknown background colour '" + std::string(name) + "'");
}

SceneGraph set_background_color(const SceneGraph& scene, std::string_view color_name) {
    const Vec3d rgb = palette_color(color_name);
    SceneGraph out = scene;
    for (auto& n : out.nodes)
        if (n.colorable) n.color_override = rgb;
    return out;
}

SceneGraph transform_nodes(const SceneGraph& scene, const Affine& transform) {
    SceneGraph out = scene;
    for (auto& n : out.nodes) n.world = transform * n.world;
    return out;
}

}  // namespace synact
