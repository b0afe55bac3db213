#include "doctest.h"
#include "support.hpp"

#include "synact/body/humanoid.hpp"
#include "synact/body/skinning.hpp"
#include "synact/error.hpp"
#include "synact/raster/raster.hpp"
#include "synact/scene/assets.hpp"
#include "synact/scene/scene.hpp"

using namespace synact;

namespace {

std::shared_ptr<const Mesh> body_mesh() {
    static const auto mesh = std::make_shared<const Mesh>(make_procedural_humanoid().template_mesh);
    return mesh;
}

std::shared_ptr<const Texture> background() { return placeholder_backgrounds()[0]; }

Mat4d body_model_view(const SceneGraph& s) {
    const auto& node = s.nodes[static_cast<std::size_t>(s.body_index())];
    return s.camera.view().matrix() * node.world.matrix();
}

struct PixelBox {
    int x0 = 1 << 30, x1 = -1, y0 = 1 << 30, y1 = -1;
    int count = 0;
};

PixelBox node_pixels(const Framebuffer& fb, int node) {
    PixelBox b;
    for (int y = 0; y < fb.height; ++y)
        for (int x = 0; x < fb.width; ++x)
            if (fb.node[static_cast<std::size_t>(y) * fb.width + x] == node) {
                b.x0 = std::min(b.x0, x);
                b.x1 = std::max(b.x1, x);
                b.y0 = std::min(b.y0, y);
                b.y1 = std::max(b.y1, y);
                ++b.count;
            }
    return b;
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("default wall scene centres the body horizontally") {
    const SceneGraph s = build_wall_scene(background(), body_mesh(), 0.0);
    CHECK_NOTHROW(s.validate());
    RenderConfig rc;
    rc.shadows = false;
    const Framebuffer fb = rasterize_frame(s, rc);
    const PixelBox b = node_pixels(fb, s.body_index());
    REQUIRE(b.count > 0);
    const double centre = 0.5 * (b.x0 + b.x1 + 1);
    CHECK(std::abs(centre - fb.width / 2.0) <= 1.0);
    // Body spans about three quarters of the image height.
    const double span = (b.y1 - b.y0 + 1) / static_cast<double>(fb.height);
    CHECK(span == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("wall scene rotation turns the facing direction in camera space") {
    const SceneGraph s0 = build_wall_scene(background(), body_mesh(), 0.0);
    const SceneGraph s90 = build_wall_scene(background(), body_mesh(), 90.0);
    // Body faces +z (towards the camera); R_y(90) sends +z to +x.
    const Vec3d f0 = body_model_view(s0).block<3, 3>(0, 0) * Vec3d::UnitZ();
    const Vec3d f90 = body_model_view(s90).block<3, 3>(0, 0) * Vec3d::UnitZ();
    CHECK((f0 - Vec3d::UnitZ()).norm() < 1e-9);
    CHECK((f90 - Vec3d::UnitX()).norm() < 1e-9);
    CHECK_THROWS_AS(build_wall_scene(background(), body_mesh(), 91.0), ContractError);
    CHECK_THROWS_AS(build_wall_scene(nullptr, body_mesh(), 0.0), ContractError);
}

TEST_CASE("wall is always behind the body") {
    for (double theta : {-90.0, -30.0, 0.0, 45.0, 90.0}) {
        for (double scale : {0.7, 1.3}) {
            const SceneGraph s = build_wall_scene(background(), body_mesh(), theta, {0.85, 0.17, scale});
            double body_far = 0, wall_near = 1e9;
            for (std::size_t n = 0; n < s.nodes.size(); ++n) {
                for (const auto& v : s.nodes[n].mesh->vertices) {
                    const Vec3d p = s.camera.view() * (s.nodes[n].world * v.cast<double>());
                    if (s.nodes[n].role == NodeRole::Body) body_far = std::max(body_far, -p.z());
                    if (s.nodes[n].role == NodeRole::Background) wall_near = std::min(wall_near, -p.z());
                }
            }
            CHECK(wall_near > body_far);
        }
    }
}

TEST_CASE("room scene places the body at the anchor") {
    std::vector<SceneNode> none;
    const SceneGraph s = build_room_scene(none, body_mesh(), Affine::Identity());
    const auto& node = s.nodes[static_cast<std::size_t>(s.body_index())];
    const Mesh placed = transformed(*node.mesh, node.world);
    const Aabb box = bounds(placed);
    CHECK(std::abs(box.min.y()) < 1e-3);
    CHECK(std::abs(box.center().x()) < 1e-3);
    CHECK(std::abs(box.center().z()) < 0.15);

    const Environment room = make_living_room();
    const SceneGraph r = build_room_scene(room.nodes, body_mesh(), room.anchor);
    CHECK(r.warnings.empty());
    RenderConfig rc;
    rc.shadows = false;
    const Framebuffer fb = rasterize_frame(r, rc);
    const PixelBox b = node_pixels(fb, r.body_index());
    CHECK(b.count > 500);
    int env = 0;
    for (auto n : fb.node) env += n >= 0 && n != r.body_index();
    CHECK(env > 10000);

    const SceneGraph far = build_room_scene(room.nodes, body_mesh(), Affine(Eigen::Translation3d(20, 0, 0)));
    CHECK_FALSE(far.warnings.empty());
}

TEST_CASE("orbit identity, inverse and equivalence with body rotation") {
    const SceneGraph s = build_wall_scene(background(), body_mesh(), 0.0);
    const SceneGraph same = orbit_camera_and_light(s, 0.0);
    CHECK((same.camera.pose.matrix() - s.camera.pose.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    const SceneGraph back = orbit_camera_and_light(orbit_camera_and_light(s, 45.0), -45.0);
    CHECK((back.camera.pose.matrix() - s.camera.pose.matrix()).cwiseAbs().maxCoeff() < 1e-6);
    for (std::size_t i = 0; i < s.lights.size(); ++i)
        CHECK((back.lights[i].direction - s.lights[i].direction).norm() < 1e-9);

    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        const double theta = rng.uniform(-90, 90);
        const Mat4d orbit = body_model_view(orbit_camera_and_light(s, theta));
        const Mat4d rotated = body_model_view(build_wall_scene(background(), body_mesh(), -theta));
        CHECK((orbit - rotated).cwiseAbs().maxCoeff() < 1e-9);
    }
    // Body and environment nodes are untouched.
    const SceneGraph o = orbit_camera_and_light(s, 30.0);
    for (std::size_t n = 0; n < s.nodes.size(); ++n) CHECK(o.nodes[n].world.matrix() == s.nodes[n].world.matrix());
}

TEST_CASE("background colours") {
    CHECK(palette_color("white") == Vec3d(1, 1, 1));
    CHECK(palette_color("cyan") == Vec3d(0, 1, 1));
    CHECK_THROWS_AS(palette_color("magenta"), ValidationError);
    CHECK(background_palette().size() == 12);

    const Environment room = make_living_room();
    const SceneGraph r = build_room_scene(room.nodes, body_mesh(), room.anchor);
    const SceneGraph c = set_background_color(r, "cyan");
    int colored = 0;
    for (std::size_t n = 0; n < c.nodes.size(); ++n) {
        if (c.nodes[n].colorable) {
            REQUIRE(c.nodes[n].color_override.has_value());
            CHECK(*c.nodes[n].color_override == Vec3d(0, 1, 1));
            ++colored;
        } else {
            CHECK(c.nodes[n].color_override == r.nodes[n].color_override);
        }
    }
    CHECK(colored == 4);
    CHECK_THROWS_AS(set_background_color(r, "magenta"), ValidationError);
}

TEST_CASE("node transforms compose and invert") {
    const Environment room = make_living_room();
    const SceneGraph r = build_room_scene(room.nodes, body_mesh(), room.anchor);
    Rng rng(8);
    for (int k = 0; k < 10; ++k) {
        Affine a = Affine::Identity();
        a.translate(Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
        a.rotate(Eigen::AngleAxisd(rng.uniform(-3, 3), Vec3d(rng.uniform(-1, 1), 1, rng.uniform(-1, 1)).normalized()));
        a.scale(rng.uniform(0.5, 2.0));
        Affine b = Affine::Identity();
        b.rotate(Eigen::AngleAxisd(rng.uniform(-3, 3), Vec3d::UnitY()));
        const SceneGraph ab = transform_nodes(transform_nodes(r, b), a);
        const SceneGraph direct = transform_nodes(r, a * b);
        const SceneGraph restored = transform_nodes(transform_nodes(r, a), a.inverse());
        for (std::size_t n = 0; n < r.nodes.size(); ++n) {
            CHECK((ab.nodes[n].world.matrix() - direct.nodes[n].world.matrix()).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((restored.nodes[n].world.matrix() - r.nodes[n].world.matrix()).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("living room is deterministic and well formed") {
    const Environment a = make_living_room();
    const Environment b = make_living_room();
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t n = 0; n < a.nodes.size(); ++n) {
        CHECK(*a.nodes[n].mesh == *b.nodes[n].mesh);
        CHECK_NOTHROW(a.nodes[n].mesh->validate());
    }
    const Aabb box = bounds(environment_world_mesh(a));
    CHECK(box.extent().x() == doctest::Approx(6.4).epsilon(0.01));
    CHECK(box.extent().y() == doctest::Approx(2.8).epsilon(0.01));
    CHECK(box.min.y() == doctest::Approx(0.0).epsilon(1e-6));
    const auto bgs = placeholder_backgrounds();
    CHECK(bgs.size() == 6);
    for (std::size_t i = 1; i < bgs.size(); ++i) CHECK_FALSE(*bgs[i] == *bgs[0]);
}

}  // TEST_SUITE
