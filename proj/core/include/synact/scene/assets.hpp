#pragma once

#include "synact/scene/scene.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace synact {

// Six deterministic placeholder wall textures; indices 0-2 look like
// indoor scenes, 3-5 like outdoor ones.
std::vector<std::shared_ptr<const Texture>> placeholder_backgrounds(int width = 384, int height = 256);

struct Environment {
    std::string name;
    std::vector<SceneNode> nodes;
    Affine anchor = Affine::Identity();  // body footprint placement
};

// Procedural living room (6.4 x 2.8 x 6.4 m, floor at y = 0, centred on the
// origin) with textured walls, floor, rug, furniture and pictures. The four
// walls are colorable. The anchor places the body at the origin facing +z.
Environment make_living_room();

// All environment nodes merged into one world-space mesh (no textures).
Mesh environment_world_mesh(const Environment& env);

// Views for reconstruction fixtures: the camera stands on a circle of
// `radius` around the environment origin at `eye_height`, looks outward and
// slightly down, and turns through `sweep_deg` over the sequence. Lights
// stay fixed.
std::vector<SceneGraph> room_orbit_scenes(const Environment& env, std::size_t frames, double radius = 0.8,
                                          double sweep_deg = 120.0, double eye_height = 1.4, double vfov_deg = 60.0);

// Loads an OBJ, GLB or PLY file as an environment. Nodes whose names are
// listed in `colorable` receive background colour overrides; for single-mesh
// formats the node is named after the file stem.
Environment load_environment(const std::filesystem::path& path, const Affine& anchor,
                             const std::vector<std::string>& colorable = {});

}  // namespace synact
