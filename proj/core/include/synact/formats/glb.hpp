#pragma once

#include "synact/formats/mesh.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace synact {

// A mesh placed in the scene by a node. `world` is the flattened product of
// the node's ancestors' transforms and its own.
struct GlbInstance {
    std::size_t mesh = 0;
    Affine world = Affine::Identity();
};

struct GlbScene {
    std::vector<Mesh> meshes;  // one per mesh primitive
    std::vector<Texture> textures;
    std::vector<GlbInstance> instances;
    std::vector<std::string> warnings;
};

// Binary glTF 2.0 reader. Decodes triangle primitives with POSITION,
// NORMAL and TEXCOORD_0 plus optional indices; base-color textures (PNG)
// are attached through Mesh::texture_id. Animations, skins and extensions
// are ignored with a warning.
//
// Errors: FormatError for bad magic/version/chunk layout, StructuralError
// for accessors outside their buffers, UnsupportedFeatureError naming an
// unsupported component type, accessor type or primitive mode.
GlbScene parse_glb(std::span<const std::uint8_t> bytes);

// Minimal writer (positions, normals, optional uvs, indices, one embedded
// PNG texture per textured mesh). Used to export scenes and as a test
// fixture generator.
std::vector<std::uint8_t> write_glb(const std::vector<Mesh>& meshes, const std::vector<Texture>& textures);

}  // namespace synact
