#pragma once

#include "synact/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace synact {

using Triangle = std::array<std::uint32_t, 3>;
using Rgb8 = std::array<std::uint8_t, 3>;

// Row-major RGB8 image.
struct Texture {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Texture() = default;
    Texture(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    // Throws StructuralError when width*height*3 != pixels.size().
    void validate() const;

    std::uint8_t* at(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* at(int x, int y) const {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    }

    // Bilinear lookup with clamp-to-edge addressing. (u, v) in [0,1]^2,
    // v = 0 is the top row. Returns linear RGB in [0,1].
    Vec3f sample_bilinear(float u, float v) const;

    friend bool operator==(const Texture&, const Texture&) = default;
};

// Indexed triangle mesh. Positions in meters, Y up.
struct Mesh {
    std::vector<Vec3f> vertices;
    std::vector<Vec3f> normals;
    std::vector<Vec2f> uvs;       // empty, or one per vertex
    std::vector<Rgb8> colors;     // empty, or one per vertex
    std::vector<Triangle> triangles;
    std::optional<std::size_t> texture_id;

    std::size_t vertex_count() const { return vertices.size(); }
    bool empty() const { return vertices.empty(); }

    // Checks index bounds, per-vertex attribute counts, unit normals
    // (1e-4) and that no triangle repeats an index.
    void validate() const;

    friend bool operator==(const Mesh&, const Mesh&) = default;
};

struct Aabb {
    Vec3f min = Vec3f::Constant(std::numeric_limits<float>::infinity());
    Vec3f max = Vec3f::Constant(-std::numeric_limits<float>::infinity());

    bool valid() const { return (min.array() <= max.array()).all(); }
    void extend(const Vec3f& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    Vec3f center() const { return 0.5f * (min + max); }
    Vec3f extent() const { return max - min; }
    bool contains(const Vec3f& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    bool intersects(const Aabb& o) const {
        return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
    }
};

Aabb bounds(const Mesh& mesh);
Aabb transformed_bounds(const Aabb& box, const Affine& transform);

// Area-weighted per-vertex normals from face normals. Vertices without a
// non-degenerate incident face get (0, 0, 1).
void compute_vertex_normals(Mesh& mesh);

// Applies `transform` to positions and its inverse-transpose to normals.
Mesh transformed(const Mesh& mesh, const Affine& transform);

// Appends `other` to `mesh`, rebasing indices. Attribute arrays are kept
// only when both meshes carry them.
void append(Mesh& mesh, const Mesh& other);

// Axis-aligned box with outward normals, 24 vertices and 12 triangles.
// Per-face uvs span [0,1]^2.
Mesh make_box(const Vec3f& min, const Vec3f& max);

// Box with shared corners: 8 vertices, 12 triangles (no uvs).
Mesh make_cube_shared(const Vec3f& min, const Vec3f& max);

// Quad in the plane z = 0 spanning [-w/2, w/2] x [-h/2, h/2], facing +z,
// with uv (0,0) at the top-left corner.
Mesh make_quad(float width, float height);

// Rectangular grid in the xz plane at height y, normal +y, subdivided.
Mesh make_floor_grid(float size_x, float size_z, int cells);

}  // namespace synact
