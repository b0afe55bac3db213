#include "synact/formats/mesh.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace synact {

void Texture::validate() const {
    if (width < 0 || height < 0 ||
        static_cast<std::size_t>(width) * height * 3 != pixels.size()) {
        throw StructuralError("texture buffer size " + std::to_string(pixels.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height) + "x3");
    }
}

Vec3f Texture::sample_bilinear(float u, float v) const {
    if (width == 0 || height == 0) return Vec3f::Zero();
    const float x = std::clamp(u, 0.0f, 1.0f) * width - 0.5f;
    const float y = std::clamp(v, 0.0f, 1.0f) * height - 0.5f;
    const float fx = std::floor(x);
    const float fy = std::floor(y);
    const float ax = x - fx;
    const float ay = y - fy;
    const int x0 = std::clamp(static_cast<int>(fx), 0, width - 1);
    const int y0 = std::clamp(static_cast<int>(fy), 0, height - 1);
    const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, width - 1);
    const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, height - 1);
    Vec3f out;
    for (int c = 0; c < 3; ++c) {
        const float top = (1 - ax) * at(x0, y0)[c] + ax * at(x1, y0)[c];
        const float bottom = (1 - ax) * at(x0, y1)[c] + ax * at(x1, y1)[c];
        out[c] = ((1 - ay) * top + ay * bottom) / 255.0f;
    }
    return out;
}

void Mesh::validate() const {
    const std::size_t n = vertices.size();
    if (!normals.empty() && normals.size() != n)
        throw StructuralError("normal count does not match vertex count");
    if (!uvs.empty() && uvs.size() != n) throw StructuralError("uv count does not match vertex count");
    if (!colors.empty() && colors.size() != n)
        throw StructuralError("color count does not match vertex count");
    for (const auto& nrm : normals) {
        if (std::abs(nrm.norm() - 1.0f) > 1e-4f) throw StructuralError("normal is not unit length");
    }
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (auto idx : tri) {
            if (idx >= n) {
                throw StructuralError("triangle " + std::to_string(t) + " index " +
                                      std::to_string(idx) + " out of range");
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw StructuralError("triangle " + std::to_string(t) + " repeats a vertex index");
    }
}

Aabb bounds(const Mesh& mesh) {
    Aabb box;
    for (const auto& v : mesh.vertices) box.extend(v);
    return box;
}

Aabb transformed_bounds(const Aabb& box, const Affine& transform) {
    Aabb out;
    if (!box.valid()) return out;
    for (int i = 0; i < 8; ++i) {
        const Vec3d corner((i & 1) ? box.max.x() : box.min.x(), (i & 2) ? box.max.y() : box.min.y(),
                           (i & 4) ? box.max.z() : box.min.z());
        out.extend((transform * corner).cast<float>());
    }
    return out;
}

void compute_vertex_normals(Mesh& mesh) {
    std::vector<Vec3d> acc(mesh.vertices.size(), Vec3d::Zero());
    for (const auto& tri : mesh.triangles) {
        const Vec3d a = mesh.vertices[tri[0]].cast<double>();
        const Vec3d b = mesh.vertices[tri[1]].cast<double>();
        const Vec3d c = mesh.vertices[tri[2]].cast<double>();
        // Cross product magnitude is twice the area: area weighting for free.
        const Vec3d n = (b - a).cross(c - a);
        for (auto idx : tri) acc[idx] += n;
    }
    mesh.normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double len = acc[i].norm();
        mesh.normals[i] = len > 1e-20 ? Vec3f((acc[i] / len).cast<float>()) : Vec3f(0, 0, 1);
    }
}

Mesh transformed(const Mesh& mesh, const Affine& transform) {
    Mesh out = mesh;
    const Mat3d normal_matrix = transform.linear().inverse().transpose();
    for (auto& v : out.vertices) v = (transform * v.cast<double>()).cast<float>();
    for (auto& n : out.normals) {
        Vec3d m = normal_matrix * n.cast<double>();
        const double len = m.norm();
        n = len > 0 ? Vec3f((m / len).cast<float>()) : n;
    }
    return out;
}

void append(Mesh& mesh, const Mesh& other) {
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    const bool first = mesh.vertices.empty() && mesh.triangles.empty();
    const bool keep_normals = first ? !other.normals.empty() : (!mesh.normals.empty() && !other.normals.empty());
    const bool keep_uvs = first ? !other.uvs.empty() : (!mesh.uvs.empty() && !other.uvs.empty());
    const bool keep_colors = first ? !other.colors.empty() : (!mesh.colors.empty() && !other.colors.empty());
    mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
    if (keep_normals) mesh.normals.insert(mesh.normals.end(), other.normals.begin(), other.normals.end());
    else mesh.normals.clear();
    if (keep_uvs) mesh.uvs.insert(mesh.uvs.end(), other.uvs.begin(), other.uvs.end());
    else mesh.uvs.clear();
    if (keep_colors) mesh.colors.insert(mesh.colors.end(), other.colors.begin(), other.colors.end());
    else mesh.colors.clear();
    for (const auto& tri : other.triangles) mesh.triangles.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
}

Mesh make_box(const Vec3f& lo, const Vec3f& hi) {
    Mesh m;
    auto face = [&](const Vec3f& o, const Vec3f& du, const Vec3f& dv, const Vec3f& n) {
        const auto b = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.push_back(o);
        m.vertices.push_back(o + du);
        m.vertices.push_back(o + du + dv);
        m.vertices.push_back(o + dv);
        for (int i = 0; i < 4; ++i) m.normals.push_back(n);
        m.uvs.push_back({0, 1});
        m.uvs.push_back({1, 1});
        m.uvs.push_back({1, 0});
        m.uvs.push_back({0, 0});
        m.triangles.push_back({b, b + 1, b + 2});
        m.triangles.push_back({b, b + 2, b + 3});
    };
    const Vec3f e = hi - lo;
    const Vec3f X(e.x(), 0, 0), Y(0, e.y(), 0), Z(0, 0, e.z());
    face(lo + Z, X, Y, {0, 0, 1});                   // +z
    face(lo + X, -X, Y, {0, 0, -1});                 // -z
    face(lo + X + Z, -Z, Y, {1, 0, 0});              // +x
    face(lo, Z, Y, {-1, 0, 0});                      // -x
    face(lo + Y + Z, X, -Z, {0, 1, 0});              // +y
    face(lo, X, Z, {0, -1, 0});                      // -y
    return m;
}

Mesh make_cube_shared(const Vec3f& lo, const Vec3f& hi) {
    Mesh m;
    for (int i = 0; i < 8; ++i) {
        m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
    }
    // Outward-facing, counter-clockwise when viewed from outside.
    m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                   {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
    compute_vertex_normals(m);
    return m;
}

Mesh make_quad(float width, float height) {
    Mesh m;
    const float w = width * 0.5f, h = height * 0.5f;
    m.vertices = {{-w, h, 0}, {w, h, 0}, {w, -h, 0}, {-w, -h, 0}};
    m.normals.assign(4, Vec3f(0, 0, 1));
    m.uvs = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    m.triangles = {{0, 3, 2}, {0, 2, 1}};
    return m;
}

Mesh make_floor_grid(float size_x, float size_z, int cells) {
    Mesh m;
    cells = std::max(cells, 1);
    for (int j = 0; j <= cells; ++j) {
        for (int i = 0; i <= cells; ++i) {
            const float u = static_cast<float>(i) / cells, v = static_cast<float>(j) / cells;
            m.vertices.emplace_back((u - 0.5f) * size_x, 0.0f, (v - 0.5f) * size_z);
            m.normals.emplace_back(0, 1, 0);
            m.uvs.emplace_back(u, v);
        }
    }
    const auto row = static_cast<std::uint32_t>(cells + 1);
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            const std::uint32_t a = j * row + i, b = a + 1, c = a + row, d = c + 1;
            m.triangles.push_back({a, c, d});
            m.triangles.push_back({a, d, b});
        }
    }
    return m;
}

}  // namespace synact
