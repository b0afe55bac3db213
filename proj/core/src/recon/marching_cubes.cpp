#include "synact/recon/tsdf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace synact {
namespace {

// Corner c sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
Vec3d corner_offset(int c) { return Vec3d(c & 1, (c >> 1) & 1, (c >> 2) & 1); }

struct Edge {
    int a, b, axis;
};

// Edge e = 4 * axis + k joins corner a (bit `axis` clear) to a + (1 << axis).
std::array<Edge, 12> make_edges() {
    std::array<Edge, 12> edges{};
    int e = 0;
    for (int axis = 0; axis < 3; ++axis)
        for (int c = 0; c < 8; ++c)
            if (!(c & (1 << axis))) edges[static_cast<std::size_t>(e++)] = {c, c | (1 << axis), axis};
    return edges;
}

const std::array<Edge, 12>& cube_edges() {
    static const std::array<Edge, 12> e = make_edges();
    return e;
}

int edge_between(int a, int b) {
    for (int e = 0; e < 12; ++e) {
        const Edge& ed = cube_edges()[static_cast<std::size_t>(e)];
        if ((ed.a == a && ed.b == b) || (ed.a == b && ed.b == a)) return e;
    }
    return -1;
}

using CaseTable = std::array<std::vector<std::array<int, 3>>, 256>;

// Triangles per sign configuration. Each face contributes segments joining
// its crossing edges; on a face with two diagonal inside corners each
// inside corner is cut off separately. The rule depends only on the face's
// own signs, so neighbouring cubes agree and the surface is closed. Every
// crossing edge lies on two faces, so the segments form closed loops, each
// fan-triangulated and oriented from inside (negative) to outside.
CaseTable build_table() {
    CaseTable table;
    std::vector<std::array<int, 4>> faces;
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            const int base = side << axis;
            faces.push_back({base, base | (1 << u), base | (1 << u) | (1 << v), base | (1 << v)});
        }
    }
    for (int cs = 1; cs < 255; ++cs) {
        auto inside = [&](int c) { return (cs >> c) & 1; };
        std::array<std::vector<int>, 12> adj;
        for (const auto& f : faces) {
            std::array<int, 4> cross{};
            int nc = 0;
            for (int k = 0; k < 4; ++k)
                if (inside(f[static_cast<std::size_t>(k)]) != inside(f[static_cast<std::size_t>((k + 1) % 4)]))
                    cross[static_cast<std::size_t>(nc++)] = k;
            auto edge_of = [&](int k) {
                return edge_between(f[static_cast<std::size_t>(k)], f[static_cast<std::size_t>((k + 1) % 4)]);
            };
            auto link = [&](int e0, int e1) {
                adj[static_cast<std::size_t>(e0)].push_back(e1);
                adj[static_cast<std::size_t>(e1)].push_back(e0);
            };
            if (nc == 2) {
                link(edge_of(cross[0]), edge_of(cross[1]));
            } else if (nc == 4) {
                // Face edges k join corners k and k+1; cut around inside corners.
                const int first = inside(f[0]) ? 0 : 1;
                for (int c = first; c < 4; c += 2) link(edge_of((c + 3) % 4), edge_of(c));
            }
        }
        std::array<bool, 12> used{};
        for (int start = 0; start < 12; ++start) {
            if (used[static_cast<std::size_t>(start)] || adj[static_cast<std::size_t>(start)].empty()) continue;
            std::vector<int> loop{start};
            used[static_cast<std::size_t>(start)] = true;
            int prev = -1, cur = start;
            while (true) {
                const auto& nb = adj[static_cast<std::size_t>(cur)];
                const int next = nb[0] != prev ? nb[0] : nb[1];
                if (next == start) break;
                loop.push_back(next);
                used[static_cast<std::size_t>(next)] = true;
                prev = cur;
                cur = next;
            }
            Vec3d normal = Vec3d::Zero(), grad = Vec3d::Zero();
            std::vector<Vec3d> mids;
            for (int e : loop) {
                const Edge& ed = cube_edges()[static_cast<std::size_t>(e)];
                mids.push_back(0.5 * (corner_offset(ed.a) + corner_offset(ed.b)));
                grad += inside(ed.a) ? corner_offset(ed.b) - corner_offset(ed.a) : corner_offset(ed.a) - corner_offset(ed.b);
            }
            for (std::size_t k = 0; k < mids.size(); ++k) normal += mids[k].cross(mids[(k + 1) % mids.size()]);
            if (normal.dot(grad) < 0) std::reverse(loop.begin() + 1, loop.end());
            for (std::size_t k = 1; k + 1 < loop.size(); ++k)
                table[static_cast<std::size_t>(cs)].push_back({loop[0], loop[k], loop[k + 1]});
        }
    }
    return table;
}

const CaseTable& case_table() {
    static const CaseTable t = build_table();
    return t;
}

struct EdgeKey {
    int x, y, z, axis;
    bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(static_cast<std::int64_t>(k.x)) * 73856093ULL;
        h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(k.y)) * 19349663ULL;
        h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(k.z)) * 83492791ULL;
        return static_cast<std::size_t>(h * 4 + static_cast<std::uint64_t>(k.axis));
    }
};

}  // namespace

Mesh extract_mesh(const TsdfVolume& volume) {
    const auto& table = case_table();
    const auto& edges = cube_edges();
    Mesh mesh;
    std::unordered_map<EdgeKey, std::uint32_t, EdgeKeyHash> vertex_of;

    // Deterministic traversal: collect weighted voxels and sort them.
    std::vector<VoxelIndex> seeds;
    volume.for_each_voxel([&](const VoxelIndex& v, const Voxel& vox) {
        if (vox.weight > 0) seeds.push_back(v);
    });
    std::sort(seeds.begin(), seeds.end(), [](const VoxelIndex& a, const VoxelIndex& b) {
        if (a.z() != b.z()) return a.z() < b.z();
        if (a.y() != b.y()) return a.y() < b.y();
        return a.x() < b.x();
    });

    for (const VoxelIndex& base : seeds) {
        std::array<const Voxel*, 8> c{};
        bool complete = true;
        int cs = 0;
        for (int k = 0; k < 8 && complete; ++k) {
            c[static_cast<std::size_t>(k)] = volume.find(base + VoxelIndex(k & 1, (k >> 1) & 1, (k >> 2) & 1));
            if (!c[static_cast<std::size_t>(k)] || c[static_cast<std::size_t>(k)]->weight <= 0) complete = false;
            else if (c[static_cast<std::size_t>(k)]->sdf < 0) cs |= 1 << k;
        }
        if (!complete || cs == 0 || cs == 255) continue;
        auto vertex = [&](int e) {
            const Edge& ed = edges[static_cast<std::size_t>(e)];
            const VoxelIndex lo = base + VoxelIndex(ed.a & 1, (ed.a >> 1) & 1, (ed.a >> 2) & 1);
            const EdgeKey key{lo.x(), lo.y(), lo.z(), ed.axis};
            auto it = vertex_of.find(key);
            if (it != vertex_of.end()) return it->second;
            const Voxel& va = *c[static_cast<std::size_t>(ed.a)];
            const Voxel& vb = *c[static_cast<std::size_t>(ed.b)];
            const double t = va.sdf / (static_cast<double>(va.sdf) - vb.sdf);
            const Vec3d pa = volume.voxel_center(lo);
            const Vec3d pb = pa + Vec3d::Unit(ed.axis) * volume.config().voxel_size;
            mesh.vertices.push_back((pa + t * (pb - pa)).cast<float>());
            const auto mix = [&](float x, float y) {
                const double m = x + t * (y - x);
                return static_cast<std::uint8_t>(std::clamp(std::lround(m * 255.0), 0L, 255L));
            };
            mesh.colors.push_back({mix(va.r, vb.r), mix(va.g, vb.g), mix(va.b, vb.b)});
            const auto idx = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
            vertex_of.emplace(key, idx);
            return idx;
        };
        for (const auto& tri : table[static_cast<std::size_t>(cs)])
            mesh.triangles.push_back({vertex(tri[0]), vertex(tri[1]), vertex(tri[2])});
    }
    compute_vertex_normals(mesh);
    return mesh;
}

}  // namespace synact
