#include "synact/formats/obj.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <vector>

namespace synact {

namespace {

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 0;

    bool next(std::string_view& out) {
        if (pos >= text.size()) return false;
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        out = text.substr(pos, end - pos);
        if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
        pos = end + 1;
        ++line;
        return true;
    }
};

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double to_double(std::string_view tok, std::size_t line) {
    double v = 0;
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("invalid number '" + std::string(tok) + "'", line);
    }
    return v;
}

long to_long(std::string_view tok, std::size_t line) {
    long v = 0;
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("invalid index '" + std::string(tok) + "'", line);
    }
    return v;
}

// Resolves a 1-based or negative OBJ index against `count` entries.
long resolve(long idx, std::size_t count, std::size_t line, const char* what) {
    long r;
    if (idx > 0) r = idx - 1;
    else if (idx < 0) r = static_cast<long>(count) + idx;
    else throw ParseError(std::string("zero ") + what + " index", line);
    if (r < 0 || r >= static_cast<long>(count)) {
        throw StructuralError("line " + std::to_string(line) + ": " + what + " index " +
                              std::to_string(idx) + " out of range");
    }
    return r;
}

struct Corner {
    long v = -1, vt = -1, vn = -1;
    auto operator<=>(const Corner&) const = default;
};

float wrap_unit(float x) {
    if (x >= 0.0f && x <= 1.0f) return x;
    return x - std::floor(x);
}

}  // namespace

Mesh parse_obj(std::string_view text) {
    std::vector<Vec3f> positions;
    std::vector<Rgb8> vcolors;
    std::vector<Vec2f> texcoords;
    std::vector<Vec3f> normals;
    std::vector<std::vector<Corner>> faces;
    bool any_color = false;

    LineCursor cur{text};
    std::string_view raw;
    while (cur.next(raw)) {
        const std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto tok = split_ws(raw);
        if (tok.empty()) continue;
        const std::string_view kind = tok[0];
        if (kind == "v") {
            if (tok.size() != 4 && tok.size() != 5 && tok.size() != 7)
                throw ParseError("vertex record needs 3 coordinates", cur.line);
            positions.emplace_back(static_cast<float>(to_double(tok[1], cur.line)),
                                   static_cast<float>(to_double(tok[2], cur.line)),
                                   static_cast<float>(to_double(tok[3], cur.line)));
            if (tok.size() == 7) {
                any_color = true;
                Rgb8 c;
                for (int k = 0; k < 3; ++k) {
                    const double f = to_double(tok[4 + k], cur.line);
                    c[k] = static_cast<std::uint8_t>(std::lround(std::clamp(f, 0.0, 1.0) * 255.0));
                }
                vcolors.push_back(c);
            } else {
                vcolors.push_back({255, 255, 255});
            }
        } else if (kind == "vt") {
            if (tok.size() < 3 || tok.size() > 4) throw ParseError("texture record needs 2 coordinates", cur.line);
            texcoords.emplace_back(static_cast<float>(to_double(tok[1], cur.line)),
                                   static_cast<float>(to_double(tok[2], cur.line)));
        } else if (kind == "vn") {
            if (tok.size() != 4) throw ParseError("normal record needs 3 components", cur.line);
            normals.emplace_back(static_cast<float>(to_double(tok[1], cur.line)),
                                 static_cast<float>(to_double(tok[2], cur.line)),
                                 static_cast<float>(to_double(tok[3], cur.line)));
        } else if (kind == "f") {
            if (tok.size() < 4) throw ParseError("face needs at least 3 corners", cur.line);
            std::vector<Corner> face;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                const std::string_view c = tok[k];
                Corner corner;
                const std::size_t s1 = c.find('/');
                corner.v = resolve(to_long(c.substr(0, s1), cur.line), positions.size(), cur.line, "vertex");
                if (s1 != std::string_view::npos) {
                    const std::size_t s2 = c.find('/', s1 + 1);
                    const std::string_view vt = c.substr(s1 + 1, s2 == std::string_view::npos ? std::string_view::npos : s2 - s1 - 1);
                    if (!vt.empty()) corner.vt = resolve(to_long(vt, cur.line), texcoords.size(), cur.line, "texture");
                    if (s2 != std::string_view::npos) {
                        const std::string_view vn = c.substr(s2 + 1);
                        if (vn.empty()) throw ParseError("empty normal index", cur.line);
                        corner.vn = resolve(to_long(vn, cur.line), normals.size(), cur.line, "normal");
                    }
                }
                face.push_back(corner);
            }
            faces.push_back(std::move(face));
        }
        // o, g, s, usemtl, mtllib, l, ...: ignored.
    }

    bool indexed_attrs = false;
    bool all_have_vt = !faces.empty();
    bool all_have_vn = !faces.empty();
    for (const auto& f : faces) {
        for (const auto& c : f) {
            if (c.vt >= 0 || c.vn >= 0) indexed_attrs = true;
            if (c.vt < 0) all_have_vt = false;
            if (c.vn < 0) all_have_vn = false;
        }
    }

    Mesh mesh;
    std::vector<std::uint32_t> corner_index;  // flattened per face corner
    if (!indexed_attrs) {
        mesh.vertices = positions;
        if (any_color) mesh.colors = vcolors;
        for (const auto& f : faces)
            for (const auto& c : f) corner_index.push_back(static_cast<std::uint32_t>(c.v));
    } else {
        std::map<Corner, std::uint32_t> lookup;
        for (const auto& f : faces) {
            for (const auto& c : f) {
                Corner key = c;
                if (!all_have_vt) key.vt = -1;
                if (!all_have_vn) key.vn = -1;
                auto [it, inserted] = lookup.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
                if (inserted) {
                    mesh.vertices.push_back(positions[key.v]);
                    if (any_color) mesh.colors.push_back(vcolors[key.v]);
                    if (all_have_vt) {
                        const Vec2f& t = texcoords[key.vt];
                        mesh.uvs.emplace_back(wrap_unit(t.x()), wrap_unit(t.y()));
                    }
                    if (all_have_vn) {
                        const Vec3f& n = normals[key.vn];
                        const float len = n.norm();
                        mesh.normals.push_back(len > 0 ? Vec3f(n / len) : Vec3f(0, 0, 1));
                    }
                }
                corner_index.push_back(it->second);
            }
        }
    }

    std::size_t k = 0;
    for (const auto& f : faces) {
        const std::uint32_t* idx = &corner_index[k];
        for (std::size_t i = 1; i + 1 < f.size(); ++i) {
            Triangle t{idx[0], idx[i], idx[i + 1]};
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
            mesh.triangles.push_back(t);
        }
        k += f.size();
    }
    if (mesh.normals.empty()) compute_vertex_normals(mesh);
    return mesh;
}

std::optional<std::string> obj_material_library(std::string_view text) {
    LineCursor cur{text};
    std::string_view raw;
    while (cur.next(raw)) {
        const auto tok = split_ws(raw);
        if (tok.size() >= 2 && tok[0] == "mtllib") return std::string(tok[1]);
    }
    return std::nullopt;
}

std::optional<std::string> mtl_diffuse_map(std::string_view text) {
    LineCursor cur{text};
    std::string_view raw;
    while (cur.next(raw)) {
        const auto tok = split_ws(raw);
        // Options such as "-s 1 1 1" may precede the path; it is the last token.
        if (tok.size() >= 2 && tok[0] == "map_Kd") return std::string(tok.back());
    }
    return std::nullopt;
}

std::string write_obj(const Mesh& mesh) {
    std::string out;
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out += buf;
    }
    for (const auto& t : mesh.uvs) {
        std::snprintf(buf, sizeof buf, "vt %.9g %.9g\n", t.x(), t.y());
        out += buf;
    }
    for (const auto& n : mesh.normals) {
        std::snprintf(buf, sizeof buf, "vn %.9g %.9g %.9g\n", n.x(), n.y(), n.z());
        out += buf;
    }
    const bool uv = !mesh.uvs.empty(), nrm = !mesh.normals.empty();
    for (const auto& tri : mesh.triangles) {
        out += 'f';
        for (auto i : tri) {
            const unsigned k = i + 1;
            if (uv && nrm) std::snprintf(buf, sizeof buf, " %u/%u/%u", k, k, k);
            else if (uv) std::snprintf(buf, sizeof buf, " %u/%u", k, k);
            else if (nrm) std::snprintf(buf, sizeof buf, " %u//%u", k, k);
            else std::snprintf(buf, sizeof buf, " %u", k);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace synact
