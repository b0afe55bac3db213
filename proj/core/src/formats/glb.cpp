#include "synact/formats/glb.hpp"

#include "synact/error.hpp"
#include "synact/formats/png_io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <map>

namespace synact {

using nlohmann::json;

namespace {

constexpr std::uint32_t kMagic = 0x46546C67;  // "glTF"
constexpr std::uint32_t kChunkJson = 0x4E4F534A;
constexpr std::uint32_t kChunkBin = 0x004E4942;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string component_name(int type) {
    switch (type) {
        case 5120: return "BYTE (5120)";
        case 5121: return "UNSIGNED_BYTE (5121)";
        case 5122: return "SHORT (5122)";
        case 5123: return "UNSIGNED_SHORT (5123)";
        case 5125: return "UNSIGNED_INT (5125)";
        case 5126: return "FLOAT (5126)";
        default: return "component type " + std::to_string(type);
    }
}

int component_size(int type) {
    switch (type) {
        case 5120:
        case 5121: return 1;
        case 5122:
        case 5123: return 2;
        case 5125:
        case 5126: return 4;
        default: return 0;
    }
}

int type_arity(const std::string& t) {
    if (t == "SCALAR") return 1;
    if (t == "VEC2") return 2;
    if (t == "VEC3") return 3;
    if (t == "VEC4") return 4;
    if (t == "MAT4") return 16;
    return 0;
}

class Document {
public:
    Document(const json& j, std::span<const std::uint8_t> bin) : j_(j), bin_(bin) {}

    std::span<const std::uint8_t> buffer_view(std::size_t index) const {
        const json& views = j_.at("bufferViews");
        if (index >= views.size()) throw StructuralError("bufferView " + std::to_string(index) + " out of range");
        const json& v = views[index];
        const std::size_t buffer = v.value("buffer", 0);
        if (buffer != 0) throw UnsupportedFeatureError("external buffers are not supported");
        const std::size_t off = v.value("byteOffset", 0);
        const std::size_t len = v.at("byteLength").get<std::size_t>();
        if (off > bin_.size() || len > bin_.size() - off)
            throw StructuralError("bufferView " + std::to_string(index) + " exceeds binary chunk");
        return bin_.subspan(off, len);
    }

    // Reads accessor `index` as doubles, `arity` components per element.
    std::vector<double> accessor(std::size_t index, int expected_arity, bool allow_int) const {
        const json& accs = j_.at("accessors");
        if (index >= accs.size()) throw StructuralError("accessor " + std::to_string(index) + " out of range");
        const json& a = accs[index];
        const int ctype = a.at("componentType").get<int>();
        const int csize = component_size(ctype);
        if (csize == 0 || (!allow_int && ctype != 5126) || (allow_int && ctype != 5121 && ctype != 5123 && ctype != 5125 && ctype != 5126))
            throw UnsupportedFeatureError("unsupported " + component_name(ctype));
        const std::string type = a.at("type").get<std::string>();
        const int arity = type_arity(type);
        if (arity != expected_arity) throw UnsupportedFeatureError("unsupported accessor type " + type);
        if (a.contains("sparse")) throw UnsupportedFeatureError("sparse accessors are not supported");
        const std::size_t count = a.at("count").get<std::size_t>();
        std::vector<double> out(count * arity, 0.0);
        if (!a.contains("bufferView")) return out;
        const auto view = buffer_view(a["bufferView"].get<std::size_t>());
        const std::size_t off = a.value("byteOffset", 0);
        const json& vjson = j_["bufferViews"][a["bufferView"].get<std::size_t>()];
        const std::size_t elem = static_cast<std::size_t>(csize) * arity;
        const std::size_t stride = vjson.value("byteStride", elem);
        if (count > 0) {
            const std::size_t needed = off + stride * (count - 1) + elem;
            if (needed > view.size())
                throw StructuralError("accessor " + std::to_string(index) + " reads past its bufferView");
        }
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint8_t* p = view.data() + off + i * stride;
            for (int k = 0; k < arity; ++k) {
                const std::uint8_t* q = p + k * csize;
                double v = 0;
                switch (ctype) {
                    case 5121: v = q[0]; break;
                    case 5123: v = static_cast<double>(q[0] | (q[1] << 8)); break;
                    case 5125: v = static_cast<double>(read_u32(std::span(q, 4), 0)); break;
                    case 5126: {
                        const std::uint32_t bits = read_u32(std::span(q, 4), 0);
                        float f;
                        std::memcpy(&f, &bits, 4);
                        v = f;
                        break;
                    }
                }
                out[i * arity + k] = v;
            }
        }
        return out;
    }

    const json& root() const { return j_; }

private:
    const json& j_;
    std::span<const std::uint8_t> bin_;
};

Affine node_local(const json& node) {
    Affine t = Affine::Identity();
    if (node.contains("matrix")) {
        const auto& m = node["matrix"];
        if (m.size() != 16) throw StructuralError("node matrix must have 16 entries");
        Mat4d mat;
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) mat(r, c) = m[c * 4 + r].get<double>();  // column-major
        t.matrix() = mat;
        return t;
    }
    Vec3d tr(0, 0, 0), sc(1, 1, 1);
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    if (node.contains("translation")) {
        const auto& v = node["translation"];
        tr = Vec3d(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
    }
    if (node.contains("rotation")) {
        const auto& v = node["rotation"];  // x y z w
        q = Eigen::Quaterniond(v.at(3).get<double>(), v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
        q.normalize();
    }
    if (node.contains("scale")) {
        const auto& v = node["scale"];
        sc = Vec3d(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
    }
    t.translate(tr);
    t.rotate(q);
    t.scale(sc);
    return t;
}

}  // namespace

GlbScene parse_glb(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12) throw FormatError("GLB shorter than its 12-byte header");
    if (read_u32(bytes, 0) != kMagic) throw FormatError("bad GLB magic");
    const std::uint32_t version = read_u32(bytes, 4);
    if (version != 2) throw FormatError("unsupported GLB version " + std::to_string(version));
    const std::uint32_t total = read_u32(bytes, 8);
    if (total > bytes.size()) throw FormatError("GLB declares " + std::to_string(total) + " bytes but has " + std::to_string(bytes.size()));
    bytes = bytes.first(total);

    std::span<const std::uint8_t> json_chunk, bin_chunk;
    std::size_t off = 12;
    bool have_json = false;
    while (off + 8 <= bytes.size()) {
        const std::uint32_t len = read_u32(bytes, off);
        const std::uint32_t type = read_u32(bytes, off + 4);
        off += 8;
        if (len > bytes.size() - off) throw FormatError("GLB chunk exceeds file length");
        const auto data = bytes.subspan(off, len);
        if (!have_json) {
            if (type != kChunkJson) throw FormatError("first GLB chunk must be JSON");
            json_chunk = data;
            have_json = true;
        } else if (type == kChunkBin && bin_chunk.empty()) {
            bin_chunk = data;
        }
        off += len;
        off = (off + 3) & ~std::size_t{3};
    }
    if (!have_json) throw FormatError("GLB has no JSON chunk");

    json j;
    try {
        j = json::parse(json_chunk.begin(), json_chunk.end());
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid GLB JSON: ") + e.what());
    }

    GlbScene scene;
    Document doc(j, bin_chunk);
    try {
        for (const char* key : {"extensionsUsed", "extensionsRequired"}) {
            if (j.contains(key)) {
                for (const auto& e : j[key]) scene.warnings.push_back("ignoring extension " + e.get<std::string>());
            }
        }
        if (j.contains("animations") && !j["animations"].empty()) scene.warnings.push_back("ignoring animations");
        if (j.contains("skins") && !j["skins"].empty()) scene.warnings.push_back("ignoring skins");

        // Images -> textures (PNG only).
        if (j.contains("images")) {
            for (const auto& img : j["images"]) {
                if (!img.contains("bufferView")) {
                    scene.warnings.push_back("ignoring image without bufferView");
                    scene.textures.emplace_back();
                    continue;
                }
                const std::string mime = img.value("mimeType", "image/png");
                if (mime != "image/png") throw UnsupportedFeatureError("unsupported image type " + mime);
                scene.textures.push_back(decode_png(doc.buffer_view(img["bufferView"].get<std::size_t>())));
            }
        }
        auto material_texture = [&](const json& prim) -> std::optional<std::size_t> {
            if (!prim.contains("material") || !j.contains("materials")) return std::nullopt;
            const json& mat = j["materials"].at(prim["material"].get<std::size_t>());
            if (!mat.contains("pbrMetallicRoughness")) return std::nullopt;
            const json& pbr = mat["pbrMetallicRoughness"];
            if (!pbr.contains("baseColorTexture")) return std::nullopt;
            const std::size_t tex = pbr["baseColorTexture"].at("index").get<std::size_t>();
            const json& t = j.at("textures").at(tex);
            if (!t.contains("source")) return std::nullopt;
            const std::size_t src = t["source"].get<std::size_t>();
            if (src >= scene.textures.size()) throw StructuralError("texture source out of range");
            return src;
        };

        // Meshes: each primitive becomes one Mesh.
        std::vector<std::vector<std::size_t>> mesh_prims;
        if (j.contains("meshes")) {
            for (const auto& m : j["meshes"]) {
                std::vector<std::size_t> prims;
                for (const auto& prim : m.at("primitives")) {
                    const int mode = prim.value("mode", 4);
                    if (mode != 4) throw UnsupportedFeatureError("unsupported primitive mode " + std::to_string(mode));
                    const json& attrs = prim.at("attributes");
                    Mesh mesh;
                    const auto pos = doc.accessor(attrs.at("POSITION").get<std::size_t>(), 3, false);
                    for (std::size_t i = 0; i < pos.size(); i += 3)
                        mesh.vertices.emplace_back(static_cast<float>(pos[i]), static_cast<float>(pos[i + 1]), static_cast<float>(pos[i + 2]));
                    if (attrs.contains("NORMAL")) {
                        const auto n = doc.accessor(attrs["NORMAL"].get<std::size_t>(), 3, false);
                        if (n.size() != pos.size()) throw StructuralError("NORMAL count differs from POSITION");
                        for (std::size_t i = 0; i < n.size(); i += 3) {
                            Vec3f v(static_cast<float>(n[i]), static_cast<float>(n[i + 1]), static_cast<float>(n[i + 2]));
                            const float len = v.norm();
                            mesh.normals.push_back(len > 0 ? Vec3f(v / len) : Vec3f(0, 0, 1));
                        }
                    }
                    if (attrs.contains("TEXCOORD_0")) {
                        const auto t = doc.accessor(attrs["TEXCOORD_0"].get<std::size_t>(), 2, false);
                        if (t.size() / 2 != mesh.vertices.size()) throw StructuralError("TEXCOORD_0 count differs from POSITION");
                        for (std::size_t i = 0; i < t.size(); i += 2)
                            mesh.uvs.emplace_back(static_cast<float>(t[i]), static_cast<float>(t[i + 1]));
                    }
                    for (const auto& [name, _] : attrs.items()) {
                        if (name != "POSITION" && name != "NORMAL" && name != "TEXCOORD_0")
                            scene.warnings.push_back("ignoring attribute " + name);
                    }
                    std::vector<std::uint32_t> idx;
                    if (prim.contains("indices")) {
                        const auto raw = doc.accessor(prim["indices"].get<std::size_t>(), 1, true);
                        idx.reserve(raw.size());
                        for (double d : raw) idx.push_back(static_cast<std::uint32_t>(d));
                    } else {
                        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) idx.push_back(static_cast<std::uint32_t>(i));
                    }
                    if (idx.size() % 3 != 0) throw StructuralError("index count is not a multiple of 3");
                    for (std::size_t i = 0; i < idx.size(); i += 3) {
                        Triangle t{idx[i], idx[i + 1], idx[i + 2]};
                        for (auto v : t)
                            if (v >= mesh.vertices.size()) throw StructuralError("index " + std::to_string(v) + " out of range");
                        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
                        mesh.triangles.push_back(t);
                    }
                    if (mesh.normals.empty()) compute_vertex_normals(mesh);
                    mesh.texture_id = material_texture(prim);
                    prims.push_back(scene.meshes.size());
                    scene.meshes.push_back(std::move(mesh));
                }
                mesh_prims.push_back(std::move(prims));
            }
        }

        // Flatten the node hierarchy.
        if (j.contains("nodes")) {
            const json& nodes = j["nodes"];
            std::vector<std::size_t> roots;
            if (j.contains("scenes") && !j["scenes"].empty()) {
                const std::size_t s = j.value("scene", 0);
                for (const auto& n : j["scenes"].at(s).value("nodes", json::array())) roots.push_back(n.get<std::size_t>());
            } else {
                std::vector<bool> is_child(nodes.size(), false);
                for (const auto& n : nodes)
                    for (const auto& c : n.value("children", json::array())) is_child.at(c.get<std::size_t>()) = true;
                for (std::size_t i = 0; i < nodes.size(); ++i)
                    if (!is_child[i]) roots.push_back(i);
            }
            std::vector<int> visiting(nodes.size(), 0);
            std::function<void(std::size_t, const Affine&)> visit = [&](std::size_t n, const Affine& parent) {
                if (n >= nodes.size()) throw StructuralError("node " + std::to_string(n) + " out of range");
                if (visiting[n]) throw StructuralError("node hierarchy contains a cycle");
                visiting[n] = 1;
                const json& node = nodes[n];
                const Affine world = parent * node_local(node);
                if (node.contains("mesh")) {
                    const std::size_t m = node["mesh"].get<std::size_t>();
                    if (m >= mesh_prims.size()) throw StructuralError("mesh " + std::to_string(m) + " out of range");
                    for (std::size_t p : mesh_prims[m]) scene.instances.push_back({p, world});
                }
                for (const auto& c : node.value("children", json::array())) visit(c.get<std::size_t>(), world);
                visiting[n] = 0;
            };
            for (std::size_t r : roots) visit(r, Affine::Identity());
        } else {
            for (std::size_t i = 0; i < scene.meshes.size(); ++i) scene.instances.push_back({i, Affine::Identity()});
        }
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed glTF JSON: ") + e.what());
    }
    return scene;
}

std::vector<std::uint8_t> write_glb(const std::vector<Mesh>& meshes, const std::vector<Texture>& textures) {
    std::vector<std::uint8_t> bin;
    json j;
    j["asset"] = {{"version", "2.0"}, {"generator", "synact"}};
    j["buffers"] = json::array();
    j["bufferViews"] = json::array();
    j["accessors"] = json::array();
    j["meshes"] = json::array();
    j["nodes"] = json::array();
    json scene_nodes = json::array();

    auto add_view = [&](const void* data, std::size_t len, std::optional<int> target) {
        while (bin.size() % 4) bin.push_back(0);
        const std::size_t off = bin.size();
        const auto* p = static_cast<const std::uint8_t*>(data);
        bin.insert(bin.end(), p, p + len);
        json v = {{"buffer", 0}, {"byteOffset", off}, {"byteLength", len}};
        if (target) v["target"] = *target;
        j["bufferViews"].push_back(v);
        return j["bufferViews"].size() - 1;
    };
    auto add_accessor = [&](std::size_t view, int ctype, std::size_t count, const char* type) {
        j["accessors"].push_back({{"bufferView", view}, {"componentType", ctype}, {"count", count}, {"type", type}});
        return j["accessors"].size() - 1;
    };

    if (!textures.empty()) {
        j["images"] = json::array();
        j["textures"] = json::array();
        j["materials"] = json::array();
        for (std::size_t t = 0; t < textures.size(); ++t) {
            const auto png = encode_png(textures[t]);
            const auto view = add_view(png.data(), png.size(), std::nullopt);
            j["images"].push_back({{"bufferView", view}, {"mimeType", "image/png"}});
            j["textures"].push_back({{"source", t}});
            j["materials"].push_back({{"pbrMetallicRoughness", {{"baseColorTexture", {{"index", t}}}}}});
        }
    }

    for (std::size_t m = 0; m < meshes.size(); ++m) {
        const Mesh& mesh = meshes[m];
        json attrs;
        const auto pv = add_view(mesh.vertices.data(), mesh.vertices.size() * sizeof(Vec3f), 34962);
        const auto pa = add_accessor(pv, 5126, mesh.vertices.size(), "VEC3");
        Aabb box = bounds(mesh);
        if (box.valid()) {
            j["accessors"][pa]["min"] = {box.min.x(), box.min.y(), box.min.z()};
            j["accessors"][pa]["max"] = {box.max.x(), box.max.y(), box.max.z()};
        }
        attrs["POSITION"] = pa;
        if (!mesh.normals.empty()) {
            const auto nv = add_view(mesh.normals.data(), mesh.normals.size() * sizeof(Vec3f), 34962);
            attrs["NORMAL"] = add_accessor(nv, 5126, mesh.normals.size(), "VEC3");
        }
        if (!mesh.uvs.empty()) {
            const auto tv = add_view(mesh.uvs.data(), mesh.uvs.size() * sizeof(Vec2f), 34962);
            attrs["TEXCOORD_0"] = add_accessor(tv, 5126, mesh.uvs.size(), "VEC2");
        }
        std::vector<std::uint32_t> idx;
        for (const auto& t : mesh.triangles) idx.insert(idx.end(), t.begin(), t.end());
        json prim = {{"attributes", attrs}, {"mode", 4}};
        if (!idx.empty()) {
            const auto iv = add_view(idx.data(), idx.size() * 4, 34963);
            prim["indices"] = add_accessor(iv, 5125, idx.size(), "SCALAR");
        }
        if (mesh.texture_id && *mesh.texture_id < textures.size()) prim["material"] = *mesh.texture_id;
        j["meshes"].push_back({{"primitives", json::array({prim})}});
        j["nodes"].push_back({{"mesh", m}});
        scene_nodes.push_back(m);
    }
    while (bin.size() % 4) bin.push_back(0);
    j["buffers"].push_back({{"byteLength", bin.size()}});
    j["scenes"] = json::array({{{"nodes", scene_nodes}}});
    j["scene"] = 0;

    std::string text = j.dump();
    while (text.size() % 4) text.push_back(' ');
    std::vector<std::uint8_t> out;
    put_u32(out, kMagic);
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(12 + 8 + text.size() + 8 + bin.size()));
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    put_u32(out, kChunkJson);
    out.insert(out.end(), text.begin(), text.end());
    put_u32(out, static_cast<std::uint32_t>(bin.size()));
    put_u32(out, kChunkBin);
    out.insert(out.end(), bin.begin(), bin.end());
    return out;
}

}  // namespace synact
