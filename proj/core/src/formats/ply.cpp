#include "synact/formats/ply.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>

namespace synact {

namespace {

enum class Scalar { I8, U8, I16, U16, I32, U32, F32, F64 };

std::optional<Scalar> scalar_from(std::string_view t) {
    if (t == "char" || t == "int8") return Scalar::I8;
    if (t == "uchar" || t == "uint8") return Scalar::U8;
    if (t == "short" || t == "int16") return Scalar::I16;
    if (t == "ushort" || t == "uint16") return Scalar::U16;
    if (t == "int" || t == "int32") return Scalar::I32;
    if (t == "uint" || t == "uint32") return Scalar::U32;
    if (t == "float" || t == "float32") return Scalar::F32;
    if (t == "double" || t == "float64") return Scalar::F64;
    return std::nullopt;
}

int scalar_size(Scalar s) {
    switch (s) {
        case Scalar::I8:
        case Scalar::U8: return 1;
        case Scalar::I16:
        case Scalar::U16: return 2;
        case Scalar::I32:
        case Scalar::U32:
        case Scalar::F32: return 4;
        case Scalar::F64: return 8;
    }
    return 0;
}

struct Property {
    std::string name;
    Scalar type = Scalar::F32;
    bool is_list = false;
    Scalar count_type = Scalar::U8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> props;
};

enum class Format { Ascii, BinaryLE, BinaryBE };

// Sequential reader over the body in either encoding.
class BodyReader {
public:
    BodyReader(std::span<const std::uint8_t> body, Format fmt) : body_(body), fmt_(fmt) {}

    double read(Scalar s) {
        if (fmt_ == Format::Ascii) return read_ascii();
        const int n = scalar_size(s);
        if (pos_ + n > body_.size()) throw StructuralError("PLY body shorter than declared element counts");
        std::uint8_t b[8];
        std::memcpy(b, body_.data() + pos_, n);
        pos_ += n;
        const bool swap = (fmt_ == Format::BinaryBE) == (std::endian::native == std::endian::little);
        if (swap) std::reverse(b, b + n);
        switch (s) {
            case Scalar::I8: return static_cast<std::int8_t>(b[0]);
            case Scalar::U8: return b[0];
            case Scalar::I16: { std::int16_t v; std::memcpy(&v, b, 2); return v; }
            case Scalar::U16: { std::uint16_t v; std::memcpy(&v, b, 2); return v; }
            case Scalar::I32: { std::int32_t v; std::memcpy(&v, b, 4); return v; }
            case Scalar::U32: { std::uint32_t v; std::memcpy(&v, b, 4); return v; }
            case Scalar::F32: { float v; std::memcpy(&v, b, 4); return v; }
            case Scalar::F64: { double v; std::memcpy(&v, b, 8); return v; }
        }
        return 0;
    }

    // Reads a float32 property without widening, to keep bit patterns.
    float read_f32(Scalar s) {
        if (s == Scalar::F32 && fmt_ != Format::Ascii) {
            if (pos_ + 4 > body_.size()) throw StructuralError("PLY body shorter than declared element counts");
            std::uint8_t b[4];
            std::memcpy(b, body_.data() + pos_, 4);
            pos_ += 4;
            if ((fmt_ == Format::BinaryBE) == (std::endian::native == std::endian::little)) std::reverse(b, b + 4);
            float v;
            std::memcpy(&v, b, 4);
            return v;
        }
        return static_cast<float>(read(s));
    }

    void skip_ascii_line_end() {}

    bool at_end_ascii() {
        while (pos_ < body_.size() && std::isspace(body_[pos_])) ++pos_;
        return pos_ >= body_.size();
    }

private:
    double read_ascii() {
        while (pos_ < body_.size() && std::isspace(body_[pos_])) ++pos_;
        if (pos_ >= body_.size()) throw StructuralError("PLY body shorter than declared element counts");
        std::size_t end = pos_;
        while (end < body_.size() && !std::isspace(body_[end])) ++end;
        const char* first = reinterpret_cast<const char*>(body_.data() + pos_);
        const char* last = reinterpret_cast<const char*>(body_.data() + end);
        double v = 0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw StructuralError("invalid number in PLY body");
        pos_ = end;
        return v;
    }

    std::span<const std::uint8_t> body_;
    Format fmt_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> write_ply(const Mesh& mesh, PlyEncoding encoding) {
    mesh.validate();
    const bool normals = !mesh.normals.empty();
    const bool uvs = !mesh.uvs.empty();
    const bool colors = !mesh.colors.empty();
    std::ostringstream h;
    h << "ply\nformat " << (encoding == PlyEncoding::Ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
    h << "comment synact\n";
    h << "element vertex " << mesh.vertices.size() << "\n";
    h << "property float x\nproperty float y\nproperty float z\n";
    if (normals) h << "property float nx\nproperty float ny\nproperty float nz\n";
    if (uvs) h << "property float s\nproperty float t\n";
    if (colors) h << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    h << "element face " << mesh.triangles.size() << "\n";
    h << "property list uchar int vertex_indices\n";
    h << "end_header\n";
    const std::string header = h.str();
    std::vector<std::uint8_t> out(header.begin(), header.end());

    if (encoding == PlyEncoding::Ascii) {
        std::string body;
        char buf[64];
        auto put_float = [&](float f) {
            // Shortest round-trip representation.
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, f);
            body.append(buf, ptr);
        };
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const auto& v = mesh.vertices[i];
            put_float(v.x()); body += ' '; put_float(v.y()); body += ' '; put_float(v.z());
            if (normals) {
                const auto& n = mesh.normals[i];
                body += ' '; put_float(n.x()); body += ' '; put_float(n.y()); body += ' '; put_float(n.z());
            }
            if (uvs) {
                body += ' '; put_float(mesh.uvs[i].x()); body += ' '; put_float(mesh.uvs[i].y());
            }
            if (colors) {
                for (int c = 0; c < 3; ++c) body += ' ' + std::to_string(mesh.colors[i][c]);
            }
            body += '\n';
        }
        for (const auto& t : mesh.triangles) {
            body += "3 " + std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
        }
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }

    auto put = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        if constexpr (std::endian::native == std::endian::little) {
            out.insert(out.end(), b, b + n);
        } else {
            for (std::size_t k = n; k-- > 0;) out.push_back(b[k]);
        }
    };
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        for (int k = 0; k < 3; ++k) put(&mesh.vertices[i][k], 4);
        if (normals) for (int k = 0; k < 3; ++k) put(&mesh.normals[i][k], 4);
        if (uvs) for (int k = 0; k < 2; ++k) put(&mesh.uvs[i][k], 4);
        if (colors) out.insert(out.end(), mesh.colors[i].begin(), mesh.colors[i].end());
    }
    for (const auto& t : mesh.triangles) {
        out.push_back(3);
        for (auto idx : t) {
            const std::int32_t v = static_cast<std::int32_t>(idx);
            put(&v, 4);
        }
    }
    return out;
}

Mesh parse_ply(std::span<const std::uint8_t> bytes) {
    // Header.
    std::size_t pos = 0, line_no = 0;
    auto next_line = [&]() -> std::optional<std::string> {
        if (pos >= bytes.size()) return std::nullopt;
        std::size_t end = pos;
        while (end < bytes.size() && bytes[end] != '\n') ++end;
        std::string line(reinterpret_cast<const char*>(bytes.data() + pos), end - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = std::min(end + 1, bytes.size());
        ++line_no;
        return line;
    };
    auto first = next_line();
    if (!first || *first != "ply") throw ParseError("missing 'ply' magic", 1);
    std::optional<Format> fmt;
    std::vector<Element> elements;
    bool header_done = false;
    while (auto line = next_line()) {
        std::istringstream ls(*line);
        std::string kw;
        ls >> kw;
        if (kw.empty() || kw == "comment" || kw == "obj_info") continue;
        if (kw == "format") {
            std::string f, ver;
            ls >> f >> ver;
            if (f == "ascii") fmt = Format::Ascii;
            else if (f == "binary_little_endian") fmt = Format::BinaryLE;
            else if (f == "binary_big_endian") fmt = Format::BinaryBE;
            else throw ParseError("unknown PLY format '" + f + "'", line_no);
        } else if (kw == "element") {
            Element e;
            long long count = -1;
            ls >> e.name >> count;
            if (e.name.empty() || count < 0) throw ParseError("malformed element line", line_no);
            e.count = static_cast<std::size_t>(count);
            elements.push_back(std::move(e));
        } else if (kw == "property") {
            if (elements.empty()) throw ParseError("property before any element", line_no);
            std::string t;
            ls >> t;
            Property p;
            if (t == "list") {
                std::string ct, it;
                ls >> ct >> it >> p.name;
                auto c = scalar_from(ct), i = scalar_from(it);
                if (!c || !i) throw ParseError("unknown list property type", line_no);
                p.is_list = true;
                p.count_type = *c;
                p.type = *i;
            } else {
                auto s = scalar_from(t);
                if (!s) throw ParseError("unknown property type '" + t + "'", line_no);
                p.type = *s;
                ls >> p.name;
            }
            if (p.name.empty()) throw ParseError("property without a name", line_no);
            elements.back().props.push_back(p);
        } else if (kw == "end_header") {
            header_done = true;
            break;
        } else {
            throw ParseError("unexpected header keyword '" + kw + "'", line_no);
        }
    }
    if (!header_done) throw ParseError("missing end_header", line_no);
    if (!fmt) throw ParseError("missing format line", line_no);
    auto vertex_el = std::find_if(elements.begin(), elements.end(), [](const Element& e) { return e.name == "vertex"; });
    if (vertex_el == elements.end()) throw ParseError("PLY has no vertex element", line_no);

    BodyReader body(bytes.subspan(pos), *fmt);
    Mesh mesh;
    for (const Element& el : elements) {
        if (el.name == "vertex") {
            auto find = [&](std::string_view n) -> int {
                for (std::size_t i = 0; i < el.props.size(); ++i)
                    if (el.props[i].name == n) return static_cast<int>(i);
                return -1;
            };
            const int ix = find("x"), iy = find("y"), iz = find("z");
            if (ix < 0 || iy < 0 || iz < 0) throw ParseError("vertex element lacks x/y/z", line_no);
            const int inx = find("nx"), iny = find("ny"), inz = find("nz");
            int is = find("s"), it = find("t");
            if (is < 0) { is = find("u"); it = find("v"); }
            if (is < 0) { is = find("texture_u"); it = find("texture_v"); }
            const int ir = find("red"), ig = find("green"), ib = find("blue");
            const bool has_n = inx >= 0 && iny >= 0 && inz >= 0;
            const bool has_uv = is >= 0 && it >= 0;
            const bool has_c = ir >= 0 && ig >= 0 && ib >= 0;
            mesh.vertices.reserve(std::min<std::size_t>(el.count, bytes.size()));
            std::vector<float> vals(el.props.size());
            for (std::size_t v = 0; v < el.count; ++v) {
                for (std::size_t p = 0; p < el.props.size(); ++p) {
                    const Property& prop = el.props[p];
                    if (prop.is_list) {
                        const auto n = static_cast<std::size_t>(body.read(prop.count_type));
                        for (std::size_t k = 0; k < n; ++k) body.read(prop.type);
                        vals[p] = 0;
                    } else {
                        vals[p] = body.read_f32(prop.type);
                    }
                }
                mesh.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
                if (has_n) mesh.normals.emplace_back(vals[inx], vals[iny], vals[inz]);
                if (has_uv) mesh.uvs.emplace_back(vals[is], vals[it]);
                if (has_c) {
                    auto to8 = [&](int i) {
                        const Scalar t = el.props[i].type;
                        const float x = vals[i];
                        const float scaled = (t == Scalar::F32 || t == Scalar::F64) ? x * 255.0f : x;
                        return static_cast<std::uint8_t>(std::clamp(std::lround(scaled), 0L, 255L));
                    };
                    mesh.colors.push_back({to8(ir), to8(ig), to8(ib)});
                }
            }
        } else if (el.name == "face") {
            int li = -1;
            for (std::size_t i = 0; i < el.props.size(); ++i) {
                if (el.props[i].is_list && (el.props[i].name == "vertex_indices" || el.props[i].name == "vertex_index")) li = static_cast<int>(i);
            }
            if (li < 0) throw ParseError("face element lacks vertex_indices", line_no);
            std::vector<std::uint32_t> poly;
            for (std::size_t f = 0; f < el.count; ++f) {
                for (std::size_t p = 0; p < el.props.size(); ++p) {
                    const Property& prop = el.props[p];
                    if (!prop.is_list) {
                        body.read(prop.type);
                        continue;
                    }
                    const double nraw = body.read(prop.count_type);
                    if (nraw < 0) throw StructuralError("negative list length");
                    const auto n = static_cast<std::size_t>(nraw);
                    poly.clear();
                    for (std::size_t k = 0; k < n; ++k) {
                        const double idx = body.read(prop.type);
                        if (static_cast<int>(p) == li) {
                            if (idx < 0 || idx >= static_cast<double>(mesh.vertices.size()))
                                throw StructuralError("face index " + std::to_string(static_cast<long long>(idx)) + " out of range");
                            poly.push_back(static_cast<std::uint32_t>(idx));
                        }
                    }
                    if (static_cast<int>(p) == li) {
                        for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                            Triangle t{poly[0], poly[k], poly[k + 1]};
                            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
                            mesh.triangles.push_back(t);
                        }
                    }
                }
            }
        } else {
            for (std::size_t r = 0; r < el.count; ++r) {
                for (const Property& prop : el.props) {
                    if (prop.is_list) {
                        const auto n = static_cast<std::size_t>(body.read(prop.count_type));
                        for (std::size_t k = 0; k < n; ++k) body.read(prop.type);
                    } else {
                        body.read(prop.type);
                    }
                }
            }
        }
    }
    if (*fmt == Format::Ascii && !body.at_end_ascii())
        throw StructuralError("PLY body has more data than declared element counts");

    if (!mesh.normals.empty()) {
        for (auto& n : mesh.normals) {
            const float len = n.norm();
            if (len > 0 && std::abs(len - 1.0f) > 1e-6f) n /= len;
            else if (len == 0) n = Vec3f(0, 0, 1);
        }
    }
    return mesh;
}

}  // namespace synact
