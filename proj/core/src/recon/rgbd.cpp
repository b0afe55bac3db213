#include "synact/recon/rgbd.hpp"

#include "synact/error.hpp"
#include "synact/formats/png_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace synact {

std::size_t RGBDFrame::valid_depth_count() const {
    std::size_t n = 0;
    for (auto d : depth) n += d != 0;
    return n;
}

void RGBDFrame::validate() const {
    const std::size_t n = static_cast<std::size_t>(intensity.width) * intensity.height;
    if (intensity.width <= 0 || intensity.height <= 0 || intensity.data.size() != n)
        throw StructuralError("RGBD frame intensity buffer does not match its size");
    if (depth.size() != n) throw StructuralError("RGBD frame depth and intensity sizes differ");
    if (!color.pixels.empty() && (color.width != intensity.width || color.height != intensity.height))
        throw StructuralError("RGBD frame colour and intensity sizes differ");
    if (!(intrinsics.fx > 0 && intrinsics.fy > 0 && intrinsics.cx > 0 && intrinsics.cy > 0))
        throw ValidationError("RGBD frame intrinsics must be positive");
    if (intrinsics.width != intensity.width || intrinsics.height != intensity.height)
        throw StructuralError("RGBD frame intrinsics size does not match the image");
}

std::vector<RGBDFrame> frames_from_depth_sequence(const DepthSequence& sequence) {
    std::vector<RGBDFrame> frames;
    frames.reserve(sequence.depth_mm.size());
    for (std::size_t i = 0; i < sequence.depth_mm.size(); ++i) {
        RGBDFrame f;
        const Texture& c = sequence.color[i];
        f.intensity = to_gray(c.pixels, c.width, c.height);
        f.depth = sequence.depth_mm[i];
        f.color = c;
        f.intrinsics = sequence.intrinsics;
        f.index = i;
        f.validate();
        frames.push_back(std::move(f));
    }
    return frames;
}

namespace {

std::string frame_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", i);
    return buf;
}

}  // namespace

std::vector<RGBDFrame> load_rgbd_directory(const std::filesystem::path& dir, bool tum_depth_scale) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("RGB-D directory not found: " + dir.string());
    Intrinsics intr;
    try {
        const auto j = nlohmann::json::parse(read_file_text(dir / "intrinsics.json"));
        intr.width = j.at("width").get<int>();
        intr.height = j.at("height").get<int>();
        intr.fx = j.at("fx").get<double>();
        intr.fy = j.at("fy").get<double>();
        intr.cx = j.at("cx").get<double>();
        intr.cy = j.at("cy").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("intrinsics.json: " + std::string(e.what()));
    }

    std::vector<fs::path> colors;
    if (fs::is_directory(dir / "color"))
        for (const auto& e : fs::directory_iterator(dir / "color"))
            if (e.path().extension() == ".png") colors.push_back(e.path());
    std::sort(colors.begin(), colors.end());

    std::vector<RGBDFrame> frames;
    for (std::size_t i = 0; i < colors.size(); ++i) {
        RGBDFrame f;
        f.color = read_png(colors[i]);
        f.intensity = to_gray(f.color.pixels, f.color.width, f.color.height);
        f.intrinsics = intr;
        f.index = i;
        const std::string stem = colors[i].stem().string();
        const fs::path png = dir / "depth" / (stem + ".png");
        const fs::path raw = dir / "depth" / (stem + ".raw");
        if (fs::exists(png)) {
            int w = 0, h = 0;
            f.depth = decode_png_gray16(read_file_bytes(png), w, h);
            if (w != f.color.width || h != f.color.height)
                throw StructuralError("depth " + png.string() + " does not match colour size");
        } else if (fs::exists(raw)) {
            const auto bytes = read_file_bytes(raw);
            const std::size_t n = static_cast<std::size_t>(f.color.width) * f.color.height;
            if (bytes.size() != n * 2) throw StructuralError("raw depth " + raw.string() + " has the wrong size");
            f.depth.resize(n);
            for (std::size_t k = 0; k < n; ++k)
                f.depth[k] = static_cast<std::uint16_t>(bytes[2 * k] | (bytes[2 * k + 1] << 8));
        } else {
            throw IoError("missing depth image for frame " + stem);
        }
        if (tum_depth_scale)
            for (auto& d : f.depth) d = static_cast<std::uint16_t>(std::lround(d / 5.0));
        f.validate();
        frames.push_back(std::move(f));
    }
    return frames;
}

void save_rgbd_directory(const std::filesystem::path& dir, const DepthSequence& sequence) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "color");
    fs::create_directories(dir / "depth");
    const Intrinsics& k = sequence.intrinsics;
    nlohmann::json j{{"width", k.width}, {"height", k.height}, {"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
    write_file_text(dir / "intrinsics.json", j.dump(2) + "\n");
    for (std::size_t i = 0; i < sequence.depth_mm.size(); ++i) {
        write_png(dir / "color" / (frame_name(i) + ".png"), sequence.color[i]);
        write_file_bytes(dir / "depth" / (frame_name(i) + ".png"),
                         encode_png_gray16(k.width, k.height, sequence.depth_mm[i]));
    }
}

namespace {

void estimate_normals(VertexMap& m) {
    m.normals.assign(m.points.size(), Vec3f::Zero());
    auto near = [](const Vec3f& a, const Vec3f& b) {
        return b.z() > 0 && std::abs(a.z() - b.z()) < 0.05f + 0.03f * a.z();
    };
    for (int y = 1; y + 1 < m.height; ++y) {
        for (int x = 1; x + 1 < m.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * m.width + x;
            const Vec3f& p = m.points[i];
            if (p.z() <= 0) continue;
            const Vec3f& l = m.points[i - 1];
            const Vec3f& r = m.points[i + 1];
            const Vec3f& u = m.points[i - m.width];
            const Vec3f& d = m.points[i + m.width];
            if (!near(p, l) || !near(p, r) || !near(p, u) || !near(p, d)) continue;
            Vec3f n = (r - l).cross(d - u);
            const float len = n.norm();
            if (len <= 0) continue;
            n /= len;
            if (n.dot(p) > 0) n = -n;
            m.normals[i] = n;
        }
    }
}

}  // namespace

VertexMap make_vertex_map(const RGBDFrame& frame, double max_depth_m) {
    VertexMap m;
    m.width = frame.width();
    m.height = frame.height();
    m.intrinsics = frame.intrinsics;
    m.points.assign(frame.depth.size(), Vec3f::Zero());
    const Intrinsics& k = frame.intrinsics;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * m.width + x;
            const double z = frame.depth[i] * 1e-3;
            if (z <= 0 || z > max_depth_m) continue;
            m.points[i] = Vec3f(static_cast<float>((x - k.cx) * z / k.fx), static_cast<float>((y - k.cy) * z / k.fy),
                                static_cast<float>(z));
        }
    }
    estimate_normals(m);
    return m;
}

VertexMap downsample(const VertexMap& map) {
    VertexMap out;
    out.width = map.width / 2;
    out.height = map.height / 2;
    out.intrinsics = map.intrinsics;
    out.intrinsics.width = out.width;
    out.intrinsics.height = out.height;
    out.intrinsics.fx = map.intrinsics.fx * 0.5;
    out.intrinsics.fy = map.intrinsics.fy * 0.5;
    // Sample (2x, 2y) keeps its ray: x' = x / 2, so c' = c / 2.
    out.intrinsics.cx = map.intrinsics.cx * 0.5;
    out.intrinsics.cy = map.intrinsics.cy * 0.5;
    out.points.assign(static_cast<std::size_t>(out.width) * out.height, Vec3f::Zero());
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.points[static_cast<std::size_t>(y) * out.width + x] =
                map.points[static_cast<std::size_t>(2 * y) * map.width + 2 * x];
    estimate_normals(out);
    return out;
}

std::vector<Vec3d> backproject(const RGBDFrame& frame, int stride, double max_depth_m) {
    std::vector<Vec3d> pts;
    const Intrinsics& k = frame.intrinsics;
    for (int y = 0; y < frame.height(); y += stride) {
        for (int x = 0; x < frame.width(); x += stride) {
            const double z = frame.depth_m(x, y);
            if (z <= 0 || z > max_depth_m) continue;
            pts.emplace_back((x - k.cx) * z / k.fx, (y - k.cy) * z / k.fy, z);
        }
    }
    return pts;
}

}  // namespace synact
