#include "synact/scene/assets.hpp"

#include "synact/error.hpp"
#include "synact/formats/glb.hpp"
#include "synact/formats/obj.hpp"
#include "synact/formats/ply.hpp"
#include "synact/formats/png_io.hpp"
#include "synact/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace synact {
namespace {

using TexPtr = std::shared_ptr<const Texture>;

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L)); }

void put(Texture& t, int x, int y, const Vec3d& c) {
    auto* p = t.at(x, y);
    p[0] = to_u8(c.x());
    p[1] = to_u8(c.y());
    p[2] = to_u8(c.z());
}

// Value noise on a lattice of `cell` pixels, smoothly interpolated.
class ValueNoise {
public:
    ValueNoise(std::uint64_t seed, int cell) : seed_(seed), cell_(cell) {}
    double operator()(double x, double y) const {
        const double fx = x / cell_, fy = y / cell_;
        const int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
        const double tx = smooth(fx - ix), ty = smooth(fy - iy);
        const double a = lattice(ix, iy), b = lattice(ix + 1, iy), c = lattice(ix, iy + 1), d = lattice(ix + 1, iy + 1);
        return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
    }

private:
    static double smooth(double t) { return t * t * (3 - 2 * t); }
    double lattice(int x, int y) const {
        const std::uint64_t h = mix64(seed_ ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) ^
                                      static_cast<std::uint32_t>(y));
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    }
    std::uint64_t seed_;
    int cell_;
};

double fractal(const ValueNoise& n0, const ValueNoise& n1, const ValueNoise& n2, double x, double y) {
    return 0.5 * n0(x, y) + 0.3 * n1(x, y) + 0.2 * n2(x, y);
}

void fill_rect(Texture& t, int x0, int y0, int x1, int y1, const Vec3d& c) {
    for (int y = std::max(0, y0); y < std::min(t.height, y1); ++y)
        for (int x = std::max(0, x0); x < std::min(t.width, x1); ++x) put(t, x, y, c);
}

Vec3d random_color(Rng& rng, double lo, double hi) {
    return Vec3d(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
}

// Indoor placeholder: wall, window, framed pictures and a shelf.
Texture indoor_texture(int w, int h, std::uint64_t seed) {
    Texture t(w, h);
    Rng rng(seed);
    const ValueNoise n0(seed, 32), n1(seed + 1, 9), n2(seed + 2, 3);
    const Vec3d wall = random_color(rng, 0.55, 0.9);
    const Vec3d floor = random_color(rng, 0.25, 0.5);
    const int horizon = static_cast<int>(h * rng.uniform(0.68, 0.78));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double n = fractal(n0, n1, n2, x, y) - 0.5;
            put(t, x, y, (y < horizon ? wall : floor) * (1.0 + 0.25 * n));
        }
    // Window with a sky gradient.
    const int wx = static_cast<int>(w * rng.uniform(0.05, 0.5)), ww = w / 4, wy = h / 8, wh = h / 3;
    fill_rect(t, wx - 4, wy - 4, wx + ww + 4, wy + wh + 4, Vec3d(0.95, 0.95, 0.92));
    for (int y = wy; y < wy + wh; ++y)
        for (int x = wx; x < wx + ww; ++x) put(t, x, y, Vec3d(0.45, 0.65, 0.95) * (0.8 + 0.4 * (y - wy) / wh));
    fill_rect(t, wx + ww / 2 - 2, wy, wx + ww / 2 + 2, wy + wh, Vec3d(0.95, 0.95, 0.92));
    for (int k = 0; k < 3; ++k) {
        const int px = static_cast<int>(rng.below(static_cast<std::uint64_t>(w - w / 6))), py = static_cast<int>(h / 6 + rng.below(h / 3));
        const int pw = w / 10 + static_cast<int>(rng.below(w / 10)), ph = h / 10 + static_cast<int>(rng.below(h / 8));
        fill_rect(t, px - 3, py - 3, px + pw + 3, py + ph + 3, Vec3d(0.2, 0.12, 0.05));
        fill_rect(t, px, py, px + pw, py + ph, random_color(rng, 0.1, 1.0));
        fill_rect(t, px + pw / 3, py + ph / 4, px + pw / 2, py + ph / 2, random_color(rng, 0.1, 1.0));
    }
    // Shelf of books.
    const int sy = horizon - h / 5, sx = static_cast<int>(w * rng.uniform(0.55, 0.8));
    fill_rect(t, sx, sy, sx + w / 5, sy + 4, Vec3d(0.35, 0.22, 0.1));
    for (int x = sx + 2; x < sx + w / 5 - 4;) {
        const int bw = 3 + static_cast<int>(rng.below(4)), bh = 12 + static_cast<int>(rng.below(14));
        fill_rect(t, x, sy - bh, x + bw, sy, random_color(rng, 0.1, 0.9));
        x += bw + 1;
    }
    return t;
}

// Outdoor placeholder: sky, hills or buildings, ground.
Texture outdoor_texture(int w, int h, std::uint64_t seed, int variant) {
    Texture t(w, h);
    Rng rng(seed);
    const ValueNoise n0(seed, 40), n1(seed + 1, 11), n2(seed + 2, 3);
    const int horizon = static_cast<int>(h * rng.uniform(0.5, 0.65));
    const Vec3d ground = variant == 0 ? Vec3d(0.25, 0.5, 0.18) : variant == 1 ? Vec3d(0.55, 0.5, 0.4) : Vec3d(0.4, 0.4, 0.42);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double n = fractal(n0, n1, n2, x, y);
            if (y < horizon) {
                const double s = static_cast<double>(y) / horizon;
                Vec3d sky = Vec3d(0.35, 0.55, 0.9) * (1 - s) + Vec3d(0.75, 0.85, 0.95) * s;
                if (n > 0.62) sky = sky * 0.3 + Vec3d::Ones() * 0.7;  // clouds
                put(t, x, y, sky);
            } else {
                put(t, x, y, ground * (0.75 + 0.5 * n));
            }
        }
    if (variant == 0) {
        for (int x = 0; x < w; ++x) {
            const int top = horizon - static_cast<int>(h * 0.18 * n0(x * 0.8, 5.0));
            for (int y = std::max(0, top); y < horizon; ++y) put(t, x, y, Vec3d(0.2, 0.38, 0.2) * (0.8 + 0.4 * n2(x, y)));
        }
        for (int k = 0; k < 7; ++k) {  // trees
            const int tx = static_cast<int>(rng.below(w)), th = h / 6 + static_cast<int>(rng.below(h / 6));
            fill_rect(t, tx - 2, horizon - th / 3, tx + 2, horizon + 4, Vec3d(0.3, 0.2, 0.1));
            for (int y = horizon - th; y < horizon - th / 3; ++y)
                for (int x = tx - th / 4; x <= tx + th / 4; ++x)
                    if (x >= 0 && x < w && y >= 0 && std::hypot(x - tx, (y - (horizon - 2 * th / 3)) * 1.2) < th / 4.0)
                        put(t, x, y, Vec3d(0.1, 0.35 + 0.2 * n1(x, y), 0.1));
        }
    } else {
        for (int x = 0; x < w;) {  // skyline
            const int bw = w / 14 + static_cast<int>(rng.below(w / 10));
            const int bh = h / 6 + static_cast<int>(rng.below(h / 3));
            const Vec3d c = random_color(rng, 0.3, 0.75);
            fill_rect(t, x, horizon - bh, x + bw, horizon, c);
            for (int wy = horizon - bh + 4; wy + 4 < horizon; wy += 9)
                for (int wx = x + 3; wx + 4 < x + bw; wx += 8)
                    fill_rect(t, wx, wy, wx + 4, wy + 5, rng.uniform() < 0.5 ? Vec3d(0.9, 0.85, 0.5) : Vec3d(0.15, 0.18, 0.25));
            x += bw + static_cast<int>(rng.below(6));
        }
        if (variant == 2) {  // road stripes
            for (int x = 0; x < w; x += 24) fill_rect(t, x, horizon + (h - horizon) / 2, x + 12, horizon + (h - horizon) / 2 + 3, Vec3d(0.95, 0.9, 0.3));
        }
    }
    return t;
}

TexPtr make_wallpaper(std::uint64_t seed, const Vec3d& base, int w = 512, int h = 256) {
    Texture t(w, h);
    Rng rng(seed);
    const ValueNoise n0(seed, 48), n1(seed + 1, 12), n2(seed + 2, 4);
    const Vec3d accent = random_color(rng, 0.2, 0.9);
    const int stripe = 16 + static_cast<int>(rng.below(16));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double n = fractal(n0, n1, n2, x, y);
            Vec3d c = base * (0.8 + 0.4 * n);
            if ((x / stripe) % 2 == 0) c = 0.85 * c + 0.15 * accent;
            put(t, x, y, c);
        }
    // Scattered motifs give features for tracking.
    for (int k = 0; k < 90; ++k) {
        const int cx = static_cast<int>(rng.below(w)), cy = static_cast<int>(rng.below(h));
        const int r = 2 + static_cast<int>(rng.below(5));
        const Vec3d c = random_color(rng, 0.05, 0.95);
        fill_rect(t, cx - r, cy - r, cx + r, cy + r, c);
    }
    return std::make_shared<const Texture>(std::move(t));
}

TexPtr make_planks(std::uint64_t seed, const Vec3d& base, int w = 512, int h = 512, int planks = 10) {
    Texture t(w, h);
    Rng rng(seed);
    const ValueNoise grain(seed, 3), n1(seed + 1, 40);
    std::vector<double> shade(planks);
    for (auto& s : shade) s = rng.uniform(0.75, 1.2);
    const int pw = w / planks;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int p = std::min(x / pw, planks - 1);
            const int seg = (y + p * 97) / (h / 3);
            double s = shade[p] * (0.85 + 0.3 * grain(x * 4.0, y * 0.25)) * (0.9 + 0.2 * n1(x, y));
            if (x % pw < 2 || (y + p * 97) % (h / 3) < 2) s *= 0.45;
            s *= 1.0 + 0.08 * ((seg * 7 + p * 3) % 5 - 2);
            put(t, x, y, base * s);
        }
    return std::make_shared<const Texture>(std::move(t));
}

TexPtr make_pattern(std::uint64_t seed, int w = 256, int h = 256) {
    Texture t(w, h);
    Rng rng(seed);
    const Vec3d bg = random_color(rng, 0.4, 0.9);
    fill_rect(t, 0, 0, w, h, bg);
    for (int k = 0; k < 40; ++k) {
        const int x = static_cast<int>(rng.below(w)), y = static_cast<int>(rng.below(h));
        const int rw = 8 + static_cast<int>(rng.below(w / 4)), rh = 8 + static_cast<int>(rng.below(h / 4));
        fill_rect(t, x, y, x + rw, y + rh, random_color(rng, 0.05, 1.0));
    }
    fill_rect(t, 0, 0, w, 6, Vec3d(0.15, 0.1, 0.05));
    fill_rect(t, 0, h - 6, w, h, Vec3d(0.15, 0.1, 0.05));
    fill_rect(t, 0, 0, 6, h, Vec3d(0.15, 0.1, 0.05));
    fill_rect(t, w - 6, 0, w, h, Vec3d(0.15, 0.1, 0.05));
    return std::make_shared<const Texture>(std::move(t));
}

TexPtr make_books(std::uint64_t seed, int w = 256, int h = 512) {
    Texture t(w, h);
    Rng rng(seed);
    const Vec3d wood(0.42, 0.28, 0.15);
    fill_rect(t, 0, 0, w, h, wood * 0.6);
    const int shelves = 5, sh = h / shelves;
    for (int s = 0; s < shelves; ++s) {
        const int base = (s + 1) * sh - 8;
        fill_rect(t, 0, base, w, base + 8, wood);
        for (int x = 6; x < w - 10;) {
            const int bw = 6 + static_cast<int>(rng.below(10));
            const int bh = sh / 2 + static_cast<int>(rng.below(sh / 3));
            const Vec3d c = random_color(rng, 0.08, 0.95);
            fill_rect(t, x, base - bh, x + bw, base, c);
            fill_rect(t, x + 1, base - bh + 6, x + bw - 1, base - bh + 9, Vec3d(0.9, 0.85, 0.6));
            x += bw + 1 + static_cast<int>(rng.below(3));
        }
    }
    fill_rect(t, 0, 0, 8, h, wood);
    fill_rect(t, w - 8, 0, w, h, wood);
    return std::make_shared<const Texture>(std::move(t));
}

TexPtr make_fabric(std::uint64_t seed, const Vec3d& base, int w = 256, int h = 256) {
    Texture t(w, h);
    const ValueNoise n0(seed, 20), n1(seed + 1, 5), n2(seed + 2, 2);
    Rng rng(seed);
    const Vec3d accent = random_color(rng, 0.1, 0.9);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            Vec3d c = base * (0.75 + 0.5 * fractal(n0, n1, n2, x, y));
            if (((x / 32) + (y / 32)) % 2 == 0 && (x % 32 > 12 && x % 32 < 20)) c = 0.6 * c + 0.4 * accent;
            put(t, x, y, c);
        }
    return std::make_shared<const Texture>(std::move(t));
}

SceneNode node(std::string name, Mesh mesh, TexPtr tex, const Affine& world, bool colorable = false) {
    SceneNode n;
    n.name = std::move(name);
    if (mesh.normals.empty()) compute_vertex_normals(mesh);
    n.mesh = std::make_shared<const Mesh>(std::move(mesh));
    n.texture = std::move(tex);
    n.world = world;
    n.role = NodeRole::Environment;
    n.colorable = colorable;
    return n;
}

Affine pose(const Vec3d& t, double yaw_deg = 0.0, double pitch_deg = 0.0) {
    Affine a = Affine::Identity();
    a.translate(t);
    a.rotate(rotation_y(deg_to_rad(yaw_deg)));
    a.rotate(Eigen::AngleAxisd(deg_to_rad(pitch_deg), Vec3d::UnitX()).toRotationMatrix());
    return a;
}

// Subdivided quad (z = 0 plane, facing +z) so that large surfaces clip and
// shade well; uvs span [0,1]^2 with (0,0) top-left.
Mesh make_panel(float width, float height, int nx, int ny) {
    Mesh m;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const float u = static_cast<float>(i) / nx, v = static_cast<float>(j) / ny;
            m.vertices.emplace_back((u - 0.5f) * width, (0.5f - v) * height, 0.0f);
            m.normals.emplace_back(0, 0, 1);
            m.uvs.emplace_back(u, v);
        }
    const auto row = static_cast<std::uint32_t>(nx + 1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::uint32_t a = j * row + i, b = a + 1, c = a + row, d = c + 1;
            m.triangles.push_back({a, c, d});
            m.triangles.push_back({a, d, b});
        }
    return m;
}

// Box whose faces map a single texture (used for furniture).
SceneNode box_node(std::string name, const Vec3d& lo, const Vec3d& hi, TexPtr tex) {
    return node(std::move(name), make_box(lo.cast<float>(), hi.cast<float>()), std::move(tex), Affine::Identity());
}

}  // namespace

std::vector<std::shared_ptr<const Texture>> placeholder_backgrounds(int width, int height) {
    if (width < 16 || height < 16) throw ContractError("placeholder backgrounds need at least 16x16 pixels");
    std::vector<TexPtr> out;
    for (int i = 0; i < 3; ++i)
        out.push_back(std::make_shared<const Texture>(indoor_texture(width, height, 0xB6001 + 7919ULL * i)));
    for (int i = 0; i < 3; ++i)
        out.push_back(std::make_shared<const Texture>(outdoor_texture(width, height, 0xB6101 + 7919ULL * i, i)));
    return out;
}

Environment make_living_room() {
    constexpr double half = 3.2, height = 2.8;
    Environment env;
    env.name = "living_room";
    auto& nodes = env.nodes;

    const auto wall_mesh = make_panel(static_cast<float>(2 * half), static_cast<float>(height), 8, 4);
    nodes.push_back(node("wall_back", wall_mesh, make_wallpaper(11, {0.85, 0.8, 0.7}), pose({0, height / 2, -half}, 0), true));
    nodes.push_back(node("wall_front", wall_mesh, make_wallpaper(12, {0.75, 0.82, 0.78}), pose({0, height / 2, half}, 180), true));
    nodes.push_back(node("wall_left", wall_mesh, make_wallpaper(13, {0.8, 0.75, 0.8}), pose({-half, height / 2, 0}, 90), true));
    nodes.push_back(node("wall_right", wall_mesh, make_wallpaper(14, {0.82, 0.8, 0.68}), pose({half, height / 2, 0}, -90), true));
    const auto floor_mesh = make_panel(static_cast<float>(2 * half), static_cast<float>(2 * half), 8, 8);
    nodes.push_back(node("floor", floor_mesh, make_planks(21, {0.55, 0.38, 0.22}), pose({0, 0, 0}, 0, -90)));
    nodes.push_back(node("ceiling", floor_mesh, make_fabric(22, {0.92, 0.92, 0.9}), pose({0, height, 0}, 0, 90)));
    nodes.push_back(node("rug", make_panel(2.2f, 1.6f, 4, 4), make_fabric(23, {0.6, 0.2, 0.2}), pose({0.2, 0.004, 0.3}, 0, -90)));

    // Furniture hugs the walls so the centre stays free for the body and
    // the orbiting camera.
    const TexPtr sofa = make_fabric(31, {0.25, 0.35, 0.55});
    nodes.push_back(box_node("sofa_base", {-1.3, 0.0, -3.2}, {1.3, 0.45, -2.45}, sofa));
    nodes.push_back(box_node("sofa_back", {-1.3, 0.45, -3.2}, {1.3, 0.95, -2.95}, sofa));
    nodes.push_back(box_node("sofa_arm_l", {-1.5, 0.0, -3.2}, {-1.3, 0.7, -2.45}, sofa));
    nodes.push_back(box_node("sofa_arm_r", {1.3, 0.0, -3.2}, {1.5, 0.7, -2.45}, sofa));
    nodes.push_back(node("bookshelf", make_box({-0.6f, 0.0f, -0.2f}, {0.6f, 2.0f, 0.2f}), make_books(41),
                         pose({-2.95, 0, -0.6}, 90)));
    const TexPtr wood = make_planks(42, {0.5, 0.33, 0.18}, 256, 256, 4);
    nodes.push_back(box_node("cabinet", {2.7, 0.0, 0.4}, {3.2, 0.8, 1.8}, wood));
    nodes.push_back(box_node("tv", {2.95, 0.95, 0.6}, {3.1, 1.55, 1.6}, make_pattern(43)));
    nodes.push_back(box_node("side_table", {1.8, 0.0, -3.2}, {2.5, 0.6, -2.6}, wood));
    nodes.push_back(box_node("lamp", {2.05, 0.6, -3.0}, {2.25, 1.3, -2.8}, make_fabric(44, {0.95, 0.85, 0.55})));
    nodes.push_back(box_node("armchair", {-3.2, 0.0, 1.3}, {-2.5, 0.5, 2.2}, make_fabric(45, {0.45, 0.3, 0.2})));
    nodes.push_back(box_node("armchair_back", {-3.2, 0.5, 1.3}, {-2.95, 1.0, 2.2}, make_fabric(45, {0.45, 0.3, 0.2})));
    nodes.push_back(box_node("plant_pot", {-2.9, 0.0, -2.9}, {-2.5, 0.4, -2.5}, make_pattern(46, 128, 128)));
    nodes.push_back(box_node("plant", {-2.95, 0.4, -2.95}, {-2.45, 1.3, -2.45}, make_fabric(47, {0.2, 0.5, 0.2})));
    nodes.push_back(box_node("dresser", {-1.0, 0.0, 2.7}, {0.6, 0.9, 3.2}, wood));

    // Pictures just off the walls.
    nodes.push_back(node("picture_back", make_panel(1.2f, 0.8f, 1, 1), make_pattern(51), pose({0, 1.7, -3.19}, 0)));
    nodes.push_back(node("picture_right", make_panel(0.9f, 0.7f, 1, 1), make_pattern(52), pose({3.19, 1.8, -1.2}, -90)));
    nodes.push_back(node("picture_front", make_panel(1.0f, 0.7f, 1, 1), make_pattern(53), pose({1.4, 1.6, 3.19}, 180)));
    nodes.push_back(node("picture_left", make_panel(0.8f, 1.0f, 1, 1), make_pattern(54), pose({-3.19, 1.6, 1.75}, 90)));
    nodes.push_back(node("window", make_panel(1.4f, 1.1f, 1, 1), std::make_shared<const Texture>(outdoor_texture(256, 192, 55, 0)),
                         pose({-1.6, 1.6, 3.19}, 180)));

    env.anchor = Affine::Identity();
    return env;
}

Mesh environment_world_mesh(const Environment& env) {
    Mesh out;
    for (const auto& n : env.nodes) {
        Mesh m = transformed(*n.mesh, n.world);
        m.uvs.clear();
        m.colors.clear();
        m.texture_id.reset();
        append(out, m);
    }
    return out;
}

Environment load_environment(const std::filesystem::path& path, const Affine& anchor,
                             const std::vector<std::string>& colorable) {
    if (!std::filesystem::exists(path)) throw IoError("environment file not found: " + path.string());
    Environment env;
    env.name = path.stem().string();
    env.anchor = anchor;
    auto is_colorable = [&](const std::string& name) {
        return std::find(colorable.begin(), colorable.end(), name) != colorable.end();
    };
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".glb") {
        const auto bytes = read_file_bytes(path);
        GlbScene glb = parse_glb(bytes);
        std::vector<TexPtr> textures;
        for (auto& t : glb.textures) textures.push_back(std::make_shared<const Texture>(std::move(t)));
        std::vector<std::shared_ptr<const Mesh>> meshes;
        for (auto& m : glb.meshes) meshes.push_back(std::make_shared<const Mesh>(std::move(m)));
        for (std::size_t i = 0; i < glb.instances.size(); ++i) {
            const auto& inst = glb.instances[i];
            SceneNode n;
            n.name = env.name + "_" + std::to_string(i);
            n.mesh = meshes.at(inst.mesh);
            if (n.mesh->texture_id && *n.mesh->texture_id < textures.size()) n.texture = textures[*n.mesh->texture_id];
            n.world = inst.world;
            n.colorable = is_colorable(n.name) || is_colorable(env.name);
            env.nodes.push_back(std::move(n));
        }
    } else if (ext == ".obj" || ext == ".ply") {
        Mesh mesh;
        TexPtr tex;
        if (ext == ".obj") {
            const std::string text = read_file_text(path);
            mesh = parse_obj(text);
            if (auto lib = obj_material_library(text)) {
                const auto mtl_path = path.parent_path() / *lib;
                if (std::filesystem::exists(mtl_path)) {
                    if (auto map = mtl_diffuse_map(read_file_text(mtl_path))) {
                        const auto tex_path = path.parent_path() / *map;
                        if (std::filesystem::exists(tex_path) && !mesh.uvs.empty())
                            tex = std::make_shared<const Texture>(read_png(tex_path));
                    }
                }
            }
        } else {
            mesh = parse_ply(read_file_bytes(path));
            if (mesh.normals.empty()) compute_vertex_normals(mesh);
        }
        SceneNode n;
        n.name = env.name;
        n.mesh = std::make_shared<const Mesh>(std::move(mesh));
        n.texture = std::move(tex);
        n.colorable = is_colorable(n.name);
        env.nodes.push_back(std::move(n));
    } else {
        throw UnsupportedFeatureError("unsupported environment format '" + ext + "'");
    }
    return env;
}

}  // namespace synact

namespace synact {

std::vector<SceneGraph> room_orbit_scenes(const Environment& env, std::size_t frames, double radius, double sweep_deg,
                                          double eye_height, double vfov_deg) {
    if (frames == 0) return {};
    SceneGraph base;
    base.nodes = env.nodes;
    base.camera.vfov = deg_to_rad(vfov_deg);
    base.camera.near = 0.1;
    base.camera.far = 20.0;
    Light key;
    key.direction = Vec3d(0.3, -0.7, -0.65).normalized();
    key.intensity = 0.6;
    base.lights.push_back(key);
    base.ambient = Vec3d::Constant(0.3);

    std::vector<SceneGraph> out;
    out.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const double t = frames > 1 ? static_cast<double>(i) / static_cast<double>(frames - 1) : 0.0;
        const double a = deg_to_rad(sweep_deg) * t;
        const Vec3d dir(std::sin(a), 0.0, std::cos(a));
        const Vec3d eye = Vec3d(0, eye_height, 0) + radius * dir;
        SceneGraph s = base;
        s.camera.pose = look_from(eye, eye + dir - Vec3d(0, 0.25, 0));
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace synact
