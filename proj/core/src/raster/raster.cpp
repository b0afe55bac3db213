#include "synact/raster/raster.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace synact {
namespace {

constexpr std::int64_t kSub = 256;  // sub-pixel steps per pixel
constexpr double kGuardBand = 4.0;  // side clip planes at 4x the frustum

struct ScreenPt {
    std::int64_t x, y;
};

std::int64_t edge(const ScreenPt& a, const ScreenPt& b, std::int64_t px, std::int64_t py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Samples exactly on an edge belong to the triangle that traverses the
// edge downward (or leftward when horizontal), so shared edges are drawn once.
bool owns_edge(const ScreenPt& a, const ScreenPt& b) {
    const std::int64_t dy = b.y - a.y, dx = b.x - a.x;
    return dy > 0 || (dy == 0 && dx < 0);
}

// Calls f(x, y, l0, l1, l2) for every covered pixel centre, with
// barycentric weights in the original vertex order.
template <class F>
void raster_triangle(const std::array<ScreenPt, 3>& p, int width, int height, F&& f) {
    std::array<int, 3> idx{0, 1, 2};
    ScreenPt a = p[0], b = p[1], c = p[2];
    std::int64_t area = edge(a, b, c.x, c.y);
    if (area == 0) return;
    if (area < 0) {
        std::swap(b, c);
        std::swap(idx[1], idx[2]);
        area = -area;
    }
    const std::int64_t min_x = std::min({a.x, b.x, c.x}), max_x = std::max({a.x, b.x, c.x});
    const std::int64_t min_y = std::min({a.y, b.y, c.y}), max_y = std::max({a.y, b.y, c.y});
    auto first_px = [](std::int64_t v) {  // smallest i with i*kSub + kSub/2 >= v
        const std::int64_t n = v - kSub / 2;
        return n <= 0 ? -((-n) / kSub) : (n + kSub - 1) / kSub;
    };
    auto last_px = [](std::int64_t v) {
        const std::int64_t n = v - kSub / 2;
        return n >= 0 ? n / kSub : -((-n + kSub - 1) / kSub);
    };
    const int x0 = static_cast<int>(std::max<std::int64_t>(0, first_px(min_x)));
    const int x1 = static_cast<int>(std::min<std::int64_t>(width - 1, last_px(max_x)));
    const int y0 = static_cast<int>(std::max<std::int64_t>(0, first_px(min_y)));
    const int y1 = static_cast<int>(std::min<std::int64_t>(height - 1, last_px(max_y)));
    if (x0 > x1 || y0 > y1) return;
    const bool t0 = owns_edge(b, c), t1 = owns_edge(c, a), t2 = owns_edge(a, b);
    const double inv_area = 1.0 / static_cast<double>(area);
    const std::int64_t s0 = -(c.y - b.y) * kSub, s1 = -(a.y - c.y) * kSub, s2 = -(b.y - a.y) * kSub;
    for (int y = y0; y <= y1; ++y) {
        const std::int64_t py = y * kSub + kSub / 2, px = x0 * kSub + kSub / 2;
        std::int64_t e0 = edge(b, c, px, py), e1 = edge(c, a, px, py), e2 = edge(a, b, px, py);
        for (int x = x0; x <= x1; ++x, e0 += s0, e1 += s1, e2 += s2) {
            if (e0 < 0 || e1 < 0 || e2 < 0) continue;
            if ((e0 == 0 && !t0) || (e1 == 0 && !t1) || (e2 == 0 && !t2)) continue;
            std::array<double, 3> l{};
            l[idx[0]] = static_cast<double>(e0) * inv_area;
            l[idx[1]] = static_cast<double>(e1) * inv_area;
            l[idx[2]] = static_cast<double>(e2) * inv_area;
            f(x, y, l[0], l[1], l[2]);
        }
    }
}

ScreenPt snap(double x, double y) {
    return ScreenPt{static_cast<std::int64_t>(std::llround(x * kSub)), static_cast<std::int64_t>(std::llround(y * kSub))};
}

struct ClipVert {
    Vec3d view;
    Vec3d world;
    Vec3d normal;
    Vec2d uv;
    Vec3d color;
};

ClipVert mix(const ClipVert& a, const ClipVert& b, double t) {
    return ClipVert{a.view + t * (b.view - a.view), a.world + t * (b.world - a.world), a.normal + t * (b.normal - a.normal),
                    a.uv + t * (b.uv - a.uv), a.color + t * (b.color - a.color)};
}

constexpr int kMaxPoly = 12;
struct Polygon {
    std::array<ClipVert, kMaxPoly> v;
    int n = 0;
};

// Sutherland-Hodgman against one plane; keeps points with dist >= 0.
template <class Dist>
void clip_polygon(Polygon& poly, Dist dist) {
    Polygon out;
    for (int i = 0; i < poly.n; ++i) {
        const ClipVert& a = poly.v[i];
        const ClipVert& b = poly.v[(i + 1) % poly.n];
        const double da = dist(a.view), db = dist(b.view);
        if (da >= 0 && out.n < kMaxPoly) out.v[out.n++] = a;
        if ((da >= 0) != (db >= 0) && out.n < kMaxPoly) out.v[out.n++] = mix(a, b, da / (da - db));
    }
    poly = out;
}

struct ShadowMap {
    Mat3d basis;  // rows: right, up, forward (light travel direction)
    double min_x = 0, min_y = 0, scale = 1;  // texels per meter
    double texel = 0;                        // meters per texel
    int res = 0;
    std::vector<float> depth;

    Vec3d light_coords(const Vec3d& world) const { return basis * world; }
};

struct NodeCache {
    std::vector<Vec3d> world;
    std::vector<Vec3d> normal;
};

std::vector<NodeCache> transform_nodes_cached(const SceneGraph& scene) {
    std::vector<NodeCache> out(scene.nodes.size());
    for (std::size_t i = 0; i < scene.nodes.size(); ++i) {
        const auto& node = scene.nodes[i];
        const Mesh& m = *node.mesh;
        const Mat3d normal_matrix = node.world.linear().inverse().transpose();
        auto& c = out[i];
        c.world.resize(m.vertices.size());
        c.normal.resize(m.vertices.size());
        for (std::size_t v = 0; v < m.vertices.size(); ++v) {
            c.world[v] = node.world * m.vertices[v].cast<double>();
            const Vec3d n = m.normals.size() == m.vertices.size() ? Vec3d(normal_matrix * m.normals[v].cast<double>())
                                                                  : Vec3d::Zero();
            const double len = n.norm();
            c.normal[v] = len > 1e-12 ? Vec3d(n / len) : Vec3d::Zero();
        }
    }
    return out;
}

ShadowMap build_shadow_map(const SceneGraph& scene, const std::vector<NodeCache>& cache, const Light& light, int res) {
    ShadowMap sm;
    sm.res = res;
    const Vec3d f = light.direction.normalized();
    Vec3d up_hint = scene.camera.pose.linear().col(1);
    if (std::abs(up_hint.dot(f)) > 0.99) up_hint = scene.camera.pose.linear().col(2);
    const Vec3d right = f.cross(up_hint).normalized();
    const Vec3d up = right.cross(f);
    sm.basis.row(0) = right;
    sm.basis.row(1) = up;
    sm.basis.row(2) = f;

    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& c : cache)
        for (const auto& p : c.world) {
            const Vec3d q = sm.basis * p;
            lo_x = std::min(lo_x, q.x());
            hi_x = std::max(hi_x, q.x());
            lo_y = std::min(lo_y, q.y());
            hi_y = std::max(hi_y, q.y());
        }
    const double extent = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6}) * 1.01;
    sm.min_x = 0.5 * (lo_x + hi_x) - 0.5 * extent;
    sm.min_y = 0.5 * (lo_y + hi_y) - 0.5 * extent;
    sm.scale = res / extent;
    sm.texel = extent / res;
    sm.depth.assign(static_cast<std::size_t>(res) * res, std::numeric_limits<float>::infinity());

    for (std::size_t n = 0; n < scene.nodes.size(); ++n) {
        const Mesh& m = *scene.nodes[n].mesh;
        const auto& w = cache[n].world;
        for (const auto& t : m.triangles) {
            std::array<ScreenPt, 3> pts;
            std::array<double, 3> d;
            for (int k = 0; k < 3; ++k) {
                const Vec3d q = sm.basis * w[t[k]];
                pts[k] = snap((q.x() - sm.min_x) * sm.scale, (q.y() - sm.min_y) * sm.scale);
                d[k] = q.z();
            }
            raster_triangle(pts, res, res, [&](int x, int y, double l0, double l1, double l2) {
                const float z = static_cast<float>(l0 * d[0] + l1 * d[1] + l2 * d[2]);
                float& dst = sm.depth[static_cast<std::size_t>(y) * res + x];
                if (z < dst) dst = z;
            });
        }
    }
    return sm;
}

double shadow_factor(const ShadowMap& sm, const Vec3d& world, double cos_theta) {
    const Vec3d q = sm.light_coords(world);
    const int x = static_cast<int>(std::floor((q.x() - sm.min_x) * sm.scale));
    const int y = static_cast<int>(std::floor((q.y() - sm.min_y) * sm.scale));
    if (x < 0 || y < 0 || x >= sm.res || y >= sm.res) return 1.0;
    const double c = std::clamp(cos_theta, 0.05, 1.0);
    const double tan_theta = std::sqrt(1.0 - c * c) / c;
    const double bias = sm.texel * (1.5 + 2.0 * std::min(tan_theta, 8.0));
    return q.z() - bias > sm.depth[static_cast<std::size_t>(y) * sm.res + x] ? 0.0 : 1.0;
}

struct Target {
    int width, height;
    std::vector<Vec3f> color;
    std::vector<double> depth;
    std::vector<std::int32_t> node;
};

void render_into(const SceneGraph& scene, Target& target, bool shadows, int shadow_res) {
    const Camera& cam = scene.camera;
    const Isometry view = cam.view();
    const double ty = std::tan(0.5 * cam.vfov), tx = ty * cam.aspect;
    const int W = target.width, H = target.height;
    const Vec3d eye = cam.pose.translation();

    const auto cache = transform_nodes_cached(scene);
    std::vector<const ShadowMap*> light_maps(scene.lights.size(), nullptr);
    std::vector<ShadowMap> maps;
    maps.reserve(scene.lights.size());
    if (shadows)
        for (std::size_t i = 0; i < scene.lights.size(); ++i)
            if (scene.lights[i].kind == LightKind::Directional && scene.lights[i].casts_shadows && scene.lights[i].intensity > 0) {
                maps.push_back(build_shadow_map(scene, cache, scene.lights[i], shadow_res));
                light_maps[i] = &maps.back();
            }

    const Vec3f clear = scene.clear_color.cast<float>();
    std::fill(target.color.begin(), target.color.end(), clear);
    std::fill(target.depth.begin(), target.depth.end(), std::numeric_limits<double>::infinity());
    std::fill(target.node.begin(), target.node.end(), -1);

    for (std::size_t n = 0; n < scene.nodes.size(); ++n) {
        const SceneNode& node = scene.nodes[n];
        const Mesh& m = *node.mesh;
        const auto& wc = cache[n];
        const bool textured = node.texture && m.uvs.size() == m.vertices.size();
        const bool colored = m.colors.size() == m.vertices.size();
        const Vec3d flat = node.color_override.value_or(Vec3d::Constant(0.8));
        for (const auto& tri : m.triangles) {
            Polygon poly;
            poly.n = 3;
            for (int k = 0; k < 3; ++k) {
                const std::uint32_t vi = tri[k];
                ClipVert& cv = poly.v[k];
                cv.world = wc.world[vi];
                cv.view = view * cv.world;
                cv.normal = wc.normal[vi];
                cv.uv = textured ? Vec2d(m.uvs[vi].cast<double>()) : Vec2d::Zero();
                cv.color = colored ? Vec3d(m.colors[vi][0], m.colors[vi][1], m.colors[vi][2]) / 255.0 : flat;
            }
            // Trivial reject / accept before clipping.
            bool all_in = true;
            for (int k = 0; k < 3; ++k) {
                const Vec3d& v = poly.v[k].view;
                const double z = -v.z();
                if (z < cam.near || z > cam.far || std::abs(v.x()) > kGuardBand * tx * z || std::abs(v.y()) > kGuardBand * ty * z)
                    all_in = false;
            }
            if (!all_in) {
                clip_polygon(poly, [&](const Vec3d& v) { return -v.z() - cam.near; });
                clip_polygon(poly, [&](const Vec3d& v) { return cam.far + v.z(); });
                clip_polygon(poly, [&](const Vec3d& v) { return kGuardBand * tx * -v.z() - v.x(); });
                clip_polygon(poly, [&](const Vec3d& v) { return kGuardBand * tx * -v.z() + v.x(); });
                clip_polygon(poly, [&](const Vec3d& v) { return kGuardBand * ty * -v.z() - v.y(); });
                clip_polygon(poly, [&](const Vec3d& v) { return kGuardBand * ty * -v.z() + v.y(); });
                if (poly.n < 3) continue;
            }
            std::array<ScreenPt, kMaxPoly> screen;
            std::array<double, kMaxPoly> inv_z;
            for (int k = 0; k < poly.n; ++k) {
                const Vec3d& v = poly.v[k].view;
                const double z = -v.z();
                inv_z[k] = 1.0 / z;
                screen[k] = snap(0.5 * W * (1.0 + v.x() / z / tx), 0.5 * H * (1.0 - v.y() / z / ty));
            }
            for (int k = 1; k + 1 < poly.n; ++k) {
                const int ids[3] = {0, k, k + 1};
                const std::array<ScreenPt, 3> pts{screen[0], screen[k], screen[k + 1]};
                raster_triangle(pts, W, H, [&](int x, int y, double l0, double l1, double l2) {
                    const double iz = l0 * inv_z[ids[0]] + l1 * inv_z[ids[1]] + l2 * inv_z[ids[2]];
                    const double z = 1.0 / iz;
                    const std::size_t pix = static_cast<std::size_t>(y) * W + x;
                    if (!(z < target.depth[pix])) return;
                    target.depth[pix] = z;
                    target.node[pix] = static_cast<std::int32_t>(n);
                    const double w0 = l0 * inv_z[ids[0]] * z, w1 = l1 * inv_z[ids[1]] * z, w2 = l2 * inv_z[ids[2]] * z;
                    const ClipVert& a = poly.v[ids[0]];
                    const ClipVert& b = poly.v[ids[1]];
                    const ClipVert& c = poly.v[ids[2]];
                    const Vec3d p = w0 * a.world + w1 * b.world + w2 * c.world;
                    Vec3d normal = w0 * a.normal + w1 * b.normal + w2 * c.normal;
                    if (normal.squaredNorm() < 1e-18) normal = (b.world - a.world).cross(c.world - a.world);
                    normal.normalize();
                    if (normal.dot(eye - p) < 0) normal = -normal;
                    Vec3d albedo;
                    if (node.color_override) {
                        albedo = *node.color_override;
                    } else if (textured) {
                        const Vec2d uv = w0 * a.uv + w1 * b.uv + w2 * c.uv;
                        albedo = node.texture->sample_bilinear(static_cast<float>(uv.x()), static_cast<float>(uv.y())).cast<double>();
                    } else {
                        albedo = w0 * a.color + w1 * b.color + w2 * c.color;
                    }
                    Vec3d rgb = scene.ambient.cwiseProduct(albedo);
                    for (std::size_t li = 0; li < scene.lights.size(); ++li) {
                        const Light& light = scene.lights[li];
                        const Vec3d l = light.kind == LightKind::Directional ? Vec3d(-light.direction)
                                                                             : Vec3d((light.position - p).normalized());
                        const double ndotl = normal.dot(l);
                        if (ndotl <= 0) continue;
                        double vis = 1.0;
                        if (light_maps[li]) vis = shadow_factor(*light_maps[li], p, ndotl);
                        rgb += (ndotl * light.intensity * vis) * light.color.cwiseProduct(albedo);
                    }
                    target.color[pix] = rgb.cast<float>();
                });
            }
        }
    }
}

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

void RenderConfig::validate() const {
    if (width <= 0 || height <= 0) throw ContractError("render resolution must be positive");
    if (shadow_resolution <= 0 || (shadow_resolution & (shadow_resolution - 1)) != 0)
        throw ContractError("shadow resolution must be a power of two");
}

Texture Framebuffer::color_texture() const {
    Texture t(width, height);
    t.pixels = color;
    return t;
}

Projection project(const Camera& camera, int width, int height, const Vec3d& world) {
    const Vec3d v = camera.view() * world;
    const double z = -v.z();
    const double ty = std::tan(0.5 * camera.vfov), tx = ty * camera.aspect;
    return Projection{Vec2d(0.5 * width * (1.0 + v.x() / z / tx), 0.5 * height * (1.0 - v.y() / z / ty)), z};
}

Vec3d unproject(const Camera& camera, int width, int height, const Vec2d& pixel, double depth) {
    const double ty = std::tan(0.5 * camera.vfov), tx = ty * camera.aspect;
    const double x = (pixel.x() / (0.5 * width) - 1.0) * tx * depth;
    const double y = (1.0 - pixel.y() / (0.5 * height)) * ty * depth;
    return camera.pose * Vec3d(x, y, -depth);
}

Intrinsics camera_intrinsics(const Camera& camera, int width, int height) {
    const double ty = std::tan(0.5 * camera.vfov), tx = ty * camera.aspect;
    Intrinsics k;
    k.width = width;
    k.height = height;
    k.fx = 0.5 * width / tx;
    k.fy = 0.5 * height / ty;
    k.cx = 0.5 * width - 0.5;
    k.cy = 0.5 * height - 0.5;
    return k;
}

Isometry cv_pose(const Camera& camera) {
    Isometry flip = Isometry::Identity();
    flip.linear() = Vec3d(1, -1, -1).asDiagonal();
    return camera.pose * flip;
}

Framebuffer rasterize_frame(const SceneGraph& scene, const RenderConfig& config) {
    config.validate();
    const int ss = config.supersample ? 2 : 1;
    Target t{config.width * ss, config.height * ss, {}, {}, {}};
    const std::size_t n = static_cast<std::size_t>(t.width) * t.height;
    t.color.resize(n);
    t.depth.resize(n);
    t.node.resize(n);
    render_into(scene, t, config.shadows, config.shadow_resolution);

    Framebuffer fb;
    fb.width = config.width;
    fb.height = config.height;
    fb.color.resize(static_cast<std::size_t>(fb.width) * fb.height * 3);
    fb.depth.resize(static_cast<std::size_t>(fb.width) * fb.height);
    fb.node.resize(fb.depth.size());
    for (int y = 0; y < fb.height; ++y)
        for (int x = 0; x < fb.width; ++x) {
            Vec3d sum = Vec3d::Zero();
            double best = std::numeric_limits<double>::infinity();
            std::int32_t node = -1;
            for (int sy = 0; sy < ss; ++sy)
                for (int sx = 0; sx < ss; ++sx) {
                    const std::size_t i = static_cast<std::size_t>(y * ss + sy) * t.width + (x * ss + sx);
                    sum += t.color[i].cast<double>();
                    if (t.depth[i] < best) {
                        best = t.depth[i];
                        node = t.node[i];
                    }
                }
            sum /= ss * ss;
            const std::size_t o = static_cast<std::size_t>(y) * fb.width + x;
            fb.color[3 * o] = quantize(sum.x());
            fb.color[3 * o + 1] = quantize(sum.y());
            fb.color[3 * o + 2] = quantize(sum.z());
            fb.depth[o] = static_cast<float>(best);
            fb.node[o] = node;
        }
    return fb;
}

ClipContainer render_clip(const std::vector<SceneGraph>& scenes, ActionLabel label, const std::string& provenance,
                          const RenderConfig& config) {
    if (scenes.empty()) throw ContractError("render_clip needs at least one scene");
    ClipContainer clip;
    clip.header.width = static_cast<std::uint32_t>(config.width);
    clip.header.height = static_cast<std::uint32_t>(config.height);
    clip.header.fps = kGeneratedClipFps;
    clip.header.frame_count = static_cast<std::uint32_t>(scenes.size());
    clip.header.label = std::string(to_string(label));
    clip.header.provenance = provenance;
    clip.frames.reserve(scenes.size());
    for (const auto& s : scenes) clip.frames.push_back(rasterize_frame(s, config).color);
    return clip;
}

DepthSequence render_depth_sequence(const std::vector<SceneGraph>& scenes, const RenderConfig& config) {
    if (scenes.empty()) throw ContractError("render_depth_sequence needs at least one scene");
    DepthSequence seq;
    seq.intrinsics = camera_intrinsics(scenes.front().camera, config.width, config.height);
    for (const auto& s : scenes) {
        if (s.camera.far >= 65.535)
            throw ConfigError("far plane " + std::to_string(s.camera.far) + " m does not fit u16 millimetres");
        const Framebuffer fb = rasterize_frame(s, config);
        std::vector<std::uint16_t> mm(fb.depth.size(), 0);
        for (std::size_t i = 0; i < mm.size(); ++i)
            if (std::isfinite(fb.depth[i])) mm[i] = static_cast<std::uint16_t>(std::min(65535L, std::lround(fb.depth[i] * 1000.0)));
        seq.depth_mm.push_back(std::move(mm));
        seq.color.push_back(fb.color_texture());
        seq.poses.push_back(cv_pose(s.camera));
    }
    return seq;
}

}  // namespace synact
