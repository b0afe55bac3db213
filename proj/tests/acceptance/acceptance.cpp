// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include "raster_oracle.hpp"

#include "synact/augment/augment.hpp"
#include "synact/body/humanoid.hpp"
#include "synact/body/skinning.hpp"
#include "synact/flow/flow.hpp"
#include "synact/pipeline/config.hpp"
#include "synact/pipeline/generate.hpp"
#include "synact/preprocess/preprocess.hpp"
#include "synact/raster/raster.hpp"
#include "synact/recon/reconstruction.hpp"
#include "synact/recon/rgbd.hpp"
#include "synact/scene/assets.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace synact;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("synact_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::uint64_t tree_hash(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    StableHasher h;
    for (const auto& f : files) {
        std::ifstream in(root / f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        h.add(f.generic_string()).add(ss.str());
    }
    return h.finish();
}

PipelineConfig desk_config(const fs::path& out) {
    PipelineConfig cfg = load_pipeline_config(fs::path(SYNACT_SOURCE_DIR) / "configs" / "desk.toml");
    cfg.output_root = out;
    return cfg;
}

// Desk run shared by the cardinality and determinism checks.
struct DeskRun {
    fs::path root;
    GenerateReport report;
    double seconds = 0;
};

const DeskRun& desk_run() {
    static const DeskRun run = [] {
        DeskRun r;
        r.root = scratch_dir("desk_a");
        const auto t0 = Clock::now();
        r.report = generate(desk_config(r.root));
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

Outcome cardinality() {
    PipelineConfig cfg;
    cfg.subjects = default_subject_ids(15);
    const auto plan = plan_clips(cfg);
    std::map<ActionLabel, std::size_t> per_class;
    std::map<AugmentMethod, std::size_t> per_method;
    for (const auto& t : plan) {
        ++per_class[t.action];
        ++per_method[t.method];
    }
    bool ok = plan.size() == 2250 && per_class.size() == 3 && per_method.size() == 5;
    for (const auto& [k, n] : per_class) ok &= n == 750;
    for (const auto& [k, n] : per_method) ok &= n == 450;

    const DeskRun& desk = desk_run();
    std::map<ActionLabel, std::size_t> desk_class;
    std::map<AugmentMethod, std::size_t> desk_method;
    std::size_t on_disk = 0;
    for (const auto& e : desk.report.manifest.entries) {
        if (!e.ok()) continue;
        ++desk_class[e.label];
        ++desk_method[e.method];
        on_disk += fs::exists(desk.root / e.path);
    }
    bool desk_ok = desk.report.manifest.entries.size() == 60 && desk.report.failed == 0 && on_disk == 60 &&
                   desk_class.size() == 3 && desk_method.size() == 5 && desk.seconds < 600;
    for (const auto& [k, n] : desk_class) desk_ok &= n == 20;
    for (const auto& [k, n] : desk_method) desk_ok &= n == 12;
    return {ok && desk_ok, fmt("full plan %zu clips; desk %zu/60 clips on disk, %zu failed, %.0f s (limit 600 s)",
                               plan.size(), on_disk, desk.report.failed, desk.seconds)};
}

Outcome determinism() {
    const DeskRun& a = desk_run();
    const fs::path b = scratch_dir("desk_b");
    const GenerateReport rb = generate(desk_config(b));
    const std::uint64_t ha = tree_hash(a.root), hb = tree_hash(b);
    fs::remove_all(b);
    return {ha == hb && rb.failed == 0, fmt("tree hashes %016llx vs %016llx", static_cast<unsigned long long>(ha),
                                            static_cast<unsigned long long>(hb))};
}

Outcome augmentation_ranges() {
    const std::vector<std::string> ids{"default"};
    struct Acc {
        double lo, hi, sum = 0;
        std::size_t n = 0;
        bool in_range = true;
        void add(double v) {
            in_range &= v >= lo && v <= hi;
            sum += v;
            ++n;
        }
        // 1% of the interval width, around the uniform mean.
        bool mean_ok() const { return n == 0 || std::abs(sum / n - 0.5 * (lo + hi)) <= 0.01 * (hi - lo); }
    };
    bool ok = true;
    std::string worst;
    for (AugmentMethod m : kAllMethods) {
        Acc theta{-90, 90}, s{0.7, 1.3}, x{-0.5, 0.5}, y{-0.1, 0.1};
        Rng rng(StableHasher().add("acceptance").add(to_string(m)).finish());
        for (int k = 0; k < 10000; ++k) {
            const AugmentSpec spec = sample_spec(m, rng, ids);
            spec.validate();
            for (auto v : {spec.theta, spec.theta1, spec.theta2})
                if (v) theta.add(*v);
            if (spec.s) s.add(*spec.s);
            for (auto v : {spec.x, spec.x1, spec.x2})
                if (v) x.add(*v);
            for (auto v : {spec.y, spec.y1, spec.y2})
                if (v) y.add(*v);
        }
        for (const Acc* a : {&theta, &s, &x, &y}) {
            if (!a->in_range || !a->mean_ok()) {
                ok = false;
                worst += fmt(" %s[%g,%g] mean %g;", std::string(to_string(m)).c_str(), a->lo, a->hi, a->sum / a->n);
            }
        }
    }
    return {ok, ok ? "10^4 specs per method, all in range, means within 1%" : worst};
}

Outcome camera_track_endpoints() {
    Rng rng(99);
    std::size_t bad = 0;
    for (int k = 0; k < 10000; ++k) {
        const AugmentSpec s = sample_spec(AugmentMethod::RoomMotion, rng);
        const double h = rng.uniform(1.4, 2.0);
        const std::size_t n = 2 + rng.below(200);
        const auto a = camera_track(s, 0, n, h), b = camera_track(s, n - 1, n, h);
        bad += !(a.offset.x() == *s.x1 * h && a.offset.y() == *s.y1 * h && a.angle == *s.theta1);
        bad += !(b.offset.x() == *s.x2 * h && b.offset.y() == *s.y2 * h && b.angle == *s.theta2);
    }
    // Also through a realized clip.
    const ProceduralSubject subj = make_procedural_subject("s01");
    AugmentAssets assets;
    assets.room = make_living_room();
    const AugmentSpec s = sample_spec(AugmentMethod::RoomMotion, rng);
    const RealizedClip clip = realize(s, assets, subj.body, subj.takes[0]);
    const double h = clip.body_height;
    const auto& f = clip.track.front();
    const auto& l = clip.track.back();
    bad += !(f.offset.x() == *s.x1 * h && f.offset.y() == *s.y1 * h && f.angle == *s.theta1);
    bad += !(l.offset.x() == *s.x2 * h && l.offset.y() == *s.y2 * h && l.angle == *s.theta2);
    return {bad == 0, fmt("%zu mismatches over 10^4 tracks and one realized clip", bad)};
}

std::pair<GrayImage, GrayImage> shifted_pair(int w, int h, int dx, std::uint64_t seed) {
    const int m = 16, pw = w + 2 * m, ph = h + 2 * m;
    Rng rng(seed);
    std::vector<std::array<double, 4>> waves;
    for (int i = 0; i < 6; ++i) waves.push_back({rng.uniform(0.02, 0.15), rng.uniform(0.02, 0.15), rng.uniform(0, 6.28), rng.uniform(0.5, 1)});
    std::vector<float> p(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
            double v = 0, total = 0;
            for (const auto& w : waves) {
                v += w[3] * std::sin(w[0] * x + w[1] * y + w[2]) * std::cos(w[1] * x - w[0] * y);
                total += w[3];
            }
            p[static_cast<std::size_t>(y) * pw + x] = static_cast<float>(0.5 + 0.5 * v / total);
        }
    GrayImage a(w, h), b(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            a.at(x, y) = p[static_cast<std::size_t>(y + m) * pw + x + m];
            b.at(x, y) = p[static_cast<std::size_t>(y + m) * pw + x + m - dx];
        }
    return {a, b};
}

double median_epe(const FlowField& f, double du, int border) {
    std::vector<double> e;
    for (int y = border; y < f.height - border; ++y)
        for (int x = border; x < f.width - border; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * f.width + x;
            e.push_back(std::hypot(f.u[i] - du, f.v[i]));
        }
    std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(e.size() / 2), e.end());
    return e[e.size() / 2];
}

Outcome flow_oracle() {
    const auto [p0, n0] = shifted_pair(224, 224, 0, 1);
    const auto [p3, n3] = shifted_pair(224, 224, 3, 2);
    const auto [p12, n12] = shifted_pair(224, 224, 12, 3);
    const double e0 = median_epe(tvl1_flow(p0, n0), 0, 0);
    const auto t0 = Clock::now();
    const double e3 = median_epe(tvl1_flow(p3, n3), 3, 8);
    const double secs = seconds_since(t0);
    const double e12 = median_epe(tvl1_flow(p12, n12), 12, 16);
    FlowField raw(1, 1);
    raw.u[0] = 25.0f;
    raw.v[0] = -25.0f;
    const FlowField t = truncate_normalize(raw);
    const bool ok = e0 < 0.05 && e3 < 0.3 && e12 < 1.0 && t.u[0] == 1.0f && t.v[0] == -1.0f && secs < 5.0;
    return {ok, fmt("median EPE 0px %.4f, 3px %.4f, 12px %.4f; 25 -> %g; %.2f s per 224x224 pair", e0, e3, e12, t.u[0], secs)};
}

Outcome lbs_fk() {
    const SkinnedBody body = make_procedural_humanoid();
    const Mesh rest = lbs_pose(body, PoseFrame::identity(body.rig.size()));
    double id_err = 0;
    for (std::size_t i = 0; i < rest.vertices.size(); ++i)
        id_err = std::max(id_err, static_cast<double>((rest.vertices[i] - body.template_mesh.vertices[i]).norm()));
    const Joint& root = body.rig.joints[0];
    Rng rng(2024);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        PoseFrame pose = PoseFrame::identity(body.rig.size());
        for (auto& r : pose.joint_rotations) r = Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * 0.6;
        const Mat3d R = rotation_from_axis_angle(Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) * 2.0);
        const Vec3d t(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        PoseFrame moved = pose;
        moved.joint_rotations[0] = axis_angle_from_rotation(root.rest_rotation.transpose() * R * root.rest_rotation *
                                                            rotation_from_axis_angle(pose.joint_rotations[0]));
        moved.root_translation = R * (pose.root_translation + root.rest_translation) + t - root.rest_translation;
        const Mesh a = lbs_pose(body, pose), b = lbs_pose(body, moved);
        for (std::size_t i = 0; i < a.vertices.size(); ++i)
            worst = std::max(worst, (b.vertices[i].cast<double>() - (R * a.vertices[i].cast<double>() + t)).norm());
    }
    return {id_err < 1e-6 && worst < 1e-5, fmt("identity max error %.2e m, rigid equivariance max error %.2e m", id_err, worst)};
}

Outcome rasterizer() {
    Rng rng(1000);
    std::size_t errors = 0, compared = 0;
    for (int k = 0; k < 1000; ++k) {
        SceneGraph s;
        s.camera.pose = look_from(Vec3d(0, 0, 4), Vec3d(0, 0, 0));
        s.ambient = Vec3d::Ones();
        std::array<std::array<Vec3d, 3>, 2> tri;
        for (int t = 0; t < 2; ++t) {
            Mesh m;
            for (int v = 0; v < 3; ++v) {
                tri[t][v] = Vec3d(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-2, 2));
                m.vertices.push_back(tri[t][v].cast<float>());
                tri[t][v] = m.vertices.back().cast<double>();
            }
            m.triangles = {{0, 1, 2}};
            SceneNode n;
            n.mesh = std::make_shared<const Mesh>(m);
            n.color_override = Vec3d::Ones();
            s.nodes.push_back(n);
        }
        RenderConfig rc;
        rc.width = rc.height = 64;
        rc.shadows = false;
        const Framebuffer fb = rasterize_frame(s, rc);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                Vec3d o, d;
                test::pixel_ray(s.camera, 64, 64, x, y, o, d);
                const auto h0 = test::ray_triangle(o, d, tri[0][0], tri[0][1], tri[0][2]);
                const auto h1 = test::ray_triangle(o, d, tri[1][0], tri[1][1], tri[1][2]);
                if (!h0 || !h1 || h0->b_min < 2e-3 || h1->b_min < 2e-3 || std::abs(h0->t - h1->t) < 5e-3) continue;
                ++compared;
                errors += fb.node[static_cast<std::size_t>(y) * 64 + x] != (h0->t < h1->t ? 0 : 1);
            }
    }

    const auto body = std::make_shared<const Mesh>(make_procedural_humanoid().template_mesh);
    const auto bg = placeholder_backgrounds()[0];
    auto body_only = [](SceneGraph s) {
        std::erase_if(s.nodes, [](const SceneNode& n) { return n.role != NodeRole::Body; });
        return s;
    };
    double worst_mean = 0;
    for (double theta : {-90.0, -45.0, 20.0, 60.0, 90.0}) {
        const Framebuffer a = rasterize_frame(body_only(orbit_camera_and_light(build_wall_scene(bg, body, 0.0), theta)));
        const Framebuffer b = rasterize_frame(body_only(build_wall_scene(bg, body, -theta)));
        double diff = 0;
        for (std::size_t i = 0; i < a.color.size(); ++i) diff += std::abs(int(a.color[i]) - int(b.color[i]));
        worst_mean = std::max(worst_mean, diff / a.color.size() / 255.0);
    }
    return {errors == 0 && compared > 10000 && worst_mean < 1.0 / 255,
            fmt("%zu visibility errors over %zu pixels of 1000 pairs; orbit mean difference %.5f (limit %.5f)", errors,
                compared, worst_mean, 1.0 / 255)};
}

Outcome reconstruction() {
    const Environment room = make_living_room();
    RenderConfig rc;
    rc.shadows = false;
    const DepthSequence seq = render_depth_sequence(room_orbit_scenes(room, 100, 0.8, 360.0), rc);
    const auto frames = frames_from_depth_sequence(seq);
    const auto t0 = Clock::now();
    const ReconResult r = reconstruct(frames);
    const double secs = seconds_since(t0);
    Isometry align;
    const double ate = absolute_trajectory_error(r.trajectory, seq.poses, &align);
    const Mesh truth = environment_world_mesh(room);
    std::vector<Vec3d> pts;
    const std::size_t stride = std::max<std::size_t>(1, r.mesh.vertices.size() / 20000);
    for (std::size_t i = 0; i < r.mesh.vertices.size(); i += stride) pts.push_back(align * r.mesh.vertices[i].cast<double>());
    const double rms = pts.empty() ? 1e9 : point_to_mesh_rms(pts, truth);
    const double voxel = ReconConfig{}.tsdf.voxel_size;
    return {ate < 0.02 && rms < 2 * voxel && secs < 300 && !r.tracking_lost,
            fmt("ATE %.1f mm, mesh RMS %.1f mm (limit %.0f mm), %zu fragments, %.0f s", ate * 1e3, rms * 1e3, 2 * voxel * 1e3,
                r.fragment_count, secs)};
}

Outcome preprocess() {
    std::size_t bad = 0;
    for (int w = 224; w <= 1000; ++w) {
        // Enumeration: n = smallest count of 224-wide crops covering w, spread evenly.
        int n = 1;
        while (n * 224 < w) ++n;
        std::vector<int> expect;
        if (n == 1) {
            expect.push_back((w - 224) / 2);
        } else {
            for (int i = 0; i < n; ++i) {
                const long num = static_cast<long>(i) * (w - 224);
                // round half away from zero for a nonnegative fraction
                expect.push_back(static_cast<int>((2 * num + (n - 1)) / (2 * (n - 1))));
            }
        }
        bad += crop_offsets(w) != expect;
    }
    ClipContainer c;
    c.header = {1000, 448, 50, 60, "walking", ""};
    Rng rng(5);
    for (int k = 0; k < 60; ++k) {
        std::vector<std::uint8_t> f(1000u * 448 * 3);
        for (auto& v : f) v = static_cast<std::uint8_t>(rng.below(256));
        c.frames.push_back(std::move(f));
    }
    const auto out = preprocess_clip(c);
    bool shapes = out.size() == 3;
    for (const auto& n : out) {
        shapes &= n.fps == 25 && n.width == 224 && n.height == 224 && n.frames.size() == 30;
        for (const auto& f : n.frames) {
            shapes &= f.size() == 224u * 224 * 3;
            for (float v : f) shapes &= v >= -1.0f && v <= 1.0f;
        }
    }
    return {bad == 0 && shapes, fmt("%zu offset mismatches over widths 224-1000; 1000x448@50fps -> %zu crops of 224x224@25fps",
                                    bad, out.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
        {"augmentation-ranges", augmentation_ranges},
        {"camera-track-endpoints", camera_track_endpoints},
        {"lbs-fk", lbs_fk},
        {"rasterizer", rasterizer},
        {"flow-oracle", flow_oracle},
        {"preprocess", preprocess},
        {"reconstruction-round-trip", reconstruction},
        {"dataset-cardinality", cardinality},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    try {
        fs::remove_all(desk_run().root);
    } catch (const std::exception&) {
    }
    return failed == 0 ? 0 : 1;
}
